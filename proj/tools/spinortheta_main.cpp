// Command line front end: exact computations on positive definite integral
// ternary quadratic forms (theta coefficients, genus enumeration, local
// densities, spinor characters and twisted averages).

#include <CLI11.hpp>

#include "spinortheta/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic for ternary quadratic forms, genera and spinor genera"};
    app.require_subcommand(1);

    spinortheta::cli::RunConfig cfg;
    std::string form_literal;
    std::string primes_csv;

    auto add_common = [&](CLI::App* sub, bool needs_form) {
        auto* opt = sub->add_option("--form", form_literal,
                                    "form literal \"a b c d e f\" for ax^2+by^2+cz^2+dxy+exz+fyz");
        if (needs_form) opt->required();
        sub->add_option("--max-m", cfg.max_m, "largest m to report");
        sub->add_option("--primes", primes_csv, "comma separated traversal primes (odd, coprime to 2*det)");
        sub->add_option("--kappa", cfg.kappa, "character index kappa (any nonzero integer, used mod squares)");
        sub->add_option("--format", cfg.format, "output format: json (default) or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--k-max", cfg.k_max, "override the density stabilization depth");
        sub->add_option("--seed", cfg.seed, "random seed (reserved for sampling subcommands)");
        return sub;
    };

    add_common(app.add_subcommand("theta", "representation numbers r_Q(m) for 0 <= m <= max-m"), true);
    add_common(app.add_subcommand("genus", "enumerate the genus via Kneser p-neighbors"), true);
    add_common(app.add_subcommand("auto", "integral automorphism group of the form"), true);
    auto* density = add_common(app.add_subcommand("density", "local representation density at p"), true);
    density->add_option("--m", cfg.m, "target value m (nonzero)")->required();
    density->add_option("--p", cfg.p, "prime p")->required();
    add_common(app.add_subcommand("characters", "character group of the genus with compatibility flags"), true);
    add_common(app.add_subcommand("twisted", "character-twisted weighted sums for m <= max-m"), true);
    add_common(app.add_subcommand("spinor-avg", "average representation numbers per spinor genus"), true);
    add_common(app.add_subcommand("fit", "fitted bad-prime local factor table for kappa"), true);
    add_common(app.add_subcommand("verify-paper",
                                  "reproduce the two-form worked example end to end (default max-m 20000)"),
               false);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    try {
        if (!form_literal.empty()) cfg.form = spinortheta::TernaryForm::parse(form_literal);
        if (!primes_csv.empty()) {
            std::stringstream ss(primes_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.primes.push_back(std::stoll(tok));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return spinortheta::cli::run(cfg, std::cout, std::cerr);
}
