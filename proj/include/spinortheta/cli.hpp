#pragma once

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinortheta/spinortheta.hpp"

namespace spinortheta::cli {

using nlohmann::json;

struct RunConfig {
    std::string subcommand;
    std::optional<TernaryForm> form;
    std::int64_t max_m = 100;
    std::vector<std::int64_t> primes;  // empty = defaults
    std::string format = "json";       // json | csv
    std::int64_t m = 0;                // density target
    std::int64_t p = 0;                // density prime
    std::int64_t kappa = 1;
    int k_max = 0;      // 0 = default
    std::uint64_t seed = 0;  // reserved for sampling subcommands
};

namespace detail_cli {

inline const TernaryForm& need_form(const RunConfig& cfg) {
    if (!cfg.form) throw std::invalid_argument("this subcommand needs --form \"a b c d e f\"");
    return *cfg.form;
}

inline void emit_row(std::ostream& out, const std::string& format, const json& row,
                     const std::vector<std::string>& columns) {
    if (format == "csv") {
        bool first = true;
        for (const auto& c : columns) {
            if (!first) out << ",";
            first = false;
            const auto& v = row.at(c);
            if (v.is_string())
                out << v.get<std::string>();
            else
                out << v.dump();
        }
        out << "\n";
    } else {
        out << row.dump() << "\n";
    }
}

inline void emit_header(std::ostream& out, const std::string& format,
                        const std::vector<std::string>& columns) {
    if (format != "csv") return;
    bool first = true;
    for (const auto& c : columns) {
        if (!first) out << ",";
        first = false;
        out << c;
    }
    out << "\n";
}

}  // namespace detail_cli

inline int cmd_theta(const RunConfig& cfg, std::ostream& out) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    if (cfg.max_m < 0) throw std::invalid_argument("--max-m must be >= 0");
    ThetaSlice slice = theta_coefficients(f, cfg.max_m);
    detail_cli::emit_header(out, cfg.format, {"m", "r"});
    for (std::int64_t m = 0; m <= cfg.max_m; ++m)
        detail_cli::emit_row(out, cfg.format, json{{"m", m}, {"r", slice.r(m)}}, {"m", "r"});
    return 0;
}

inline int cmd_genus(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    GenusCatalog cat = genus_enumerate(f, cfg.primes);
    if (cat.single_prime_warning)
        err << "warning: one-prime neighbor graphs may reach only a single spinor genus\n";
    json j;
    j["classes"] = json::array();
    for (const auto& cls : cat.classes) j["classes"].push_back(cls.coeffs());
    j["aut_orders"] = cat.aut_orders;
    j["edges"] = json::array();
    for (const auto& e : cat.edges) j["edges"].push_back({e.from, e.to, e.p});
    j["weight_sum"] = to_fraction_string(cat.weight_sum);
    out << j.dump() << "\n";
    return 0;
}

inline int cmd_auto(const RunConfig& cfg, std::ostream& out) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    auto group = automorphism_group(f);
    json j;
    j["order"] = group.size();
    j["transforms"] = json::array();
    for (const auto& u : group) j["transforms"].push_back(u.m);
    out << j.dump() << "\n";
    return 0;
}

inline int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    DensityEstimate est = local_density(f, cfg.m, cfg.p, cfg.k_max);
    if (!est.stabilized) {
        err << "density did not stabilize within k_max; raise --k-max\n";
        return 1;
    }
    json j{{"value", to_fraction_string(est.value)}, {"stabilized_at", est.stabilized_at}};
    out << j.dump() << "\n";
    return 0;
}

inline int cmd_characters(const RunConfig& cfg, std::ostream& out) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    GenusCatalog cat = genus_enumerate(f, cfg.primes);
    detail_cli::emit_header(out, cfg.format, {"kappa", "compatible"});
    for (const auto& chi : character_group(cat))
        detail_cli::emit_row(out, cfg.format,
                             json{{"kappa", chi.kappa}, {"compatible", is_compatible(cat, chi)}},
                             {"kappa", "compatible"});
    return 0;
}

inline int cmd_twisted(const RunConfig& cfg, std::ostream& out) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    GenusCatalog cat = genus_enumerate(f, cfg.primes);
    GenusCharacter chi = detail::make_character(cfg.kappa);
    ClassCharacterTable table = class_character_values(cat, chi);
    GenusThetas gt = genus_thetas(cat, cfg.max_m);
    detail_cli::emit_header(out, cfg.format, {"m", "value"});
    for (std::int64_t m = 0; m <= cfg.max_m; ++m)
        detail_cli::emit_row(out, cfg.format,
                             json{{"m", m}, {"value", to_fraction_string(twisted_sum(cat, table, gt, m))}},
                             {"m", "value"});
    return 0;
}

inline int cmd_spinor_avg(const RunConfig& cfg, std::ostream& out) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    GenusCatalog cat = genus_enumerate(f, cfg.primes);
    SpinorAnalysis an = analyze_spinor_structure(cat);
    GenusThetas gt = genus_thetas(cat, cfg.max_m);
    detail_cli::emit_header(out, cfg.format, {"m", "part", "value"});
    for (std::int64_t m = 0; m <= cfg.max_m; ++m)
        for (int part = 0; part < static_cast<int>(an.parts.size()); ++part)
            detail_cli::emit_row(
                out, cfg.format,
                json{{"m", m},
                     {"part", part},
                     {"value", to_fraction_string(spinor_average(cat, an, gt, part, m))}},
                {"m", "part", "value"});
    return 0;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const TernaryForm& f = detail_cli::need_form(cfg);
    GenusCatalog cat = genus_enumerate(f, cfg.primes);
    GenusCharacter chi = detail::make_character(cfg.kappa);
    if (chi.kappa <= 0) throw std::invalid_argument("fit needs a positive --kappa");
    std::int64_t x_max = 1;
    while ((x_max + 1) * (x_max + 1) * chi.kappa <= cfg.max_m) ++x_max;
    LocalFactorTable table = fit_local_factor(cat, chi, x_max);
    detail_cli::emit_header(out, cfg.format, {"x", "m", "g"});
    for (const auto& [x, g] : table.values)
        detail_cli::emit_row(out, cfg.format,
                             json{{"x", x}, {"m", chi.kappa * x * x}, {"g", to_fraction_string(g)}},
                             {"x", "m", "g"});
    if (!table.violations.empty()) {
        err << "support violations (nonzero twisted sum off kappa*x^2):";
        for (auto m : table.violations) err << " " << m;
        err << "\n";
        return 2;
    }
    return 0;
}

// Reproduces the worked example end to end and prints one line per check.
inline int cmd_verify_paper(const RunConfig& cfg, std::ostream& out) {
    const std::int64_t max_m = cfg.max_m > 100 ? cfg.max_m : 20000;
    int failures = 0;
    auto report = [&](bool ok, const std::string& name, const std::string& expected,
                      const std::string& observed) {
        if (!ok) ++failures;
        out << (ok ? "PASS" : "FAIL") << " | " << name << " | expected " << expected
            << " | observed " << observed << "\n";
    };

    TernaryForm q1 = TernaryForm::from_coeffs(4, 16, 64);
    TernaryForm q2 = TernaryForm::from_coeffs(20, 16, 16, 16, 0, 0);

    GenusCatalog cat = genus_enumerate(q1);
    {
        std::string obs = std::to_string(cat.classes.size()) + " classes, aut orders";
        for (auto a : cat.aut_orders) obs += " " + std::to_string(a);
        report(cat.classes.size() == 2 && cat.aut_orders == std::vector<std::int64_t>{8, 8},
               "genus structure", "2 classes, aut orders 8 8", obs);
    }

    GenusThetas gt = genus_thetas(cat, max_m);
    int idx1 = classify(q1, cat);
    int idx2 = classify(q2, cat);
    const ThetaSlice& s1 = gt.slices[idx1];
    const ThetaSlice& s2 = gt.slices[idx2];
    {
        std::array<std::int64_t, 4> obs{s1.r(4), s2.r(4), s1.r(16), s2.r(16)};
        report(obs == std::array<std::int64_t, 4>{2, 0, 4, 4}, "representation table",
               "r1(4)=2 r2(4)=0 r1(16)=4 r2(16)=4",
               "r1(4)=" + std::to_string(obs[0]) + " r2(4)=" + std::to_string(obs[1]) +
                   " r1(16)=" + std::to_string(obs[2]) + " r2(16)=" + std::to_string(obs[3]));
    }

    {
        std::int64_t bad = 0, first_bad = -1;
        for (std::int64_t m = 1; m <= max_m; ++m) {
            std::int64_t diff = s1.r(m) - s2.r(m);
            std::int64_t expect = 0;
            if (m % 4 == 0) {
                std::int64_t q = m / 4;
                std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(q))));
                for (std::int64_t c = std::max<std::int64_t>(1, r - 2); c <= r + 2; ++c)
                    if (c * c == q && c % 2 == 1)
                        expect = 2 * c *
                                 hilbert_symbol(make_rational(-1), make_rational(2 * c), Place::finite(2));
            }
            if (diff != expect) {
                ++bad;
                if (first_bad < 0) first_bad = m;
            }
        }
        report(bad == 0, "difference identity m <= " + std::to_string(max_m),
               "r1(m)-r2(m) = 2n(-1,2n)_2 on m=4n^2 (n odd), else 0",
               bad == 0 ? "all match" : std::to_string(bad) + " mismatches, first at m=" + std::to_string(first_bad));
    }

    SpinorAnalysis an = analyze_spinor_structure(cat);
    {
        std::string obs = std::to_string(an.characters.size()) + " characters,";
        for (const auto& c : an.characters) obs += " kappa=" + std::to_string(c.kappa);
        obs += "; " + std::to_string(an.parts.size()) + " spinor genera";
        report(an.characters.size() == 2 && an.parts.size() == 2, "character group / partition",
               "2 characters (kappa=-1,1), 2 spinor genera", obs);
    }

    {
        GenusCharacter chi = detail::make_character(1);
        ClassCharacterTable table = class_character_values(cat, chi);
        Rational t4 = twisted_sum(cat, table, gt, 4);
        Rational t16 = twisted_sum(cat, table, gt, 16);
        Rational t36 = twisted_sum(cat, table, gt, 36);
        bool ok = t4 == make_rational(1, 4) && t16 == 0 && t36 == make_rational(-3, 4);
        report(ok, "twisted sums", "T(4)=1/4 T(16)=0 T(36)=-3/4",
               "T(4)=" + to_fraction_string(t4) + " T(16)=" + to_fraction_string(t16) +
                   " T(36)=" + to_fraction_string(t36));
    }

    {
        // Local factor table: calibration at x=2, zero at x=4, odd-multiplier law,
        // dyadic vanishing for m = 2^j * odd with j >= 6.
        GenusCharacter chi = detail::make_character(1);
        std::int64_t x_max = 1;
        while ((x_max + 1) * (x_max + 1) <= max_m) ++x_max;
        LocalFactorTable table = fit_local_factor(cat, chi, x_max);
        bool ok = table.calibration_x && *table.calibration_x == 2;
        Rational g2 = table.values.at(2);
        ok = ok && g2 != 0 && table.values.at(4) == 0;
        std::int64_t law_bad = 0;
        for (std::int64_t n = 1; 2 * n <= x_max; n += 2) {
            int sym = hilbert_symbol(make_rational(-1), make_rational(n), Place::finite(2));
            if (table.values.at(2 * n) != make_rational(sym) * g2) ++law_bad;
        }
        std::int64_t dyadic_bad = 0;
        for (std::int64_t x = 8; x <= x_max; x += 8)
            if (table.values.at(x) != 0) ++dyadic_bad;
        ok = ok && law_bad == 0 && dyadic_bad == 0 && table.violations.empty();
        report(ok, "local factor table",
               "g(4)=0, g(2n)=(-1,n)_2 g(2), g=0 at v2(m)>=6, no support violations",
               "calibration x=" + std::to_string(table.calibration_x.value_or(-1)) + ", law mismatches " +
                   std::to_string(law_bad) + ", dyadic nonzero " + std::to_string(dyadic_bad) +
                   ", violations " + std::to_string(table.violations.size()));
    }

    {
        std::int64_t bad = 0;
        std::int64_t bound = std::min<std::int64_t>(2000, max_m);
        for (std::int64_t m = 0; m <= bound; ++m) {
            Rational total = 0;
            for (int part = 0; part < static_cast<int>(an.parts.size()); ++part)
                total += spinor_average(cat, an, gt, part, m);
            if (total != genus_weighted_average(cat, gt, m)) ++bad;
        }
        report(bad == 0, "spinor average partition of the genus average",
               "sum over parts equals genus average for m <= " + std::to_string(bound),
               bad == 0 ? "all match" : std::to_string(bad) + " mismatches");
    }

    out << (failures == 0 ? "VERIFY-PAPER: PASS" : "VERIFY-PAPER: FAIL") << " (" << failures
        << " failing checks)\n";
    return failures == 0 ? 0 : 1;
}

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.subcommand == "theta") return cmd_theta(cfg, out);
        if (cfg.subcommand == "genus") return cmd_genus(cfg, out, err);
        if (cfg.subcommand == "auto") return cmd_auto(cfg, out);
        if (cfg.subcommand == "density") return cmd_density(cfg, out, err);
        if (cfg.subcommand == "characters") return cmd_characters(cfg, out);
        if (cfg.subcommand == "twisted") return cmd_twisted(cfg, out);
        if (cfg.subcommand == "spinor-avg") return cmd_spinor_avg(cfg, out);
        if (cfg.subcommand == "fit") return cmd_fit(cfg, out, err);
        if (cfg.subcommand == "verify-paper") return cmd_verify_paper(cfg, out);
        err << "unknown subcommand: " << cfg.subcommand << "\n";
        return 1;
    } catch (const inconsistent_labeling_error& e) {
        err << "internal invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        err << "internal invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace spinortheta::cli
