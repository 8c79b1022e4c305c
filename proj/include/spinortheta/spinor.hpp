#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "spinortheta/genus.hpp"
#include "spinortheta/local.hpp"

namespace spinortheta {

// Raised when character propagation along the neighbor graph is inconsistent,
// i.e. two edge paths assign different signs to the same class.
struct inconsistent_labeling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Local spinor norm group theta(SO(L_p)) as a subset of the canonical square
// classes at p, generated by norms Q(u) of lattice-preserving reflections.
struct SpinorNormGroup {
    std::int64_t p;
    std::set<std::int64_t> members;  // canonical representatives, contains 1
    bool certified;                  // true for odd p, heuristic at p = 2
};

namespace detail {

inline std::set<std::int64_t> close_square_class_subgroup(std::set<std::int64_t> gens,
                                                          Place v) {
    std::set<SquareClass> group;
    group.insert(square_class(1, v));
    for (auto g : gens) group.insert(square_class(make_rational(g), v));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<SquareClass> items(group.begin(), group.end());
        for (const auto& a : items)
            for (const auto& b : items)
                if (group.insert(square_class_product(a, b)).second) grew = true;
    }
    std::set<std::int64_t> out;
    for (const auto& c : group) out.insert(c.rep);
    return out;
}

// Strips the largest square p-power content from the doubled Gram matrix.
// Scaling a form by a square does not move any reflection norm across square
// classes, and it keeps all valuations small for the search below.
inline Mat3 strip_square_content(const Mat3& d, std::int64_t p) {
    int vmin_diag = 1 << 20, vmin_all = 1 << 20;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            if (d.at(r, c) == 0) continue;
            int v = valuation_i128(d.at(r, c), p);
            vmin_all = std::min(vmin_all, v);
            if (r == c) vmin_diag = std::min(vmin_diag, v);
        }
    int t = vmin_all / 2;
    if (p == 2) t = std::min(t, std::max(0, (vmin_diag - 1) / 2));
    std::int64_t scale = 1;
    for (int i = 0; i < 2 * t; ++i) scale *= p;
    Mat3 out = d;
    for (auto& e : out.m) e /= scale;
    return out;
}

inline std::int64_t eval_gram(const Mat3& d, const Vec3& x) {
    __int128 s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += static_cast<__int128>(d.at(i, j)) * x[i] * x[j];
    return static_cast<std::int64_t>(s / 2);
}

}  // namespace detail

// The subgroup of square classes generated by Q(u) over vectors u primitive
// at p whose reflection tau_u preserves L_p, i.e. every 2B(e_i,u)/Q(u) is a
// p-adic integer. Square p-content is stripped first (a square scale moves no
// reflection norm across square classes). Odd p uses a layered search that
// expands only vectors still undecided at the current level and is exact for
// the stated valuation bound; p = 2 scans a fixed window mod 2^precision and
// is flagged heuristic, since dyadic rotations need not factor into
// lattice-preserving reflections.
inline SpinorNormGroup spinor_norm_group(const TernaryForm& f, std::int64_t p, int precision = 0) {
    if (!detail::is_prime(p)) throw std::invalid_argument("spinor_norm_group: p must be prime");
    Place v = Place::finite(p);
    Mat3 d = detail::strip_square_content(f.doubled_gram(), p);
    int vdet = detail::valuation_i128(d.det(), p) + (p == 2 ? -2 : 0);  // v_p(2 det(D/2))
    if (vdet < 0) vdet = 0;
    int vbound = vdet + 2;

    std::set<std::int64_t> gens;

    if (p == 2) {
        if (precision <= 0) precision = 6;
        std::int64_t mod = 1;
        for (int i = 0; i < precision; ++i) mod *= 2;
        int vcap = std::min(vbound, 2 * precision - 4);  // class stability guard
        for (std::int64_t x0 = 0; x0 < mod; ++x0)
            for (std::int64_t x1 = 0; x1 < mod; ++x1)
                for (std::int64_t x2 = 0; x2 < mod; ++x2) {
                    if ((x0 & 1) == 0 && (x1 & 1) == 0 && (x2 & 1) == 0) continue;
                    Vec3 u{x0, x1, x2};
                    std::int64_t q = detail::eval_gram(d, u);
                    if (q == 0) continue;
                    int vq = detail::valuation_i128(q, 2);
                    if (vq > vcap) continue;
                    Vec3 grad = d.apply(u);
                    bool ok = true;
                    for (int i = 0; i < 3 && ok; ++i) {
                        if (grad[i] == 0) continue;
                        ok = detail::valuation_i128(grad[i], 2) >= vq;
                    }
                    if (ok) gens.insert(square_class(make_rational(q), v).rep);
                }
    } else {
        int max_level = precision > 0 ? precision : vbound + 1;
        std::vector<Vec3> frontier;
        for (std::int64_t x0 = 0; x0 < p; ++x0)
            for (std::int64_t x1 = 0; x1 < p; ++x1)
                for (std::int64_t x2 = 0; x2 < p; ++x2) {
                    if (x0 == 0 && x1 == 0 && x2 == 0) continue;
                    frontier.push_back({x0, x1, x2});
                }
        std::int64_t pl = 1;  // p^(level-1), offset scale for expansion
        for (int level = 1; level <= max_level && !frontier.empty(); ++level) {
            std::vector<Vec3> next;
            for (const Vec3& u : frontier) {
                std::int64_t q = detail::eval_gram(d, u);
                int vq = (q == 0) ? level : detail::valuation_i128(q, p);
                Vec3 grad = d.apply(u);
                if (q != 0 && vq < level) {
                    // settled representative: classify exactly
                    if (vq > vbound) continue;
                    bool ok = true;
                    for (int i = 0; i < 3 && ok; ++i) {
                        if (grad[i] == 0) continue;
                        ok = detail::valuation_i128(grad[i], p) >= vq;
                    }
                    if (ok) gens.insert(square_class(make_rational(q), v).rep);
                } else if (level < max_level && level <= vbound) {
                    // undecided: expand unless the gradient already rules the
                    // vector out (validity needs v(grad) >= v(Q) >= level)
                    bool maybe = true;
                    for (int i = 0; i < 3 && maybe; ++i) {
                        if (grad[i] == 0) continue;
                        maybe = detail::valuation_i128(grad[i], p) >= level;
                    }
                    if (!maybe) continue;
                    std::int64_t step = pl * p;
                    for (std::int64_t t0 = 0; t0 < p; ++t0)
                        for (std::int64_t t1 = 0; t1 < p; ++t1)
                            for (std::int64_t t2 = 0; t2 < p; ++t2)
                                next.push_back(
                                    {u[0] + step * t0, u[1] + step * t1, u[2] + step * t2});
                }
            }
            frontier = std::move(next);
            pl *= p;
        }
    }

    SpinorNormGroup out{p, detail::close_square_class_subgroup(std::move(gens), v), p != 2};
    return out;
}

// A kappa-indexed quadratic idele character chi_kappa(a) = prod_v (-kappa,a)_v.
// kappa is squarefree with its sign carried; kappa = -1 is the trivial
// character. support lists the finite places where chi is ramified.
struct GenusCharacter {
    std::int64_t kappa;
    std::set<std::int64_t> support;
};

namespace detail {

inline std::int64_t squarefree_part(std::int64_t k) {
    if (k == 0) throw std::invalid_argument("kappa must be nonzero");
    std::int64_t sign = k < 0 ? -1 : 1;
    std::int64_t n = std::llabs(k), out = 1;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e & 1) out *= d;
    }
    return sign * out * n;
}

inline std::set<std::int64_t> character_support(std::int64_t kappa) {
    std::set<std::int64_t> sup;
    std::int64_t n = std::llabs(kappa);
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) {
            sup.insert(d);
            while (n % d == 0) n /= d;
        }
    if (n > 2 && n % 2) sup.insert(n);
    if (!square_class(make_rational(-kappa), Place::finite(2)).is_one()) sup.insert(2);
    return sup;
}

inline std::vector<std::int64_t> prime_support(const Integer& n) {
    std::vector<std::int64_t> primes;
    Integer rest = abs(n);
    for (std::int64_t p = 2; Integer(p) * p <= rest; ++p)
        if (rest % p == 0) {
            primes.push_back(p);
            while (rest % p == 0) rest /= p;
        }
    if (rest > 1) primes.push_back(rest.get_si());
    return primes;
}

inline GenusCharacter make_character(std::int64_t kappa) {
    std::int64_t k = squarefree_part(kappa);
    return GenusCharacter{k, character_support(k)};
}

}  // namespace detail

// All characters chi_kappa with kappa ranging over +-(squarefree divisors of
// 2 det) that kill the local spinor norm groups at every p | 2 det; this is
// the character group of the group permuting the spinor genera. The trivial
// character kappa = -1 is always a member and the set is closed under the
// product modulo squares.
inline std::vector<GenusCharacter> character_group(const GenusCatalog& cat) {
    Rational det = cat.classes.at(0).determinant();
    Integer n = 2 * det.get_num() * det.get_den();
    std::vector<std::int64_t> primes = detail::prime_support(n);

    std::map<std::int64_t, SpinorNormGroup> groups;
    for (auto p : primes) groups.emplace(p, spinor_norm_group(cat.classes[0], p));

    std::vector<std::int64_t> divisors = {1};
    for (auto p : primes) {
        size_t sz = divisors.size();
        for (size_t i = 0; i < sz; ++i) divisors.push_back(divisors[i] * p);
    }

    std::vector<std::int64_t> kappas;
    for (auto d : divisors) {
        for (std::int64_t kappa : {-d, d}) {
            bool ok = true;
            for (auto p : primes) {
                Place v = Place::finite(p);
                for (auto member : groups.at(p).members) {
                    if (chi_local(make_rational(kappa), make_rational(member), v) != 1) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) kappas.push_back(kappa);
        }
    }
    std::sort(kappas.begin(), kappas.end(), [](std::int64_t a, std::int64_t b) {
        if (std::llabs(a) != std::llabs(b)) return std::llabs(a) < std::llabs(b);
        return a < b;
    });
    std::vector<GenusCharacter> out;
    out.reserve(kappas.size());
    for (auto k : kappas) out.push_back(detail::make_character(k));
    return out;
}

// Compatibility in the sense of the twisted-average identity: the character
// kills the adelic stabilizer spinor norms (condition 2) and kappa is
// represented by the quadratic space (condition 1, checked locally at the
// real place and every p | 2 det kappa; local-global holds for spaces).
inline bool is_compatible(const GenusCatalog& cat, const GenusCharacter& chi) {
    const TernaryForm& f = cat.classes.at(0);
    Rational det = f.determinant();
    Integer n = 2 * det.get_num() * det.get_den();
    std::vector<std::int64_t> primes = detail::prime_support(n);

    for (auto p : primes) {
        SpinorNormGroup g = spinor_norm_group(f, p);
        Place v = Place::finite(p);
        for (auto member : g.members)
            if (chi_local(make_rational(chi.kappa), make_rational(member), v) != 1) return false;
    }

    if (!is_locally_represented(f, make_rational(chi.kappa), Place::real())) return false;
    std::set<std::int64_t> places(primes.begin(), primes.end());
    for (auto p : detail::prime_support(Integer(chi.kappa))) places.insert(p);
    places.insert(2);
    for (auto p : places)
        if (!is_locally_represented(f, make_rational(chi.kappa), Place::finite(p))) return false;
    return true;
}

// chi evaluated on the class representatives h_i: +1 on the base class and
// multiplied by (-kappa, p)_p along every p-neighbor edge. Values must be
// path independent; a conflict raises inconsistent_labeling_error.
struct ClassCharacterTable {
    GenusCharacter chi;
    std::vector<int> values;  // +-1 per class
};

inline ClassCharacterTable class_character_values(const GenusCatalog& cat,
                                                  const GenusCharacter& chi) {
    size_t t = cat.classes.size();
    std::vector<int> values(t, 0);
    values[0] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : cat.edges) {
            int step = chi_local(make_rational(chi.kappa), make_rational(e.p), Place::finite(e.p));
            for (auto [a, b] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
                if (values[a] != 0) {
                    int expect = values[a] * step;
                    if (values[b] == 0) {
                        values[b] = expect;
                        grew = true;
                    } else if (values[b] != expect) {
                        throw inconsistent_labeling_error(
                            "character labeling inconsistent along edge at p=" + std::to_string(e.p));
                    }
                }
            }
        }
    }
    for (auto v : values)
        if (v == 0) throw std::runtime_error("class_character_values: catalog graph not connected");
    return ClassCharacterTable{chi, values};
}

// Left side of the twisted average identity: sum_i chi(h_i) r_{Q_i}(m) / |O(Q_i)|.
inline Rational twisted_sum(const GenusCatalog& cat, const ClassCharacterTable& table,
                            const GenusThetas& gt, std::int64_t m) {
    Rational s = 0;
    for (size_t i = 0; i < cat.classes.size(); ++i)
        s += make_rational(table.values[i] * gt.slices[i].r(m), cat.aut_orders[i]);
    return s;
}

inline Rational twisted_sum(const GenusCatalog& cat, const GenusCharacter& chi, std::int64_t m) {
    ClassCharacterTable table = class_character_values(cat, chi);
    Rational s = 0;
    for (size_t i = 0; i < cat.classes.size(); ++i)
        s += make_rational(table.values[i] * rep_number(cat.classes[i], m), cat.aut_orders[i]);
    return s;
}

// Character group, per-character class values, and the induced partition of
// the classes into spinor genera, computed once and reused for bulk queries.
struct SpinorAnalysis {
    std::vector<GenusCharacter> characters;
    std::vector<ClassCharacterTable> tables;
    std::vector<std::vector<int>> parts;
};

inline SpinorAnalysis analyze_spinor_structure(const GenusCatalog& cat) {
    SpinorAnalysis an;
    an.characters = character_group(cat);
    an.tables.reserve(an.characters.size());
    for (const auto& chi : an.characters) an.tables.push_back(class_character_values(cat, chi));

    std::map<std::vector<int>, int> index;
    for (size_t i = 0; i < cat.classes.size(); ++i) {
        std::vector<int> key;
        key.reserve(an.tables.size());
        for (const auto& tab : an.tables) key.push_back(tab.values[i]);
        auto [it, fresh] = index.emplace(key, static_cast<int>(an.parts.size()));
        if (fresh) an.parts.emplace_back();
        an.parts[it->second].push_back(static_cast<int>(i));
    }
    return an;
}

// Classes grouped by their value vector over the full character group; two
// classes share a part exactly when every character agrees on them.
inline std::vector<std::vector<int>> spinor_partition(const GenusCatalog& cat) {
    return analyze_spinor_structure(cat).parts;
}

// Average over one spinor genus by finite Fourier inversion over the
// character group; equals the direct sum over the part's classes.
inline Rational spinor_average(const GenusCatalog& cat, const SpinorAnalysis& an,
                               const GenusThetas& gt, int part_index, std::int64_t m) {
    if (part_index < 0 || part_index >= static_cast<int>(an.parts.size()))
        throw std::invalid_argument("spinor_average: bad part index");
    int rep = an.parts[part_index].front();
    Rational s = 0;
    for (size_t c = 0; c < an.characters.size(); ++c)
        s += make_rational(an.tables[c].values[rep]) * twisted_sum(cat, an.tables[c], gt, m);
    return s / make_rational(static_cast<std::int64_t>(an.characters.size()));
}

inline Rational spinor_average(const GenusCatalog& cat, int part_index, std::int64_t m) {
    SpinorAnalysis an = analyze_spinor_structure(cat);
    GenusThetas gt = genus_thetas(cat, std::max<std::int64_t>(m, 0));
    return spinor_average(cat, an, gt, part_index, m);
}

// Empirically fitted bad-prime local factor table: g(x) is the twisted sum at
// m = kappa x^2 with the archimedean |x| divided out, so g(nx) = (-1,n)_2 g(x)
// for odd n on the fitted range. The smallest nonvanishing entry is the
// calibration unit; the support of the twisted sums outside {kappa x^2} is
// verified and reported.
struct LocalFactorTable {
    std::int64_t prime;
    std::int64_t kappa;
    std::map<std::int64_t, Rational> values;  // x -> g(x)
    std::optional<std::int64_t> calibration_x;
    std::vector<std::int64_t> violations;  // m with unexpected nonzero twisted sum
};

inline LocalFactorTable fit_local_factor(const GenusCatalog& cat, const GenusCharacter& chi,
                                         std::int64_t x_max) {
    if (chi.kappa <= 0) throw std::invalid_argument("fit_local_factor: needs positive kappa");
    if (x_max < 1) throw std::invalid_argument("fit_local_factor: x_max must be >= 1");
    std::int64_t bound = chi.kappa * x_max * x_max;
    GenusThetas gt = genus_thetas(cat, bound);
    ClassCharacterTable table = class_character_values(cat, chi);

    LocalFactorTable out{2, chi.kappa, {}, std::nullopt, {}};
    std::set<std::int64_t> support;
    for (std::int64_t x = 1; x <= x_max; ++x) {
        std::int64_t m = chi.kappa * x * x;
        support.insert(m);
        Rational g = twisted_sum(cat, table, gt, m) / make_rational(x);
        out.values[x] = g;
        if (!out.calibration_x && g != 0) out.calibration_x = x;
    }
    for (std::int64_t m = 1; m <= bound; ++m) {
        if (support.count(m)) continue;
        if (twisted_sum(cat, table, gt, m) != 0) out.violations.push_back(m);
    }
    return out;
}

}  // namespace spinortheta
