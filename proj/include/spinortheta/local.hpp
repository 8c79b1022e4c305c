#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "spinortheta/form.hpp"
#include "spinortheta/rational.hpp"

namespace spinortheta {

// A place of Q: a finite prime or the real place (p = 0).
struct Place {
    std::int64_t p = 0;

    static Place real() { return Place{0}; }
    static Place finite(std::int64_t prime);
    bool is_real() const { return p == 0; }
    auto operator<=>(const Place&) const = default;
};

namespace detail {

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline int valuation(const Integer& n, std::int64_t p, Integer* unit_out = nullptr) {
    if (n == 0) throw std::invalid_argument("valuation of zero");
    Integer unit;
    Integer pz(p);
    auto count = mpz_remove(unit.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t());
    if (unit_out) *unit_out = unit;
    return static_cast<int>(count);
}

inline int valuation_i128(__int128 n, std::int64_t p) {
    if (n == 0) throw std::invalid_argument("valuation of zero");
    if (n < 0) n = -n;
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline int legendre(const Integer& a, std::int64_t p) {
    Integer pz(p);
    return mpz_legendre(a.get_mpz_t(), pz.get_mpz_t());
}

inline std::int64_t least_nonresidue(std::int64_t p) {
    for (std::int64_t n = 2; n < p; ++n)
        if (legendre(Integer(n), p) == -1) return n;
    throw std::logic_error("no quadratic nonresidue found");
}

// (u-1)/2 mod 2 and (u^2-1)/8 mod 2 for odd u, the exponents of the dyadic
// Hilbert symbol formula.
inline int eps2(const Integer& u) { return mpz_fdiv_ui(u.get_mpz_t(), 4) == 3 ? 1 : 0; }
inline int omega2(const Integer& u) {
    unsigned long r = mpz_fdiv_ui(u.get_mpz_t(), 8);
    return (r == 3 || r == 5) ? 1 : 0;
}

inline int hilbert_int(const Integer& a, const Integer& b, Place v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert symbol needs nonzero arguments");
    if (v.is_real()) return (a < 0 && b < 0) ? -1 : 1;
    std::int64_t p = v.p;
    Integer u, w;
    int alpha = valuation(a, p, &u);
    int beta = valuation(b, p, &w);
    if (p == 2) {
        int e = eps2(u) * eps2(w) + alpha * omega2(w) + beta * omega2(u);
        return (e % 2) ? -1 : 1;
    }
    int sign = 1;
    if ((alpha & 1) && (beta & 1) && legendre(Integer(-1), p) == -1) sign = -sign;
    if (beta & 1) sign *= legendre(u, p);
    if (alpha & 1) sign *= legendre(w, p);
    return sign;
}

}  // namespace detail

inline Place Place::finite(std::int64_t prime) {
    if (!detail::is_prime(prime)) throw std::invalid_argument("Place::finite: not a prime");
    return Place{prime};
}

// Canonical representative of a * (F_v^x)^2: at odd p one of {1, u, p, up}
// with u the least positive nonresidue, at p = 2 one of {1,3,5,7,2,6,10,14},
// at the real place +-1.
struct SquareClass {
    Place place;
    std::int64_t rep = 1;

    bool is_one() const { return rep == 1; }
    auto operator<=>(const SquareClass&) const = default;
};

inline SquareClass square_class(const Rational& a, Place v) {
    if (a == 0) throw std::invalid_argument("square_class of zero");
    if (v.is_real()) return {v, a > 0 ? 1 : -1};
    std::int64_t p = v.p;
    Integer n = a.get_num() * a.get_den();  // same square class as a
    Integer u;
    int val = detail::valuation(n, p, &u);
    if (p == 2) {
        std::int64_t u8 = static_cast<std::int64_t>(mpz_fdiv_ui(u.get_mpz_t(), 8));
        return {v, (val & 1) ? 2 * u8 : u8};
    }
    std::int64_t unit_rep = detail::legendre(u, p) == 1 ? 1 : detail::least_nonresidue(p);
    return {v, (val & 1) ? p * unit_rep : unit_rep};
}

inline SquareClass square_class(std::int64_t a, Place v) { return square_class(make_rational(a), v); }

inline SquareClass square_class_product(const SquareClass& x, const SquareClass& y) {
    if (x.place != y.place) throw std::invalid_argument("square class product across places");
    return square_class(make_rational(x.rep) * make_rational(y.rep), x.place);
}

// (a,b)_v = 1 iff z^2 = a x^2 + b y^2 has a nontrivial F_v-solution.
inline int hilbert_symbol(const Rational& a, const Rational& b, Place v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert symbol needs nonzero arguments");
    return detail::hilbert_int(a.get_num() * a.get_den(), b.get_num() * b.get_den(), v);
}

// chi_kappa evaluated locally: (-kappa, a)_v.
inline int chi_local(const Rational& kappa, const Rational& a, Place v) {
    return hilbert_symbol(-kappa, a, v);
}

// Rational diagonalization <a,b,c> via ratios of leading principal minors of
// the Gram matrix (all positive for definite forms).
inline std::array<Rational, 3> diagonalize(const TernaryForm& f) {
    const Mat3& d = f.doubled_gram();
    auto g = [&](int i, int j) { return make_rational(d.at(i, j), 2); };
    Rational m1 = g(0, 0);
    Rational m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
    Rational m3 = f.determinant();
    return {m1, m2 / m1, m3 / m2};
}

// Product of pairwise Hilbert symbols of a diagonalization; independent of
// the diagonalization chosen.
inline int hasse_invariant(const TernaryForm& f, Place v) {
    auto d = diagonalize(f);
    return hilbert_symbol(d[0], d[1], v) * hilbert_symbol(d[0], d[2], v) *
           hilbert_symbol(d[1], d[2], v);
}

// Whether the quadratic space F (x) F_v represents c: the quaternary form
// <a,b,c',-c> is isotropic unless it has square discriminant and its Hasse
// invariant differs from (-1,-1)_v.
inline bool is_locally_represented(const TernaryForm& f, const Rational& c, Place v) {
    if (c == 0) throw std::invalid_argument("is_locally_represented: c must be nonzero");
    if (v.is_real()) return c > 0;
    auto d = diagonalize(f);
    Rational disc = d[0] * d[1] * d[2] * (-c);
    if (!square_class(disc, v).is_one()) return true;
    int eps = hilbert_symbol(d[0], d[1], v) * hilbert_symbol(d[0], d[2], v) *
              hilbert_symbol(d[1], d[2], v) * hilbert_symbol(d[0], -c, v) *
              hilbert_symbol(d[1], -c, v) * hilbert_symbol(d[2], -c, v);
    return eps == hilbert_symbol(make_rational(-1), make_rational(-1), v);
}

// Places where the even Clifford quaternion algebra is division, i.e. where
// the completed space is anisotropic. Decided by representability tests over
// the canonical square classes; always of even size, and containing the real
// place for definite forms.
inline std::vector<Place> ramified_places(const TernaryForm& f) {
    std::vector<Place> out;
    bool real_missing = !is_locally_represented(f, make_rational(-1), Place::real()) ||
                        !is_locally_represented(f, make_rational(1), Place::real());
    if (real_missing) out.push_back(Place::real());

    Integer n = 2 * f.determinant().get_num() * f.determinant().get_den();
    std::vector<std::int64_t> primes;
    Integer rest = abs(n);
    for (std::int64_t p = 2; Integer(p) * p <= rest; ++p) {
        if (rest % p == 0) {
            primes.push_back(p);
            while (rest % p == 0) rest /= p;
        }
    }
    if (rest > 1) primes.push_back(rest.get_si());

    for (std::int64_t p : primes) {
        Place v = Place::finite(p);
        std::vector<std::int64_t> classes;
        if (p == 2)
            classes = {1, 3, 5, 7, 2, 6, 10, 14};
        else {
            std::int64_t u = detail::least_nonresidue(p);
            classes = {1, u, p, p * u};
        }
        for (std::int64_t t : classes) {
            if (!is_locally_represented(f, make_rational(t), v)) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

// Stabilized local density value with its counting witness: counts holds
// N_j / p^(2j) for j = 1 .. stabilized_at + 2, whose last three entries agree.
struct DensityEstimate {
    Rational value;
    int stabilized_at = 0;
    std::vector<Rational> counts;
    bool stabilized = false;
};

namespace detail {

// Solution classes x mod p^j of Q(x) = m mod p^j are lifted level by level.
// A class with gradient valuation e < j is settled analytically:
//   - if p^(j+e) | Q(x) - m, the branch is smooth: it carries p^(3(K-j))
//     classes up to level j+e and exactly p^(2(K-j)+e) beyond (ATag);
//   - otherwise the defect v_p(Q(x) - m) < j+e is frozen for every
//     refinement, so the branch dies right after level delta (BTag).
// Classes whose gradient vanishes mod p^j expand all-or-nothing into their
// p^3 children. Only the expansion depth is bounded by k_max.
struct ATag {
    int j;
    int e;
};
struct BTag {
    int j;
    int delta;
};

inline Integer pow_int(std::int64_t p, int k) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
    return r;
}

}  // namespace detail

// N_k(p) / p^(2k) with N_k = #{x mod p^k : Q(x) = m mod p^k}, iterated until
// three consecutive levels agree or k_max is reached. k_max <= 0 selects the
// default v_p(4 det m) + 4.
inline DensityEstimate local_density(const TernaryForm& f, std::int64_t m, std::int64_t p,
                                     int k_max = 0) {
    if (m == 0) throw std::invalid_argument("local_density: m must be nonzero");
    if (!detail::is_prime(p)) throw std::invalid_argument("local_density: p must be prime");
    if (k_max <= 0) {
        Rational det = f.determinant();
        Integer arg = 4 * det.get_num() * det.get_den() * Integer(m);
        k_max = detail::valuation(arg, p) + 4;
    }
    if (k_max < 3) k_max = 3;

    // Expansion depth guard: representatives live in int64 coordinates and
    // gradients must stay within int64.
    std::int64_t dmax = 1;
    for (auto e : f.doubled_gram().m) dmax = std::max<std::int64_t>(dmax, std::llabs(e));
    const std::int64_t coord_limit = std::min<std::int64_t>(1'100'000'000'000LL, 3'000'000'000'000'000'000LL / (4 * dmax));
    int level_cap = 0;
    for (std::int64_t pw = 1; pw <= coord_limit / p; ++level_cap) pw *= p;
    if (level_cap < 1) level_cap = 1;

    const Mat3& D = f.doubled_gram();
    std::vector<detail::ATag> a_tags;
    std::vector<detail::BTag> b_tags;
    std::vector<Vec3> frontier;

    // Level 1 by full scan.
    {
        std::int64_t mm = ((m % p) + p) % p;
        for (std::int64_t x0 = 0; x0 < p; ++x0)
            for (std::int64_t x1 = 0; x1 < p; ++x1)
                for (std::int64_t x2 = 0; x2 < p; ++x2) {
                    Vec3 x{x0, x1, x2};
                    std::int64_t q = f.evaluate(x) % p;
                    if (((q % p) + p) % p == mm) frontier.push_back(x);
                }
    }

    auto count_at = [&](int K) {
        Integer n = 0;
        for (const auto& t : a_tags) {
            if (K < t.j) continue;
            if (K <= t.j + t.e)
                n += detail::pow_int(p, 3 * (K - t.j));
            else
                n += detail::pow_int(p, 2 * (K - t.j) + t.e);
        }
        for (const auto& t : b_tags) {
            if (K < t.j || K > t.delta) continue;
            n += detail::pow_int(p, 3 * (K - t.j));
        }
        return n;
    };

    DensityEstimate est;
    std::vector<Rational> densities;
    std::int64_t pj = p;  // p^j for the current level
    for (int j = 1;; ++j) {
        Integer nj = count_at(j) + Integer(static_cast<long>(frontier.size()));
        Rational dj(nj, detail::pow_int(p, 2 * j));
        dj.canonicalize();
        densities.push_back(dj);

        // Three consecutive equal values witness stabilization, but they are
        // trusted only once the branch analysis has resolved every class:
        // with classes still unresolved the sequence can plateau and move
        // again at a deeper level.
        if (frontier.empty()) break;
        if (j >= k_max || j >= level_cap) break;

        // Settle / expand the frontier into level j+1.
        std::vector<Vec3> next;
        for (const Vec3& x : frontier) {
            Vec3 grad = D.apply(x);
            int e = -1;  // min valuation over the gradient, -1 while >= j
            bool grad_zero_mod_pj = true;
            for (int i = 0; i < 3; ++i) {
                if (grad[i] == 0) continue;
                int vi = detail::valuation_i128(grad[i], p);
                if (vi < j) {
                    grad_zero_mod_pj = false;
                    if (e < 0 || vi < e) e = vi;
                }
            }
            __int128 defect = static_cast<__int128>(f.evaluate(x)) - m;
            if (grad_zero_mod_pj) {
                // all-or-nothing expansion
                bool live = defect == 0 || detail::valuation_i128(defect, p) >= j + 1;
                if (live) {
                    for (std::int64_t t0 = 0; t0 < p; ++t0)
                        for (std::int64_t t1 = 0; t1 < p; ++t1)
                            for (std::int64_t t2 = 0; t2 < p; ++t2)
                                next.push_back(Vec3{x[0] + pj * t0, x[1] + pj * t1, x[2] + pj * t2});
                } else {
                    b_tags.push_back({j, j});
                }
            } else if (defect == 0 || detail::valuation_i128(defect, p) >= j + e) {
                a_tags.push_back({j, e});
            } else {
                b_tags.push_back({j, detail::valuation_i128(defect, p)});
            }
        }
        frontier = std::move(next);
        if (!frontier.empty()) pj *= p;
    }

    if (!frontier.empty()) {
        // Expansion budget exhausted with classes unresolved.
        est.counts = densities;
        est.value = densities.back();
        est.stabilized = false;
        return est;
    }

    // Every class is settled, so N_K is given by the tags alone and the
    // density is constant past the largest tag horizon. Report the true
    // plateau with its three-equal-counts witness.
    Rational limit = 0;
    int horizon = 1;
    for (const auto& t : a_tags) {
        Rational contrib(detail::pow_int(p, t.e), detail::pow_int(p, 2 * t.j));
        contrib.canonicalize();
        limit += contrib;
        horizon = std::max(horizon, t.j + t.e);
    }
    for (const auto& t : b_tags) horizon = std::max(horizon, t.delta + 1);

    for (int j = static_cast<int>(densities.size()) + 1; j <= horizon + 2; ++j) {
        Rational dj(count_at(j), detail::pow_int(p, 2 * j));
        dj.canonicalize();
        densities.push_back(dj);
    }
    int plateau = horizon;  // smallest level from which the density stays at the limit
    while (plateau > 1 && densities[plateau - 2] == limit) --plateau;
    est.stabilized = true;
    est.stabilized_at = plateau;
    est.value = limit;
    est.counts.assign(densities.begin(), densities.begin() + std::min<size_t>(densities.size(), plateau + 2));
    return est;
}

// The archimedean density enters only as a ratio; the normalization constant
// cancels everywhere it is used.
inline double density_ratio_archimedean(std::int64_t m1, std::int64_t m2) {
    if (m1 <= 0 || m2 <= 0) throw std::invalid_argument("density_ratio_archimedean: need positive arguments");
    return std::sqrt(static_cast<double>(m1) / static_cast<double>(m2));
}

}  // namespace spinortheta
