#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinortheta/equivalence.hpp"
#include "spinortheta/form.hpp"
#include "spinortheta/local.hpp"
#include "spinortheta/reduce.hpp"
#include "spinortheta/theta.hpp"

namespace spinortheta {

struct NeighborSpec {
    std::int64_t p;
    Vec3 isotropic_line;  // primitive, Q = 0 mod p
};

struct GenusEdge {
    int from;
    int to;
    std::int64_t p;
    SquareClass label;  // square class of p at p
};

struct GenusCatalog {
    std::vector<TernaryForm> classes;  // reduced representatives, index 0 = input
    std::vector<std::int64_t> aut_orders;
    std::vector<GenusEdge> edges;
    Rational weight_sum;  // sum of 1/|O(Q_i)|
    std::vector<std::int64_t> primes_used;
    bool single_prime_warning = false;
};

namespace detail {

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    std::int64_t t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw std::logic_error("mod_inverse: not invertible");
    return ((t % p) + p) % p;
}

// Column-style Hermite reduction of integer generators to a lattice basis.
inline Mat3 lattice_basis(std::vector<Vec3> gens) {
    Mat3 basis{};
    int col = 0;
    for (int row = 0; row < 3; ++row) {
        // gcd-reduce all generators on this row into one pivot column
        while (true) {
            int nonzero = -1, second = -1;
            for (size_t c = 0; c < gens.size(); ++c) {
                if (gens[c][row] != 0) {
                    if (nonzero < 0)
                        nonzero = static_cast<int>(c);
                    else {
                        second = static_cast<int>(c);
                        break;
                    }
                }
            }
            if (second < 0) {
                if (nonzero >= 0) {
                    for (int r = 0; r < 3; ++r) basis.at(r, col) = gens[nonzero][r];
                    gens.erase(gens.begin() + nonzero);
                    ++col;
                }
                break;
            }
            // reduce the larger entry by the smaller
            int a = nonzero, b = second;
            if (std::llabs(gens[a][row]) > std::llabs(gens[b][row])) std::swap(a, b);
            std::int64_t q = gens[b][row] / gens[a][row];
            for (int r = 0; r < 3; ++r) gens[b][r] -= q * gens[a][r];
        }
    }
    if (col != 3) throw std::logic_error("lattice_basis: generators not full rank");
    return basis;
}

}  // namespace detail

// Kneser p-neighbors of F at an odd prime p coprime to the determinant: one
// neighbor per projective isotropic point of F mod p. Each neighbor is an
// integral form of the same determinant.
inline std::vector<std::pair<TernaryForm, NeighborSpec>> p_neighbors(const TernaryForm& f,
                                                                     std::int64_t p) {
    if (p == 2 || !detail::is_prime(p)) throw std::invalid_argument("p_neighbors: p must be an odd prime");
    if (f.doubled_gram().det() % p == 0)
        throw std::invalid_argument("p_neighbors: p must not divide 2*det");

    std::vector<std::pair<TernaryForm, NeighborSpec>> out;
    const Mat3& D = f.doubled_gram();

    std::vector<Vec3> points;  // canonical projective representatives
    for (std::int64_t b = 0; b < p; ++b)
        for (std::int64_t c = 0; c < p; ++c) points.push_back({1, b, c});
    for (std::int64_t c = 0; c < p; ++c) points.push_back({0, 1, c});
    points.push_back({0, 0, 1});

    for (const Vec3& x : points) {
        if (((f.evaluate(x) % p) + p) % p != 0) continue;

        // Lift so that Q(x') = 0 mod p^2: adjust along a coordinate where the
        // gradient is a unit.
        Vec3 xp = x;
        {
            std::int64_t q1 = f.evaluate(xp);
            if ((q1 / p) % p != 0 || q1 % (p * p) != 0) {
                Vec3 grad = f.gradient(xp);
                int i0 = -1;
                for (int i = 0; i < 3; ++i)
                    if (grad[i] % p != 0) {
                        i0 = i;
                        break;
                    }
                if (i0 < 0) throw std::logic_error("p_neighbors: singular isotropic point");
                std::int64_t c0 = ((-(q1 / p)) % p + p) % p;
                std::int64_t t = (c0 * detail::mod_inverse(grad[i0], p)) % p;
                xp[i0] += t * p;
            }
            if (f.evaluate(xp) % (p * p) != 0) throw std::logic_error("p_neighbors: lift failed");
        }

        // K = {z in L : 2B(x', z) = 0 mod p}, then pL' = pK + Z x'.
        Vec3 fn = f.gradient(xp);  // functional z -> 2B(x', z)
        int i0 = -1;
        for (int i = 0; i < 3; ++i)
            if (fn[i] % p != 0) {
                i0 = i;
                break;
            }
        if (i0 < 0) throw std::logic_error("p_neighbors: zero functional");
        std::int64_t inv = detail::mod_inverse(fn[i0], p);

        std::vector<Vec3> gens;
        gens.push_back(xp);
        {
            Vec3 g{};
            g[i0] = p * p;  // p * (p e_i0)
            gens.push_back(g);
        }
        for (int j = 0; j < 3; ++j) {
            if (j == i0) continue;
            std::int64_t c = ((fn[j] % p) * inv) % p;
            Vec3 g{};
            g[j] = p;
            g[i0] = -p * c;
            gens.push_back(g);
        }
        Mat3 h = detail::lattice_basis(std::move(gens));
        if (std::llabs(h.det()) != p * p * p) throw std::logic_error("p_neighbors: wrong index");

        Mat3 gram = h.transposed() * f.doubled_gram() * h;
        Mat3 scaled;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                if (gram.at(r, c) % (p * p) != 0) throw std::logic_error("p_neighbors: non-integral neighbor");
                scaled.at(r, c) = gram.at(r, c) / (p * p);
            }
        TernaryForm neighbor(scaled);
        if (neighbor.doubled_gram().det() != D.det()) throw std::logic_error("p_neighbors: determinant changed");
        out.emplace_back(neighbor, NeighborSpec{p, x});
    }
    return out;
}

inline std::vector<std::int64_t> default_traversal_primes(const TernaryForm& f) {
    std::vector<std::int64_t> primes;
    std::int64_t det_d = f.doubled_gram().det();
    for (std::int64_t p = 3; p <= 50; p += 2)
        if (detail::is_prime(p) && det_d % p != 0) primes.push_back(p);
    return primes;
}

// Breadth-first closure of p-neighbors over the given primes with dedup via
// reduce + is_equivalent. Deterministic for a fixed prime list.
inline GenusCatalog genus_enumerate(const TernaryForm& f, std::vector<std::int64_t> primes = {}) {
    if (primes.empty()) primes = default_traversal_primes(f);
    std::int64_t det_d = f.doubled_gram().det();
    for (auto p : primes)
        if (p == 2 || !detail::is_prime(p) || det_d % p == 0)
            throw std::invalid_argument("genus_enumerate: traversal primes must be odd and coprime to 2*det");

    GenusCatalog cat;
    cat.primes_used = primes;
    cat.single_prime_warning = primes.size() == 1;
    cat.classes.push_back(reduce(f).form);

    std::set<std::tuple<int, int, std::int64_t>> seen_edges;
    for (size_t i = 0; i < cat.classes.size(); ++i) {
        for (std::int64_t p : primes) {
            for (auto& [nbr, spec] : p_neighbors(cat.classes[i], p)) {
                TernaryForm red = reduce(nbr).form;
                int j = -1;
                for (size_t k = 0; k < cat.classes.size(); ++k) {
                    if (red == cat.classes[k] || is_equivalent(red, cat.classes[k])) {
                        j = static_cast<int>(k);
                        break;
                    }
                }
                if (j < 0) {
                    cat.classes.push_back(red);
                    j = static_cast<int>(cat.classes.size()) - 1;
                }
                auto key = std::make_tuple(std::min<int>(i, j), std::max<int>(i, j), p);
                if (seen_edges.insert(key).second)
                    cat.edges.push_back({static_cast<int>(i), j, p, square_class(p, Place::finite(p))});
            }
        }
    }

    cat.weight_sum = 0;
    for (const auto& cls : cat.classes) {
        std::int64_t order = static_cast<std::int64_t>(automorphism_group(cls).size());
        cat.aut_orders.push_back(order);
        cat.weight_sum += make_rational(1, order);
    }
    return cat;
}

// Index of the class equivalent to F, or an error.
inline int classify(const TernaryForm& f, const GenusCatalog& cat) {
    if (cat.classes.empty()) throw std::invalid_argument("classify: empty catalog");
    if (f.determinant() != cat.classes[0].determinant())
        throw std::runtime_error("classify: determinant mismatch, not in genus");
    for (size_t k = 0; k < cat.classes.size(); ++k)
        if (is_equivalent(f, cat.classes[k])) return static_cast<int>(k);
    throw std::runtime_error("classify: not in genus");
}

// Precomputed theta slices for every class, built in parallel.
struct GenusThetas {
    std::int64_t bound;
    std::vector<ThetaSlice> slices;
};

inline GenusThetas genus_thetas(const GenusCatalog& cat, std::int64_t bound) {
    GenusThetas gt{bound, {}};
    gt.slices.reserve(cat.classes.size());
    for (const auto& cls : cat.classes) gt.slices.push_back(theta_coefficients(cls, bound));
    return gt;
}

// Siegel's weighted genus average: sum_i r_{Q_i}(m) / |O(Q_i)| exactly.
inline Rational genus_weighted_average(const GenusCatalog& cat, std::int64_t m) {
    Rational s = 0;
    for (size_t i = 0; i < cat.classes.size(); ++i)
        s += make_rational(rep_number(cat.classes[i], m), cat.aut_orders[i]);
    return s;
}

inline Rational genus_weighted_average(const GenusCatalog& cat, const GenusThetas& gt,
                                       std::int64_t m) {
    Rational s = 0;
    for (size_t i = 0; i < cat.classes.size(); ++i)
        s += make_rational(gt.slices[i].r(m), cat.aut_orders[i]);
    return s;
}

}  // namespace spinortheta
