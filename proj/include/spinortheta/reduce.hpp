#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>

#include "spinortheta/form.hpp"

namespace spinortheta {

struct ReductionResult {
    TernaryForm form;  // = transform^T * input * transform
    Mat3 transform;    // unimodular basis change, columns give the new basis
};

namespace detail {

// Basis change b_j <- b_j + q * b_i applied to (gram, transform).
inline void add_column(Mat3& d, Mat3& u, int i, int j, std::int64_t q) {
    for (int r = 0; r < 3; ++r) u.at(r, j) += q * u.at(r, i);
    for (int r = 0; r < 3; ++r) d.at(r, j) += q * d.at(r, i);
    for (int c = 0; c < 3; ++c) d.at(j, c) += q * d.at(i, c);
}

inline void swap_columns(Mat3& d, Mat3& u, int i, int j) {
    for (int r = 0; r < 3; ++r) std::swap(u.at(r, i), u.at(r, j));
    for (int r = 0; r < 3; ++r) std::swap(d.at(r, i), d.at(r, j));
    for (int c = 0; c < 3; ++c) std::swap(d.at(i, c), d.at(j, c));
}

inline void negate_column(Mat3& d, Mat3& u, int j) {
    for (int r = 0; r < 3; ++r) u.at(r, j) = -u.at(r, j);
    for (int r = 0; r < 3; ++r) d.at(r, j) = -d.at(r, j);
    for (int c = 0; c < 3; ++c) d.at(j, c) = -d.at(j, c);
}

// Nearest integer to n/d for d > 0, ties toward -inf; deterministic.
inline std::int64_t nearest_quotient(std::int64_t n, std::int64_t d) {
    std::int64_t q = n >= 0 ? (2 * n + d) / (2 * d) : -((-2 * n + d) / (2 * d));
    // fix up the tie and rounding direction exactly: minimize |n - q*d|
    while (std::llabs(n - (q + 1) * d) < std::llabs(n - q * d)) ++q;
    while (std::llabs(n - (q - 1) * d) < std::llabs(n - q * d)) --q;
    return q;
}

// Deterministic canonical tail: among the signed permutations that leave the
// diagonal ascending, prefer an off-diagonal triple (d01, d02, d12) whose
// first nonzero entry is nonnegative, then the lexicographically smallest one.
inline void canonical_signed_permutation(Mat3& d, Mat3& u) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    bool have_best = false;
    std::array<std::int64_t, 3> best{};
    int best_perm = 0, best_signs = 0;
    bool best_feasible = false;
    for (int pi = 0; pi < 6; ++pi) {
        const int* P = perms[pi];
        if (d.at(P[0], P[0]) > d.at(P[1], P[1]) || d.at(P[1], P[1]) > d.at(P[2], P[2])) continue;
        for (int s = 0; s < 8; ++s) {
            int sg[3] = {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1, (s & 4) ? -1 : 1};
            std::array<std::int64_t, 3> t = {
                static_cast<std::int64_t>(sg[0]) * sg[1] * d.at(P[0], P[1]),
                static_cast<std::int64_t>(sg[0]) * sg[2] * d.at(P[0], P[2]),
                static_cast<std::int64_t>(sg[1]) * sg[2] * d.at(P[1], P[2])};
            bool feasible = true;
            for (auto v : t) {
                if (v != 0) {
                    feasible = v > 0;
                    break;
                }
            }
            bool better;
            if (!have_best)
                better = true;
            else if (feasible != best_feasible)
                better = feasible;
            else
                better = t < best;
            if (better) {
                have_best = true;
                best = t;
                best_perm = pi;
                best_signs = s;
                best_feasible = feasible;
            }
        }
    }
    const int* P = perms[best_perm];
    Mat3 nd, nu;
    int sg[3] = {(best_signs & 1) ? -1 : 1, (best_signs & 2) ? -1 : 1, (best_signs & 4) ? -1 : 1};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            nd.at(r, c) = static_cast<std::int64_t>(sg[r]) * sg[c] * d.at(P[r], P[c]);
            nu.at(r, c) = sg[c] * u.at(r, P[c]);
        }
    d = nd;
    u = nu;
}

}  // namespace detail

// Greedy Lagrange-style reduction. The result has ascending diagonal and
// |D_ij| <= D_ii / 2 for i < j, followed by a deterministic signed-permutation
// normalization so equal inputs reduce to byte-identical outputs.
inline ReductionResult reduce(const TernaryForm& f) {
    Mat3 d = f.doubled_gram();
    Mat3 u = Mat3::identity();

    bool progress = true;
    while (progress) {
        progress = false;
        // Pairwise size reduction: b_j <- b_j - q b_i whenever it strictly
        // shortens b_j.
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                if (i == j) continue;
                std::int64_t q = detail::nearest_quotient(d.at(i, j), d.at(i, i));
                if (q == 0) continue;
                std::int64_t new_jj = d.at(j, j) - 2 * q * d.at(i, j) + q * q * d.at(i, i);
                if (new_jj < d.at(j, j)) {
                    detail::add_column(d, u, i, j, -q);
                    progress = true;
                }
            }
        if (progress) continue;
        // Two-step combinations b_j +- b_i +- b_k catch the short vectors the
        // pairwise pass misses in rank 3.
        for (int j = 0; j < 3 && !progress; ++j) {
            int i = (j + 1) % 3, k = (j + 2) % 3;
            for (int si = -1; si <= 1 && !progress; ++si)
                for (int sk = -1; sk <= 1 && !progress; ++sk) {
                    if (si == 0 && sk == 0) continue;
                    std::int64_t val = d.at(j, j) + si * si * d.at(i, i) + sk * sk * d.at(k, k) +
                                       2 * si * d.at(i, j) + 2 * sk * d.at(k, j) +
                                       2 * si * sk * d.at(i, k);
                    if (val < d.at(j, j)) {
                        if (si != 0) detail::add_column(d, u, i, j, si);
                        if (sk != 0) detail::add_column(d, u, k, j, sk);
                        progress = true;
                    }
                }
        }
    }

    detail::canonical_signed_permutation(d, u);
    return ReductionResult{TernaryForm(d), u};
}

}  // namespace spinortheta
