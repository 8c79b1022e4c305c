#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "spinortheta/detail/enumerate.hpp"
#include "spinortheta/form.hpp"
#include "spinortheta/parallel.hpp"

namespace spinortheta {

struct ShortVector {
    Vec3 x;
    std::int64_t value;
};

// One representative per +-pair of 0 < Q(x) <= bound (highest nonzero
// coordinate positive), via Fincke-Pohst intervals with exact verification.
inline std::vector<ShortVector> short_vectors(const TernaryForm& f, std::int64_t bound) {
    if (bound < 0) throw std::invalid_argument("short_vectors: bound must be >= 0");
    std::vector<ShortVector> out;
    detail::enumerate_canonical(f, bound,
                                [&](const Vec3& x, std::int64_t v) { out.push_back({x, v}); });
    return out;
}

// r_Q(m) = #{x in Z^3 : Q(x) = m}. Zero for m < 0, one for m = 0.
inline std::int64_t rep_number(const TernaryForm& f, std::int64_t m) {
    if (m < 0) return 0;
    if (m == 0) return 1;
    std::int64_t pairs = 0;
    detail::enumerate_canonical(f, m, [&](const Vec3&, std::int64_t v) {
        if (v == m) ++pairs;
    });
    return 2 * pairs;
}

// Sparse slice of theta coefficients m -> r_Q(m) for 0 <= m <= bound.
struct ThetaSlice {
    TernaryForm form;
    std::int64_t bound;
    std::map<std::int64_t, std::int64_t> coeffs;  // only nonzero entries

    std::int64_t r(std::int64_t m) const {
        if (m < 0) return 0;
        if (m > bound) throw std::out_of_range("ThetaSlice: m beyond computed bound");
        auto it = coeffs.find(m);
        return it == coeffs.end() ? 0 : it->second;
    }
};

// Single enumeration pass; the outer coordinate range is partitioned across
// workers and the partial counts merged by summation, so the result does not
// depend on the partitioning.
inline ThetaSlice theta_coefficients(const TernaryForm& f, std::int64_t bound) {
    if (bound < 0) throw std::invalid_argument("theta_coefficients: bound must be >= 0");
    ThetaSlice slice{f, bound, {}};
    slice.coeffs[0] = 1;
    if (bound == 0) return slice;

    std::int64_t z_cap = detail::outer_coordinate_cap(f, bound);
    int chunks = std::min<std::int64_t>(z_cap + 1, 4 * worker_count());
    if (chunks < 1) chunks = 1;
    std::vector<std::map<std::int64_t, std::int64_t>> partial(chunks);
    run_chunked(chunks, [&](int ci) {
        std::int64_t lo = z_cap * ci / chunks + (ci > 0 ? 1 : 0);
        std::int64_t hi = z_cap * (ci + 1) / chunks;
        if (ci == 0) lo = 0;
        detail::enumerate_canonical_range(f, bound, lo, hi, [&](const Vec3&, std::int64_t v) {
            partial[ci][v] += 2;
        });
    });
    for (const auto& part : partial)
        for (const auto& [m, r] : part) slice.coeffs[m] += r;
    return slice;
}

}  // namespace spinortheta
