#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spinortheta/form.hpp"

namespace spinortheta::detail {

// Floating-point Cholesky data for Q(x) = sum_k q[k][k] (x_k + sum_{j>k} q[k][j] x_j)^2.
// Floats are only used to prune; every candidate is verified with integer
// arithmetic before it is reported.
struct Cholesky {
    double q[3][3];
};

inline Cholesky cholesky(const TernaryForm& f) {
    Cholesky c{};
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * static_cast<double>(f.doubled_gram().at(i, j));
    for (int k = 0; k < 3; ++k) {
        c.q[k][k] = a[k][k];
        for (int j = k + 1; j < 3; ++j) c.q[k][j] = a[k][j] / a[k][k];
        for (int i = k + 1; i < 3; ++i)
            for (int j = i; j < 3; ++j) a[i][j] -= a[k][i] * a[k][j] / a[k][k];
    }
    return c;
}

constexpr double kEnumMargin = 1e-9;  // relative widening of every interval

inline std::int64_t outer_coordinate_cap(const TernaryForm& f, std::int64_t bound) {
    if (bound <= 0) return 0;
    Cholesky c = cholesky(f);
    double r = std::sqrt(static_cast<double>(bound) / c.q[2][2]) * (1.0 + kEnumMargin);
    return static_cast<std::int64_t>(std::floor(r + kEnumMargin)) + 1;
}

// Visits one representative of every +- pair with 0 < Q(x) <= bound whose
// outer coordinate x2 lies in [z_lo, z_hi]. The canonical representative has
// its highest-index nonzero coordinate positive, so the plane x2 = 0 is
// restricted to x1 > 0 (and the line x2 = x1 = 0 to x0 > 0); partitioning the
// x2 range therefore partitions the canonical set. fn(x, value).
template <typename Fn>
void enumerate_canonical_range(const TernaryForm& f, std::int64_t bound, std::int64_t z_lo,
                               std::int64_t z_hi, Fn&& fn) {
    if (bound <= 0) return;
    Cholesky c = cholesky(f);
    const double B = static_cast<double>(bound) * (1.0 + kEnumMargin) + kEnumMargin;

    auto interval = [](double center, double radius, std::int64_t& lo, std::int64_t& hi) {
        lo = static_cast<std::int64_t>(std::ceil(center - radius - kEnumMargin));
        hi = static_cast<std::int64_t>(std::floor(center + radius + kEnumMargin));
    };

    std::int64_t z_min = std::max<std::int64_t>(0, z_lo);
    double rz = std::sqrt(B / c.q[2][2]);
    std::int64_t z_max = std::min<std::int64_t>(z_hi, static_cast<std::int64_t>(std::floor(rz + kEnumMargin)));
    for (std::int64_t x2 = z_min; x2 <= z_max; ++x2) {
        double t2 = B - c.q[2][2] * static_cast<double>(x2) * x2;
        if (t2 < 0) continue;
        double c1 = -c.q[1][2] * static_cast<double>(x2);
        std::int64_t lo1, hi1;
        interval(c1, std::sqrt(t2 / c.q[1][1]), lo1, hi1);
        if (x2 == 0) lo1 = std::max<std::int64_t>(lo1, 0);
        for (std::int64_t x1 = lo1; x1 <= hi1; ++x1) {
            double d1 = static_cast<double>(x1) - c1;
            double t1 = t2 - c.q[1][1] * d1 * d1;
            if (t1 < 0) continue;
            double c0 = -(c.q[0][1] * static_cast<double>(x1) + c.q[0][2] * static_cast<double>(x2));
            std::int64_t lo0, hi0;
            interval(c0, std::sqrt(t1 / c.q[0][0]), lo0, hi0);
            if (x2 == 0 && x1 == 0) lo0 = std::max<std::int64_t>(lo0, 1);
            for (std::int64_t x0 = lo0; x0 <= hi0; ++x0) {
                Vec3 x{x0, x1, x2};
                std::int64_t v = f.evaluate(x);
                if (v > 0 && v <= bound) fn(x, v);
            }
        }
    }
}

template <typename Fn>
void enumerate_canonical(const TernaryForm& f, std::int64_t bound, Fn&& fn) {
    enumerate_canonical_range(f, bound, 0, outer_coordinate_cap(f, bound), fn);
}

// All vectors (both signs) of exact value `target`, in deterministic order.
inline std::vector<Vec3> vectors_with_value(const TernaryForm& f, std::int64_t target) {
    std::vector<Vec3> out;
    if (target <= 0) return out;
    enumerate_canonical(f, target, [&](const Vec3& x, std::int64_t v) {
        if (v == target) {
            out.push_back(x);
            out.push_back(negated(x));
        }
    });
    return out;
}

}  // namespace spinortheta::detail
