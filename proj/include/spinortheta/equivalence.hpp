#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spinortheta/detail/enumerate.hpp"
#include "spinortheta/form.hpp"
#include "spinortheta/reduce.hpp"

namespace spinortheta {

namespace detail {

// Backtracking over images of the basis vectors: column k must be a vector of
// doubled norm target.at(k,k) with the cross inner products matching. Every
// complete match is an isometry from `from` to `to` automatically, since both
// forms are nondegenerate with equal determinant.
inline void isometry_search(const TernaryForm& from, const Mat3& target, bool collect_all,
                            std::vector<Mat3>& out) {
    std::vector<Vec3> cands[3];
    for (int k = 0; k < 3; ++k) {
        std::int64_t t = target.at(k, k);
        if (t <= 0 || t % 2 != 0) return;
        cands[k] = vectors_with_value(from, t / 2);
        if (cands[k].empty()) return;
    }
    Vec3 cols[3];
    auto dfs = [&](auto&& self, int k) -> bool {
        if (k == 3) {
            Mat3 w;
            for (int c = 0; c < 3; ++c)
                for (int r = 0; r < 3; ++r) w.at(r, c) = cols[c][r];
            out.push_back(w);
            return !collect_all;
        }
        for (const Vec3& v : cands[k]) {
            bool ok = true;
            for (int j = 0; j < k && ok; ++j)
                ok = from.inner_doubled(cols[j], v) == target.at(j, k);
            if (!ok) continue;
            cols[k] = v;
            if (self(self, k + 1)) return true;
        }
        return false;
    };
    dfs(dfs, 0);
}

}  // namespace detail

// A transform U with U^T F U = G when the forms are integrally equivalent.
inline std::optional<Mat3> is_equivalent(const TernaryForm& f, const TernaryForm& g) {
    if (f.doubled_gram().det() != g.doubled_gram().det()) return std::nullopt;
    ReductionResult rf = reduce(f);
    ReductionResult rg = reduce(g);
    if (rf.form == rg.form) {
        Mat3 w = rf.transform * rg.transform.inverse_unimodular();
        return w;
    }
    std::vector<Mat3> found;
    detail::isometry_search(rf.form, rg.form.doubled_gram(), false, found);
    if (found.empty()) return std::nullopt;
    // rf.form --w--> rg.form, conjugate back to the original bases.
    Mat3 w = rf.transform * found.front() * rg.transform.inverse_unimodular();
    return w;
}

// Full integral orthogonal group {U : U^T F U = F}; contains +-identity.
inline std::vector<Mat3> automorphism_group(const TernaryForm& f) {
    ReductionResult rf = reduce(f);
    std::vector<Mat3> reduced_auts;
    detail::isometry_search(rf.form, rf.form.doubled_gram(), true, reduced_auts);
    Mat3 u = rf.transform;
    Mat3 uinv = u.inverse_unimodular();
    std::vector<Mat3> out;
    out.reserve(reduced_auts.size());
    for (const Mat3& w : reduced_auts) out.push_back(u * w * uinv);
    return out;
}

}  // namespace spinortheta
