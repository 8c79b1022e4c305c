#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spinortheta/rational.hpp"

namespace spinortheta {

using Vec3 = std::array<std::int64_t, 3>;

inline Vec3 negated(const Vec3& v) { return {-v[0], -v[1], -v[2]}; }
inline bool is_zero(const Vec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

// 3x3 integer matrix, row major. Doubles as the witness type for integral
// equivalences (det = +-1 there).
struct Mat3 {
    std::array<std::int64_t, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }

    std::int64_t& at(int r, int c) { return m[3 * r + c]; }
    std::int64_t at(int r, int c) const { return m[3 * r + c]; }

    Mat3 transposed() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t.at(r, c) = at(c, r);
        return t;
    }

    Vec3 apply(const Vec3& v) const {
        Vec3 out{};
        for (int r = 0; r < 3; ++r)
            out[r] = at(r, 0) * v[0] + at(r, 1) * v[1] + at(r, 2) * v[2];
        return out;
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                __int128 s = 0;
                for (int k = 0; k < 3; ++k)
                    s += static_cast<__int128>(at(i, k)) * o.at(k, j);
                r.at(i, j) = static_cast<std::int64_t>(s);
            }
        return r;
    }

    std::int64_t det() const {
        __int128 d = static_cast<__int128>(at(0, 0)) * at(1, 1) * at(2, 2) +
                     static_cast<__int128>(at(0, 1)) * at(1, 2) * at(2, 0) +
                     static_cast<__int128>(at(0, 2)) * at(1, 0) * at(2, 1) -
                     static_cast<__int128>(at(0, 2)) * at(1, 1) * at(2, 0) -
                     static_cast<__int128>(at(0, 1)) * at(1, 0) * at(2, 2) -
                     static_cast<__int128>(at(0, 0)) * at(1, 2) * at(2, 1);
        return static_cast<std::int64_t>(d);
    }

    // Inverse of a det = +-1 matrix (integer adjugate divided by the det).
    Mat3 inverse_unimodular() const {
        std::int64_t d = det();
        if (d != 1 && d != -1) throw std::logic_error("inverse_unimodular: det is not a unit");
        Mat3 adj;
        auto cof = [&](int r, int c) {
            int r0 = (r + 1) % 3, r1 = (r + 2) % 3;
            int c0 = (c + 1) % 3, c1 = (c + 2) % 3;
            return at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
        };
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) adj.at(c, r) = d * cof(r, c);
        return adj;
    }

    bool operator==(const Mat3&) const = default;
};

// Integral ternary quadratic form held as its doubled Gram matrix D with
// D_ij = 2B(e_i,e_j), so D_ii = 2*(coefficient of x_i^2) and D_ij (i != j)
// equals the cross coefficient of x_i x_j. Keeping D integral keeps every
// matrix operation integral; halving happens only in determinant().
// Construction rejects anything that is not positive definite.
class TernaryForm {
  public:
    explicit TernaryForm(const Mat3& doubled_gram) : d_(doubled_gram) { validate(); }

    // Literal order "a b c d e f" = a x^2 + b y^2 + c z^2 + d xy + e xz + f yz.
    static TernaryForm from_coeffs(std::int64_t a, std::int64_t b, std::int64_t c,
                                   std::int64_t d = 0, std::int64_t e = 0, std::int64_t f = 0) {
        Mat3 g;
        g.m = {2 * a, d, e, d, 2 * b, f, e, f, 2 * c};
        return TernaryForm(g);
    }

    static TernaryForm parse(const std::string& literal) {
        std::istringstream in(literal);
        std::array<std::int64_t, 6> c{};
        for (auto& v : c) {
            if (!(in >> v)) throw std::invalid_argument("form literal needs six integers \"a b c d e f\"");
        }
        std::string rest;
        if (in >> rest) throw std::invalid_argument("form literal has trailing tokens");
        return from_coeffs(c[0], c[1], c[2], c[3], c[4], c[5]);
    }

    std::array<std::int64_t, 6> coeffs() const {
        return {d_.at(0, 0) / 2, d_.at(1, 1) / 2, d_.at(2, 2) / 2,
                d_.at(0, 1), d_.at(0, 2), d_.at(1, 2)};
    }

    std::string to_literal() const {
        auto c = coeffs();
        std::string s;
        for (int i = 0; i < 6; ++i) s += (i ? " " : "") + std::to_string(c[i]);
        return s;
    }

    const Mat3& doubled_gram() const { return d_; }

    std::int64_t evaluate(const Vec3& x) const {
        __int128 s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s += static_cast<__int128>(d_.at(i, j)) * x[i] * x[j];
        return static_cast<std::int64_t>(s / 2);
    }

    // 2B(x,y) = x^T D y, integral for all lattice vectors.
    std::int64_t inner_doubled(const Vec3& x, const Vec3& y) const {
        __int128 s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s += static_cast<__int128>(d_.at(i, j)) * x[i] * y[j];
        return static_cast<std::int64_t>(s);
    }

    // Gradient of Q at x, i.e. D x (the vector of 2B(x, e_i)).
    Vec3 gradient(const Vec3& x) const { return d_.apply(x); }

    // det(D/2) = det(D)/8, equal across a genus.
    Rational determinant() const {
        Rational q(Integer(d_.det()), Integer(8));
        q.canonicalize();
        return q;
    }

    bool operator==(const TernaryForm&) const = default;

  private:
    void validate() const {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (d_.at(i, j) != d_.at(j, i))
                    throw std::invalid_argument("doubled Gram matrix must be symmetric");
        for (int i = 0; i < 3; ++i)
            if (d_.at(i, i) % 2 != 0)
                throw std::invalid_argument("doubled Gram matrix needs an even diagonal");
        // Positive definiteness via leading principal minors.
        std::int64_t m1 = d_.at(0, 0);
        __int128 m2 = static_cast<__int128>(d_.at(0, 0)) * d_.at(1, 1) -
                      static_cast<__int128>(d_.at(0, 1)) * d_.at(0, 1);
        std::int64_t m3 = d_.det();
        if (m1 <= 0 || m2 <= 0 || m3 <= 0)
            throw std::invalid_argument("form must be positive definite");
    }

    Mat3 d_;
};

}  // namespace spinortheta
