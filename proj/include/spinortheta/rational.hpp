#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace spinortheta {

// All exact fractional arithmetic in the library runs on GMP rationals.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    Rational q{Integer(num), Integer(den)};
    q.canonicalize();
    return q;
}

// Serialized as an explicit "num/den" pair so reports stay exact.
inline std::string to_fraction_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace spinortheta
