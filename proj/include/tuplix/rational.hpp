#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tuplix {

/// Exact rational arithmetic. Arbitrary precision keeps long rewrite
/// chains and randomized oracles overflow-free.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Totalized inverse: 0^-1 = 0, otherwise the field inverse.
inline Rational total_inverse(const Rational& r) {
    if (r.is_zero()) return Rational(0);
    return Rational(1) / r;
}

inline std::string rational_str(const Rational& r) { return r.str(); }

}  // namespace tuplix
