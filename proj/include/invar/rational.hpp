#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace invar {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

std::string rational_to_string(const Rational& r);

// Parses "p", "-p", "p/q". Returns nullopt on malformed input or q == 0.
std::optional<Rational> rational_from_string(const std::string& s);

// Nearest rational with denominator <= max_den (continued fractions).
// Returns nullopt when no candidate lands within tol of x.
std::optional<Rational> rationalize(double x, long long max_den, double tol);

double to_double(const Rational& r);

}  // namespace invar
