#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "mgw/errors.hpp"

namespace mgw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// Extended-precision float used by the enumeration oracle when exact
// rational arithmetic is switched off.
using Quad = boost::multiprecision::cpp_bin_float_quad;

// Parses "a/b", a plain integer, or a finite decimal ("0.625") into an
// exact rational. Throws Errc::parse on anything else.
Rational parse_rational(const std::string& text);

// Canonical "num/den" form, denominator always present ("0/1", "4/1").
std::string to_fraction_string(const Rational& value);

inline double to_double(const Rational& value) {
  return value.convert_to<double>();
}

// Scalar adaptors so the series/moment templates can run over double,
// Rational, or Quad without sprinkling conversions at every call site.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double from_rational(const Rational& r) { return to_double(r); }
  static double from_int(long long v) { return static_cast<double>(v); }
  static double from_double(double v) { return v; }
  static double to_double_value(double v) { return v; }
};

template <>
struct ScalarOps<Rational> {
  static Rational from_rational(const Rational& r) { return r; }
  static Rational from_int(long long v) { return Rational(v); }
  // exact dyadic value of the double
  static Rational from_double(double v) { return Rational(v); }
  static double to_double_value(const Rational& v) { return to_double(v); }
};

template <>
struct ScalarOps<Quad> {
  static Quad from_rational(const Rational& r) {
    return Quad(numerator(r)) / Quad(denominator(r));
  }
  static Quad from_int(long long v) { return Quad(v); }
  static Quad from_double(double v) { return Quad(v); }
  static double to_double_value(const Quad& v) {
    return v.convert_to<double>();
  }
};

// Equality up to the precision the scalar can honestly promise: exact for
// rationals, solver-limited for floats.
template <class S>
bool close_enough(const S& a, const S& b);

template <>
inline bool close_enough<Rational>(const Rational& a, const Rational& b) {
  return a == b;
}

template <>
inline bool close_enough<double>(const double& a, const double& b) {
  double diff = a > b ? a - b : b - a;
  double scale = 1.0;
  if (a > scale) scale = a;
  if (-a > scale) scale = -a;
  return diff <= 1e-12 * scale;
}

template <>
inline bool close_enough<Quad>(const Quad& a, const Quad& b) {
  Quad diff = a > b ? a - b : b - a;
  Quad scale(1);
  if (a > scale) scale = a;
  if (-a > scale) scale = -a;
  return diff <= Quad(1e-12) * scale;
}

// base^e by squaring; e may be negative (requires invertible base).
template <class S>
S power_int(S base, long long e) {
  if (e < 0) {
    return S(1) / power_int(base, -e);
  }
  S result(1);
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

template <class S>
S factorial_of(int n) {
  S result(1);
  for (int i = 2; i <= n; ++i) result = result * S(i);
  return result;
}

// Exact binomial coefficient, small arguments only (n <= ~60 in practice).
std::uint64_t binomial_u64(unsigned n, unsigned k);

}  // namespace mgw
