#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace emeasure {

using Rational = boost::multiprecision::cpp_rational;

/// Extended non-negative scalar in [0, inf].
///
/// Finite values are exact rationals. Infinity is a distinct state, not a
/// large numeral. The arithmetic follows these conventions:
///
///   c / 0 = inf (c > 0)      0 / 0 = 0
///   c / inf = 0 (c finite)   inf / inf = 0
///   0 * inf = inf * 0 = 0
///
/// `inf / inf = 0` extends `c / inf = 0` to c = inf; it is what makes
/// threshold integrals agree with their least-hypothesis form when an
/// integrand takes the value inf.
class XValue {
 public:
  XValue() = default;
  XValue(std::int64_t n);  // NOLINT(google-explicit-constructor)
  explicit XValue(Rational r);
  XValue(std::int64_t num, std::int64_t den);

  static XValue infinity();
  static XValue zero() { return XValue(); }
  static XValue one() { return XValue(1); }

  /// Accepts "inf", integers, "p/q" and terminating decimals such as "97.5".
  static XValue parse(std::string_view text);

  bool is_inf() const noexcept { return inf_; }
  bool is_zero() const noexcept { return !inf_ && value_ == 0; }
  bool is_finite() const noexcept { return !inf_; }

  /// Finite value; throws for inf.
  const Rational& rational() const;

  /// Canonical exact rendering: "inf", "n" or "p/q".
  std::string str() const;
  /// Human rendering: exact decimal when the denominator allows it, else p/q.
  std::string pretty() const;
  double to_double() const;

  friend bool operator==(const XValue& a, const XValue& b);
  friend std::strong_ordering operator<=>(const XValue& a, const XValue& b);

  friend XValue operator+(const XValue& a, const XValue& b);
  friend XValue operator*(const XValue& a, const XValue& b);
  friend XValue operator/(const XValue& a, const XValue& b);

  XValue& operator+=(const XValue& o) { return *this = *this + o; }
  XValue& operator*=(const XValue& o) { return *this = *this * o; }

 private:
  bool inf_ = false;
  Rational value_ = 0;
};

/// 1 / v under the same conventions (1/0 = inf, 1/inf = 0).
XValue reciprocal(const XValue& v);

std::ostream& operator<<(std::ostream& os, const XValue& v);

/// Parses a finite non-negative rational ("3", "1/20", "0.05").
Rational parse_rational(std::string_view text);
std::string rational_str(const Rational& r);

}  // namespace emeasure
