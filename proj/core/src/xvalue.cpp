#include "emeasure/xvalue.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <ostream>
#include <sstream>

#include "emeasure/errors.hpp"

namespace emeasure {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::NotUnionClosed: return "NotUnionClosed";
    case ErrorCode::NotIntersectionClosed: return "NotIntersectionClosed";
    case ErrorCode::NotAPreorder: return "NotAPreorder";
    case ErrorCode::NotAnEFunction: return "NotAnEFunction";
    case ErrorCode::NotACapacity: return "NotACapacity";
    case ErrorCode::NotAMeasure: return "NotAMeasure";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotOrderMeasurable: return "NotOrderMeasurable";
    case ErrorCode::NotMeasurable: return "NotMeasurable";
    case ErrorCode::NotAdapted: return "NotAdapted";
    case ErrorCode::OrderMeasurabilityViolation: return "OrderMeasurabilityViolation";
    case ErrorCode::PhiFlagViolation: return "PhiFlagViolation";
  }
  return "Unknown";
}

namespace {

void require_non_negative(const Rational& r) {
  if (r < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "negative value " + rational_str(r) + " is outside [0, inf]");
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view raw) {
  const std::string text = trim(raw);
  auto bad = [&] {
    return Error(ErrorCode::InvalidArgument, "cannot parse '" + text + "' as a non-negative rational");
  };
  if (text.empty()) throw bad();
  std::string body = text;
  if (body.front() == '+') body.erase(0, 1);

  if (auto slash = body.find('/'); slash != std::string::npos) {
    const std::string num = trim(body.substr(0, slash));
    const std::string den = trim(body.substr(slash + 1));
    if (!all_digits(num) || !all_digits(den)) throw bad();
    boost::multiprecision::cpp_int d(den);
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator in '" + text + "'");
    return Rational(boost::multiprecision::cpp_int(num), d);
  }
  if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string whole = body.substr(0, dot);
    const std::string frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) throw bad();
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    boost::multiprecision::cpp_int num(whole + frac);
    return Rational(num, scale);
  }
  if (!all_digits(body)) throw bad();
  return Rational(boost::multiprecision::cpp_int(body));
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

XValue::XValue(std::int64_t n) : value_(n) { require_non_negative(value_); }

XValue::XValue(Rational r) : value_(std::move(r)) { require_non_negative(value_); }

XValue::XValue(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  value_ = Rational(num, den);
  require_non_negative(value_);
}

XValue XValue::infinity() {
  XValue v;
  v.inf_ = true;
  return v;
}

XValue XValue::parse(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "Inf" || t == "INF" || t == "infinity" || t == "\xE2\x88\x9E") {
    return infinity();
  }
  return XValue(parse_rational(t));
}

const Rational& XValue::rational() const {
  if (inf_) throw Error(ErrorCode::InvalidArgument, "infinite value has no rational representation");
  return value_;
}

std::string XValue::str() const { return inf_ ? "inf" : rational_str(value_); }

std::string XValue::pretty() const {
  if (inf_) return "inf";
  using boost::multiprecision::cpp_int;
  cpp_int den = boost::multiprecision::denominator(value_);
  cpp_int num = boost::multiprecision::numerator(value_);
  if (den == 1) return num.str();
  // Terminating decimal iff den has no prime factors besides 2 and 5.
  cpp_int rest = den;
  int twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return rational_str(value_);
  const int digits = std::max(twos, fives);
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const cpp_int scaled = num * (scale / den);
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return s;
}

double XValue::to_double() const {
  if (inf_) return std::numeric_limits<double>::infinity();
  return static_cast<double>(value_);
}

bool operator==(const XValue& a, const XValue& b) {
  if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const XValue& a, const XValue& b) {
  if (a.inf_ && b.inf_) return std::strong_ordering::equal;
  if (a.inf_) return std::strong_ordering::greater;
  if (b.inf_) return std::strong_ordering::less;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (a.value_ > b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

XValue operator+(const XValue& a, const XValue& b) {
  if (a.inf_ || b.inf_) return XValue::infinity();
  return XValue(a.value_ + b.value_);
}

XValue operator*(const XValue& a, const XValue& b) {
  if (a.is_zero() || b.is_zero()) return XValue();
  if (a.inf_ || b.inf_) return XValue::infinity();
  return XValue(a.value_ * b.value_);
}

XValue operator/(const XValue& a, const XValue& b) {
  if (a.is_zero()) return XValue();
  if (b.inf_) return XValue();
  if (b.is_zero() || a.inf_) return XValue::infinity();
  return XValue(a.value_ / b.value_);
}

XValue reciprocal(const XValue& v) { return XValue::one() / v; }

std::ostream& operator<<(std::ostream& os, const XValue& v) { return os << v.str(); }

}  // namespace emeasure
