#ifndef PROPDELAY_SCALAR_HPP
#define PROPDELAY_SCALAR_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "propdelay/errors.hpp"

namespace propdelay {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace detail {

// num/den can be far outside the double range individually (factorials,
// powers of q) while the quotient is perfectly representable, so scale by
// bit length before dividing.
inline double rational_to_double(const Rational& r) {
  Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  if (negative) num = -num;
  const long shift = 64 - (static_cast<long>(boost::multiprecision::msb(num)) -
                           static_cast<long>(boost::multiprecision::msb(den)));
  Integer quotient = shift >= 0 ? Integer((num << shift) / den) : Integer(num / (den << -shift));
  double d = std::ldexp(quotient.convert_to<double>(), static_cast<int>(-shift));
  return negative ? -d : d;
}

// cpp_rational rejects negative denominators on construction
inline Rational make_rational(Integer num, Integer den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Integer v{std::string(s)};
  return negative ? Integer(-v) : v;
}

}  // namespace detail

// A coefficient: either an exact rational or a binary64 float.
//
// Arithmetic between two rationals stays rational; anything touching a float
// becomes a float. Rationals are always held in lowest terms with a positive
// denominator (cpp_rational normalizes on every operation).
class Scalar {
 public:
  Scalar() : value_(Rational(0)) {}
  template <std::integral I>
  Scalar(I v) : value_(Rational(static_cast<long long>(v))) {}  // NOLINT(google-explicit-constructor)
  template <std::floating_point F>
  Scalar(F v) : value_(static_cast<double>(v)) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational v) : value_(std::move(v)) {}      // NOLINT(google-explicit-constructor)
  Scalar(const Integer& v) : value_(Rational(v)) {}  // NOLINT(google-explicit-constructor)

  static Scalar ratio(long long num, long long den) {
    if (den == 0) throw DomainError("zero denominator");
    return Scalar(detail::make_rational(Integer(num), Integer(den)));
  }

  // Accepts "p/q", "p" (exact) or any decimal/scientific literal (float).
  static Scalar parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty numeric literal");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto num = text.substr(0, slash);
      auto den = text.substr(slash + 1);
      if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den))
        throw ParseError("malformed rational '" + std::string(text) + "'");
      Integer n = detail::parse_integer(num);
      Integer d = detail::parse_integer(den);
      if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
      return Scalar(detail::make_rational(std::move(n), std::move(d)));
    }
    if (detail::is_integer_literal(text)) return Scalar(detail::parse_integer(text));
    std::string_view body = text;
    if (body.front() == '+') body.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (res.ec != std::errc() || res.ptr != body.data() + body.size())
      throw ParseError("malformed number '" + std::string(text) + "'");
    return Scalar(v);
  }

  bool is_exact() const noexcept { return std::holds_alternative<Rational>(value_); }

  const Rational& rational() const {
    if (!is_exact()) throw DomainError("scalar is not an exact rational");
    return std::get<Rational>(value_);
  }

  double to_double() const {
    if (is_exact()) return detail::rational_to_double(std::get<Rational>(value_));
    return std::get<double>(value_);
  }

  // Float counterpart of this value; keeps floats as they are.
  Scalar as_float() const { return Scalar(to_double()); }

  bool is_zero() const {
    return is_exact() ? std::get<Rational>(value_) == 0 : std::get<double>(value_) == 0.0;
  }

  bool is_integer() const {
    if (is_exact()) return boost::multiprecision::denominator(std::get<Rational>(value_)) == 1;
    double d = std::get<double>(value_);
    return std::isfinite(d) && std::floor(d) == d;
  }

  int sign() const {
    if (is_exact()) return std::get<Rational>(value_).sign();
    double d = std::get<double>(value_);
    return (d > 0) - (d < 0);
  }

  std::string to_string() const {
    if (is_exact()) {
      const auto& r = std::get<Rational>(value_);
      if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
      return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
    }
    return format_double(std::get<double>(value_));
  }

  Scalar operator-() const {
    if (is_exact()) return Scalar(Rational(-std::get<Rational>(value_)));
    return Scalar(-std::get<double>(value_));
  }

  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend Scalar operator+(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return Scalar(Rational(x.rational() + y.rational()));
    return Scalar(x.to_double() + y.to_double());
  }
  friend Scalar operator-(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return Scalar(Rational(x.rational() - y.rational()));
    return Scalar(x.to_double() - y.to_double());
  }
  friend Scalar operator*(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return Scalar(Rational(x.rational() * y.rational()));
    return Scalar(x.to_double() * y.to_double());
  }
  friend Scalar operator/(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) {
      if (y.rational() == 0) throw DomainError("division by exact zero");
      return Scalar(Rational(x.rational() / y.rational()));
    }
    return Scalar(x.to_double() / y.to_double());
  }

  friend bool operator==(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return x.rational() == y.rational();
    return x.to_double() == y.to_double();
  }
  friend bool operator<(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return x.rational() < y.rational();
    return x.to_double() < y.to_double();
  }
  friend bool operator>(const Scalar& x, const Scalar& y) { return y < x; }
  friend bool operator<=(const Scalar& x, const Scalar& y) { return !(y < x); }
  friend bool operator>=(const Scalar& x, const Scalar& y) { return !(x < y); }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

 private:
  std::variant<Rational, double> value_;
};

inline Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

inline Scalar min(const Scalar& x, const Scalar& y) { return y < x ? y : x; }
inline Scalar max(const Scalar& x, const Scalar& y) { return x < y ? y : x; }

// Integer power; exact for rationals (negative exponents invert).
inline Scalar pow(const Scalar& base, long exponent) {
  if (!base.is_exact()) return Scalar(std::pow(base.to_double(), static_cast<double>(exponent)));
  if (exponent == 0) return Scalar(1);
  const Rational& r = base.rational();
  const unsigned n = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
  Integer num = boost::multiprecision::pow(boost::multiprecision::numerator(r), n);
  Integer den = boost::multiprecision::pow(boost::multiprecision::denominator(r), n);
  if (exponent < 0) {
    if (num == 0) throw DomainError("negative power of exact zero");
    std::swap(num, den);
  }
  return Scalar(detail::make_rational(std::move(num), std::move(den)));
}

// General power. Exact only when the exponent is an exact integer.
inline Scalar pow(const Scalar& base, const Scalar& exponent) {
  if (exponent.is_exact() && exponent.is_integer())
    return pow(base, boost::multiprecision::numerator(exponent.rational()).convert_to<long>());
  return Scalar(std::pow(base.to_double(), exponent.to_double()));
}

}  // namespace propdelay

#endif  // PROPDELAY_SCALAR_HPP
