#ifndef PROPDELAY_SERIES_HPP
#define PROPDELAY_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/specfun.hpp"

namespace propdelay {

inline void check_order(const Scalar& alpha) {
  if (!(alpha > Scalar(0)) || alpha > Scalar(1))
    throw DomainError("order alpha must lie in (0, 1], got " + alpha.to_string());
}

// True for alpha == 1 in either representation; integer-order series keep
// exact rational coefficients.
inline bool is_unit_order(const Scalar& alpha) { return alpha == Scalar(1); }

namespace detail {

inline bool all_exact(const std::vector<Scalar>& v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_exact(); });
}

inline void to_float_if_mixed(std::vector<Scalar>& v) {
  if (all_exact(v)) return;
  for (auto& s : v) s = s.as_float();
}

// Gamma(m alpha + 1): m! exactly at alpha = 1.
inline Scalar grid_gamma(std::size_t m, const Scalar& alpha) {
  if (is_unit_order(alpha)) {
    Integer f = 1;
    for (std::size_t i = 2; i <= m; ++i) f *= static_cast<unsigned long long>(i);
    return Scalar(f);
  }
  return Scalar(specfun::gamma(static_cast<double>(m) * alpha.to_double() + 1.0));
}

// Gamma(m alpha + 1) / Gamma((m + 1) alpha + 1): the monomial weight of I^alpha.
inline Scalar grid_integral_weight(std::size_t m, const Scalar& alpha) {
  if (is_unit_order(alpha)) return Scalar::ratio(1, static_cast<long long>(m) + 1);
  const double a = alpha.to_double();
  return Scalar(specfun::gamma_ratio(static_cast<double>(m) * a + 1.0, static_cast<double>(m + 1) * a + 1.0));
}

}  // namespace detail

// Truncated generalized power series sum_{m=0}^{N} c_m t^{m alpha}.
//
// All N + 1 coefficients are known; nothing beyond order N is implied. If any
// coefficient is a float the whole series is held in floats.
class PowerSeries {
 public:
  PowerSeries(Scalar alpha, std::vector<Scalar> coeffs) : alpha_(std::move(alpha)), coeffs_(std::move(coeffs)) {
    check_order(alpha_);
    if (coeffs_.empty()) throw DomainError("a power series needs at least the constant coefficient");
    detail::to_float_if_mixed(coeffs_);
  }

  static PowerSeries zero(Scalar alpha, std::size_t trunc) {
    return PowerSeries(std::move(alpha), std::vector<Scalar>(trunc + 1, Scalar(0)));
  }

  static PowerSeries constant(const Scalar& value, Scalar alpha, std::size_t trunc) {
    std::vector<Scalar> c(trunc + 1, value.is_exact() ? Scalar(0) : Scalar(0.0));
    c[0] = value;
    return PowerSeries(std::move(alpha), std::move(c));
  }

  // c t^{index alpha}; zero when index exceeds the truncation.
  static PowerSeries monomial(const Scalar& c, std::size_t index, Scalar alpha, std::size_t trunc) {
    std::vector<Scalar> v(trunc + 1, c.is_exact() ? Scalar(0) : Scalar(0.0));
    if (index <= trunc) v[index] = c;
    return PowerSeries(std::move(alpha), std::move(v));
  }

  const Scalar& alpha() const noexcept { return alpha_; }
  std::size_t trunc() const noexcept { return coeffs_.size() - 1; }
  const std::vector<Scalar>& coeffs() const noexcept { return coeffs_; }
  const Scalar& operator[](std::size_t m) const { return coeffs_.at(m); }

  bool integer_order() const { return is_unit_order(alpha_); }
  bool is_exact() const { return coeffs_.empty() || coeffs_.front().is_exact(); }

  PowerSeries truncated(std::size_t trunc) const {
    if (trunc >= this->trunc()) return *this;
    return PowerSeries(alpha_, std::vector<Scalar>(coeffs_.begin(), coeffs_.begin() + static_cast<long>(trunc) + 1));
  }

  friend bool operator==(const PowerSeries& x, const PowerSeries& y) {
    return x.alpha_ == y.alpha_ && x.coeffs_ == y.coeffs_;
  }

 private:
  Scalar alpha_;
  std::vector<Scalar> coeffs_;
};

namespace detail {

inline void require_same_grid(const Scalar& a, const Scalar& b, const char* op) {
  if (!(a == b))
    throw AlphaMismatch(std::string(op) + ": series live on different grids (alpha " + a.to_string() + " vs " +
                        b.to_string() + ")");
}

}  // namespace detail

inline PowerSeries add(const PowerSeries& p, const PowerSeries& r) {
  detail::require_same_grid(p.alpha(), r.alpha(), "add");
  const std::size_t n = std::min(p.trunc(), r.trunc());
  std::vector<Scalar> c(n + 1);
  for (std::size_t m = 0; m <= n; ++m) c[m] = p[m] + r[m];
  return PowerSeries(p.alpha(), std::move(c));
}

inline PowerSeries subtract(const PowerSeries& p, const PowerSeries& r) {
  detail::require_same_grid(p.alpha(), r.alpha(), "subtract");
  const std::size_t n = std::min(p.trunc(), r.trunc());
  std::vector<Scalar> c(n + 1);
  for (std::size_t m = 0; m <= n; ++m) c[m] = p[m] - r[m];
  return PowerSeries(p.alpha(), std::move(c));
}

inline PowerSeries scale(const PowerSeries& p, const Scalar& factor) {
  std::vector<Scalar> c(p.coeffs());
  for (auto& x : c) x *= factor;
  return PowerSeries(p.alpha(), std::move(c));
}

// Cauchy product on the m alpha grid, truncated at the smaller order.
inline PowerSeries mul(const PowerSeries& p, const PowerSeries& r) {
  detail::require_same_grid(p.alpha(), r.alpha(), "mul");
  const std::size_t n = std::min(p.trunc(), r.trunc());
  const bool exact = p.is_exact() && r.is_exact();
  if (!exact) {
    std::vector<double> acc(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      const double pi = p[i].to_double();
      if (pi == 0.0) continue;
      for (std::size_t j = 0; i + j <= n; ++j) acc[i + j] += pi * r[j].to_double();
    }
    return PowerSeries(p.alpha(), std::vector<Scalar>(acc.begin(), acc.end()));
  }
  std::vector<Rational> acc(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const Rational& pi = p[i].rational();
    if (pi == 0) continue;
    for (std::size_t j = 0; i + j <= n; ++j) {
      const Rational& rj = r[j].rational();
      if (rj != 0) acc[i + j] += pi * rj;
    }
  }
  return PowerSeries(p.alpha(), std::vector<Scalar>(acc.begin(), acc.end()));
}

inline PowerSeries operator+(const PowerSeries& p, const PowerSeries& r) { return add(p, r); }
inline PowerSeries operator-(const PowerSeries& p, const PowerSeries& r) { return subtract(p, r); }
inline PowerSeries operator*(const PowerSeries& p, const PowerSeries& r) { return mul(p, r); }

// p(q t): c_m -> c_m q^{m alpha}.
inline PowerSeries scale_argument(const PowerSeries& p, const Scalar& q) {
  if (!(q > Scalar(0))) throw DomainError("scale_argument requires q > 0, got " + q.to_string());
  std::vector<Scalar> c(p.coeffs());
  if (p.integer_order()) {
    Scalar qm(1);
    for (std::size_t m = 0; m < c.size(); ++m) {
      c[m] *= qm;
      qm *= q;
    }
  } else {
    const double qd = q.to_double();
    const double a = p.alpha().to_double();
    for (std::size_t m = 0; m < c.size(); ++m) c[m] = c[m].as_float() * Scalar(std::pow(qd, static_cast<double>(m) * a));
  }
  return PowerSeries(p.alpha(), std::move(c));
}

// Term-by-term integral from 0 for integer-order series; trunc grows by one.
inline PowerSeries integrate(const PowerSeries& p) {
  if (!p.integer_order())
    throw AlphaMismatch("integrate needs alpha = 1 (got " + p.alpha().to_string() + "); use frac_integrate");
  std::vector<Scalar> c(p.trunc() + 2, p.is_exact() ? Scalar(0) : Scalar(0.0));
  for (std::size_t m = 0; m <= p.trunc(); ++m) c[m + 1] = p[m] / Scalar(static_cast<long long>(m) + 1);
  return PowerSeries(p.alpha(), std::move(c));
}

// Riemann-Liouville integral of order alpha applied term by term:
// t^{m alpha} -> Gamma(m alpha + 1) / Gamma((m + 1) alpha + 1) t^{(m + 1) alpha}.
inline PowerSeries frac_integrate(const PowerSeries& p, const Scalar& alpha) {
  detail::require_same_grid(p.alpha(), alpha, "frac_integrate");
  if (is_unit_order(alpha)) return integrate(p);
  std::vector<Scalar> c(p.trunc() + 2, Scalar(0.0));
  for (std::size_t m = 0; m <= p.trunc(); ++m) c[m + 1] = p[m] * detail::grid_integral_weight(m, alpha);
  return PowerSeries(p.alpha(), std::move(c));
}

// Sum of c_m t^{m alpha} in increasing m. Exact when the series is
// integer-order and exact and t is rational; otherwise a float.
inline Scalar eval(const PowerSeries& p, const Scalar& t) {
  if (!p.integer_order() && t < Scalar(0))
    throw DomainError("fractional series cannot be evaluated at negative t = " + t.to_string());
  if (p.integer_order() && p.is_exact() && t.is_exact()) {
    Rational sum = 0;
    Rational tm = 1;
    const Rational& tr = t.rational();
    for (const auto& c : p.coeffs()) {
      sum += c.rational() * tm;
      tm *= tr;
    }
    return Scalar(sum);
  }
  const double td = t.to_double();
  double sum = 0.0;
  if (p.integer_order()) {
    double tm = 1.0;
    for (const auto& c : p.coeffs()) {
      sum += c.to_double() * tm;
      tm *= td;
    }
  } else {
    const double a = p.alpha().to_double();
    for (std::size_t m = 0; m <= p.trunc(); ++m) {
      const double tm = m == 0 ? 1.0 : std::pow(td, static_cast<double>(m) * a);
      sum += p[m].to_double() * tm;
    }
  }
  return Scalar(sum);
}

inline double eval_double(const PowerSeries& p, double t) { return eval(p, Scalar(t)).to_double(); }

// Coefficient index of the monomial t^power on the alpha grid, or throws if
// t^power is not a grid point.
inline std::size_t grid_index_of_power(unsigned power, const Scalar& alpha) {
  if (power == 0) return 0;
  const Scalar index = Scalar(power) / alpha;
  if (index.is_exact()) {
    if (!index.is_integer())
      throw AlphaMismatch("t^" + std::to_string(power) + " is not on the t^(m*" + alpha.to_string() + ") grid");
    return boost::multiprecision::numerator(index.rational()).convert_to<std::size_t>();
  }
  const double d = index.to_double();
  const double r = std::round(d);
  if (std::abs(d - r) > 1e-9 * std::max(1.0, r))
    throw AlphaMismatch("t^" + std::to_string(power) + " is not on the t^(m*" + alpha.to_string() + ") grid");
  return static_cast<std::size_t>(r);
}

// n-component series sharing one alpha and one truncation order.
class VectorSeries {
 public:
  // coeffs[m][i] multiplies t^{m alpha} in component i.
  VectorSeries(Scalar alpha, std::vector<std::vector<Scalar>> coeffs) : alpha_(std::move(alpha)), coeffs_(std::move(coeffs)) {
    check_order(alpha_);
    if (coeffs_.empty() || coeffs_.front().empty()) throw DimError("vector series needs dim >= 1 and one coefficient");
    const std::size_t n = coeffs_.front().size();
    bool exact = true;
    for (const auto& row : coeffs_) {
      if (row.size() != n) throw DimError("vector series coefficient rows differ in dimension");
      exact = exact && detail::all_exact(row);
    }
    if (!exact)
      for (auto& row : coeffs_)
        for (auto& s : row) s = s.as_float();
  }

  const Scalar& alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return coeffs_.front().size(); }
  std::size_t trunc() const noexcept { return coeffs_.size() - 1; }
  const std::vector<Scalar>& operator[](std::size_t m) const { return coeffs_.at(m); }
  const std::vector<std::vector<Scalar>>& coeffs() const noexcept { return coeffs_; }

  PowerSeries component(std::size_t i) const {
    if (i >= dim()) throw DimError("component index out of range");
    std::vector<Scalar> c;
    c.reserve(coeffs_.size());
    for (const auto& row : coeffs_) c.push_back(row[i]);
    return PowerSeries(alpha_, std::move(c));
  }

  friend bool operator==(const VectorSeries& x, const VectorSeries& y) {
    return x.alpha_ == y.alpha_ && x.coeffs_ == y.coeffs_;
  }

 private:
  Scalar alpha_;
  std::vector<std::vector<Scalar>> coeffs_;
};

}  // namespace propdelay

#endif  // PROPDELAY_SERIES_HPP
