#ifndef PROPDELAY_CLOSEDFORM_HPP
#define PROPDELAY_CLOSEDFORM_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/series.hpp"

namespace propdelay::closedform {

// D^alpha y = a y + b y(qt), y(0) = y0
struct PantographParams {
  Scalar a;
  Scalar b;
  Scalar q;
  Scalar alpha = 1;
  Scalar y0 = 1;
};

// D^alpha y = -y + (1/q) y(t/q), y(0) = lambda, q > 1
struct AmbartsumianParams {
  Scalar q;
  Scalar alpha = 1;
  Scalar lambda = 1;
};

// Which of the two published Ambartsumian products to use. They agree at
// alpha = 1; the integer form is only defined there.
enum class AmbartsumianProduct {
  automatic,        // integer form at alpha = 1, fractional form otherwise
  integer_order,    // prod_{j=1}^{m} (q^-j - 1)
  fractional_order  // prod_{j=0}^{m-1} (q^-(1 + alpha j) - 1)
};

// Exponent convention for the pantograph system product.
enum class SystemExponent {
  scalar_consistent,  // A + B q^{+j alpha}; reduces to the scalar series at n = 1
  paper_literal       // A + B q^{-(k-j) alpha} as printed
};

class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n) : n_(n), entries_(n * n, Scalar(0)) {
    if (n == 0) throw DimError("matrix dimension must be positive");
  }

  explicit SquareMatrix(const std::vector<std::vector<Scalar>>& rows) : SquareMatrix(rows.size()) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (rows[i].size() != n_) throw DimError("matrix is not square");
      for (std::size_t j = 0; j < n_; ++j) entries_[i * n_ + j] = rows[i][j];
    }
  }

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
  }

  static SquareMatrix diagonal(const std::vector<Scalar>& d) {
    SquareMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t dim() const noexcept { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  friend SquareMatrix operator+(const SquareMatrix& x, const SquareMatrix& y) {
    check_dims(x, y);
    SquareMatrix out(x.n_);
    for (std::size_t k = 0; k < x.entries_.size(); ++k) out.entries_[k] = x.entries_[k] + y.entries_[k];
    return out;
  }

  friend SquareMatrix operator-(const SquareMatrix& x, const SquareMatrix& y) {
    check_dims(x, y);
    SquareMatrix out(x.n_);
    for (std::size_t k = 0; k < x.entries_.size(); ++k) out.entries_[k] = x.entries_[k] - y.entries_[k];
    return out;
  }

  friend SquareMatrix operator*(const Scalar& s, const SquareMatrix& x) {
    SquareMatrix out(x.n_);
    for (std::size_t k = 0; k < x.entries_.size(); ++k) out.entries_[k] = s * x.entries_[k];
    return out;
  }

  friend SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) {
    check_dims(x, y);
    SquareMatrix out(x.n_);
    for (std::size_t i = 0; i < x.n_; ++i)
      for (std::size_t k = 0; k < x.n_; ++k) {
        if (x(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < x.n_; ++j) out(i, j) += x(i, k) * y(k, j);
      }
    return out;
  }

  std::vector<Scalar> apply(const std::vector<Scalar>& v) const {
    if (v.size() != n_) throw DimError("matrix/vector dimension mismatch");
    std::vector<Scalar> out(n_, Scalar(0));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend bool operator==(const SquareMatrix& x, const SquareMatrix& y) { return x.n_ == y.n_ && x.entries_ == y.entries_; }

 private:
  static void check_dims(const SquareMatrix& x, const SquareMatrix& y) {
    if (x.n_ != y.n_) throw DimError("matrix dimension mismatch");
  }

  std::size_t n_;
  std::vector<Scalar> entries_;
};

namespace detail {

// q^{j alpha}: exact when alpha = 1 and q is rational.
inline Scalar grid_power(const Scalar& q, long j, const Scalar& alpha) {
  if (is_unit_order(alpha)) return pow(q, j);
  return Scalar(std::pow(q.to_double(), static_cast<double>(j) * alpha.to_double()));
}

inline void check_terms(std::size_t terms) {
  if (terms < 1) throw DomainError("need at least one term");
}

}  // namespace detail

/// Pantograph series: coefficient of t^{m alpha} is
/// y0 prod_{j<m} (a + b q^{alpha j}) / Gamma(m alpha + 1).
inline PowerSeries pantograph_series(const PantographParams& p, std::size_t terms) {
  detail::check_terms(terms);
  check_order(p.alpha);
  if (!(p.q > Scalar(0)) || !(p.q < Scalar(1))) throw DomainError("pantograph needs 0 < q < 1, got " + p.q.to_string());
  std::vector<Scalar> c(terms);
  c[0] = p.y0;
  for (std::size_t m = 1; m < terms; ++m) {
    const Scalar factor = p.a + p.b * detail::grid_power(p.q, static_cast<long>(m) - 1, p.alpha);
    c[m] = c[m - 1] * factor * ::propdelay::detail::grid_integral_weight(m - 1, p.alpha);
  }
  return PowerSeries(p.alpha, std::move(c));
}

/// Ambartsumian series: lambda prod(...) / Gamma(m alpha + 1) with the product
/// chosen by `form`.
inline PowerSeries ambartsumian_series(const AmbartsumianParams& p, std::size_t terms,
                                       AmbartsumianProduct form = AmbartsumianProduct::automatic) {
  detail::check_terms(terms);
  check_order(p.alpha);
  if (!(p.q > Scalar(1))) throw DomainError("Ambartsumian equation needs q > 1, got " + p.q.to_string());
  if (form == AmbartsumianProduct::automatic)
    form = is_unit_order(p.alpha) ? AmbartsumianProduct::integer_order : AmbartsumianProduct::fractional_order;
  if (form == AmbartsumianProduct::integer_order && !is_unit_order(p.alpha))
    throw DomainError("integer-order Ambartsumian product requires alpha = 1");
  std::vector<Scalar> c(terms);
  c[0] = p.lambda;
  for (std::size_t m = 1; m < terms; ++m) {
    // at alpha = 1 both forms give q^-m - 1 for the m-th factor
    Scalar factor;
    if (is_unit_order(p.alpha)) {
      factor = pow(p.q, -static_cast<long>(m)) - Scalar(1);
    } else {
      const double e = 1.0 + p.alpha.to_double() * static_cast<double>(m - 1);
      factor = Scalar(std::pow(p.q.to_double(), -e) - 1.0);
    }
    c[m] = c[m - 1] * factor * ::propdelay::detail::grid_integral_weight(m - 1, p.alpha);
  }
  return PowerSeries(p.alpha, std::move(c));
}

namespace detail {

inline VectorSeries apply_factor_chain(const Scalar& alpha, const std::vector<Scalar>& lambda, std::size_t terms,
                                       const auto& factor_for) {
  std::vector<std::vector<Scalar>> c;
  c.reserve(terms);
  c.push_back(lambda);
  for (std::size_t k = 1; k < terms; ++k) {
    // newest factor multiplies from the left
    std::vector<Scalar> next = factor_for(k).apply(c.back());
    const Scalar w = ::propdelay::detail::grid_integral_weight(k - 1, alpha);
    for (auto& x : next) x *= w;
    c.push_back(std::move(next));
  }
  return VectorSeries(alpha, std::move(c));
}

}  // namespace detail

/// Pantograph system D^alpha y = A y + B y(qt), y(0) = lambda. The k-th
/// coefficient is (A + B q^{(k-1)alpha}) ... (A + B) lambda / Gamma(k alpha + 1).
inline VectorSeries pantograph_system_series(const SquareMatrix& A, const SquareMatrix& B, const Scalar& q,
                                             const Scalar& alpha, const std::vector<Scalar>& lambda, std::size_t terms,
                                             SystemExponent exponent = SystemExponent::scalar_consistent) {
  detail::check_terms(terms);
  check_order(alpha);
  if (A.dim() != B.dim() || lambda.size() != A.dim()) throw DimError("pantograph system: A, B, lambda dimensions differ");
  if (!(q > Scalar(0)) || !(q < Scalar(1))) throw DomainError("pantograph system needs 0 < q < 1, got " + q.to_string());
  const long sign = exponent == SystemExponent::scalar_consistent ? 1 : -1;
  return detail::apply_factor_chain(alpha, lambda, terms, [&](std::size_t k) {
    return A + detail::grid_power(q, sign * (static_cast<long>(k) - 1), alpha) * B;
  });
}

/// Ambartsumian system D^alpha y = -y + B y(t/q), q > 1. The k-th coefficient
/// is (-I + B q^{-(k-1)alpha}) ... (-I + B q^{-alpha})(-I + B) lambda / Gamma(k alpha + 1).
inline VectorSeries ambartsumian_system_series(const SquareMatrix& B, const Scalar& q, const Scalar& alpha,
                                               const std::vector<Scalar>& lambda, std::size_t terms) {
  detail::check_terms(terms);
  check_order(alpha);
  if (lambda.size() != B.dim()) throw DimError("Ambartsumian system: B and lambda dimensions differ");
  if (!(q > Scalar(1))) throw DomainError("Ambartsumian system needs q > 1, got " + q.to_string());
  const SquareMatrix identity = SquareMatrix::identity(B.dim());
  return detail::apply_factor_chain(alpha, lambda, terms, [&](std::size_t k) {
    return detail::grid_power(q, -(static_cast<long>(k) - 1), alpha) * B - identity;
  });
}

struct SandwichRow {
  std::size_t m = 0;
  Scalar lower;    // a^m
  Scalar product;  // prod_{j<m} (a + b q^{alpha j})
  Scalar upper;    // (a + b)^m
  bool ok = true;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  std::optional<std::size_t> first_violation;

  bool passed() const { return !first_violation.has_value(); }
};

/// Coefficientwise check of a^m <= prod_{j<m} (a + b q^{alpha j}) <= (a + b)^m,
/// the series form of E_alpha(a t^alpha) <= y(t) <= E_alpha((a + b) t^alpha).
inline SandwichReport sandwich_check(const PantographParams& p, std::size_t terms) {
  check_order(p.alpha);
  if (p.a < Scalar(0) || p.b < Scalar(0)) throw DomainError("sandwich_check needs a, b >= 0");
  if (!(p.q > Scalar(0)) || !(p.q < Scalar(1))) throw DomainError("sandwich_check needs 0 < q < 1");
  SandwichReport report;
  Scalar lower(1), product(1), upper(1);
  const Scalar sum = p.a + p.b;
  for (std::size_t m = 0; m < terms; ++m) {
    if (m > 0) {
      lower *= p.a;
      product *= p.a + p.b * detail::grid_power(p.q, static_cast<long>(m) - 1, p.alpha);
      upper *= sum;
    }
    SandwichRow row{m, lower, product, upper, lower <= product && product <= upper};
    if (!row.ok && !report.first_violation) report.first_violation = m;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace propdelay::closedform

#endif  // PROPDELAY_CLOSEDFORM_HPP
