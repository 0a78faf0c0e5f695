#ifndef PROPDELAY_SPECFUN_HPP
#define PROPDELAY_SPECFUN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"

namespace propdelay::specfun {

namespace detail {

// Godfrey's coefficients for the Lanczos approximation, g = 7, n = 9.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_gamma(double x) {
  // Gamma(x) for x >= 0.5
  x -= 1.0;
  double sum = lanczos_coeffs[0];
  for (std::size_t i = 1; i < lanczos_coeffs.size(); ++i) sum += lanczos_coeffs[i] / (x + static_cast<double>(i));
  const double t = x + lanczos_g + 0.5;
  // split the power so t^(x+0.5) does not overflow before e^-t brings it back
  const double half_power = std::pow(t, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_power * (half_power * std::exp(-t)) * sum;
}

}  // namespace detail

/// Gamma function by the Lanczos approximation, with the reflection formula
/// below 1/2. Relative error stays under 1e-13 on (0, 171].
inline double gamma(double x) {
  if (x <= 0.0 && std::floor(x) == x) throw PoleError("gamma pole at non-positive integer " + format_double(x));
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * detail::lanczos_gamma(1.0 - x));
  if (x <= 20.0) return detail::lanczos_gamma(x);
  // Lanczos loses ~x log x ulps through pow/exp; recur up from [10, 11) instead
  const double k = std::floor(x) - 10.0;
  double y = x - k;
  double g = detail::lanczos_gamma(y);
  for (double i = 0.0; i < k; ++i, ++y) g *= y;
  return g;
}

/// Gamma(x) / Gamma(y) for positive x, y; falls back to log-gamma when either
/// argument is past the double range of Gamma.
inline double gamma_ratio(double x, double y) {
  if (x < 171.0 && y < 171.0) return gamma(x) / gamma(y);
  return std::exp(std::lgamma(x) - std::lgamma(y));
}

struct MittagLefflerValue {
  double value = 0.0;
  bool converged = false;
};

namespace detail {

inline double mittag_leffler_term(double alpha, double t, std::size_t n) {
  if (n == 0) return 1.0;
  if (t == 0.0) return 0.0;
  const double arg = alpha * static_cast<double>(n) + 1.0;
  if (arg < 171.0) return std::pow(t, static_cast<double>(n)) / gamma(arg);
  const double magnitude = std::exp(static_cast<double>(n) * std::log(std::abs(t)) - std::lgamma(arg));
  return (t < 0.0 && n % 2 == 1) ? -magnitude : magnitude;
}

inline double mittag_leffler_sum(double alpha, double t, std::size_t terms) {
  double sum = 0.0;
  for (std::size_t n = 0; n < terms; ++n) sum += mittag_leffler_term(alpha, t, n);
  return sum;
}

}  // namespace detail

/// One-parameter Mittag-Leffler function E_alpha(t) by direct truncated
/// summation of t^n / Gamma(alpha n + 1), n < terms.
///
/// `converged` is set when doubling the number of terms moves the result by
/// less than 1e-12 * max(1, |E|). Direct summation loses accuracy to
/// cancellation for large negative t; it is intended for |t| up to about 10.
inline MittagLefflerValue mittag_leffler(double alpha, double t, std::size_t terms) {
  if (!(alpha > 0.0)) throw DomainError("Mittag-Leffler order must be positive");
  if (terms == 0) throw DomainError("Mittag-Leffler needs at least one term");
  MittagLefflerValue out;
  out.value = detail::mittag_leffler_sum(alpha, t, terms);
  double doubled = out.value;
  for (std::size_t n = terms; n < 2 * terms; ++n) doubled += detail::mittag_leffler_term(alpha, t, n);
  out.converged = std::abs(doubled - out.value) < 1e-12 * std::max(1.0, std::abs(out.value));
  return out;
}

/// Non-negative parts l_1..l_n of a multinomial; order() is their sum k.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<unsigned> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw DimError("multi-index needs at least one part");
  }
  MultiIndex(unsigned order, std::vector<unsigned> parts) : MultiIndex(std::move(parts)) {
    if (this->order() != order) throw DomainError("multi-index parts do not sum to its order");
  }

  unsigned order() const { return std::accumulate(parts_.begin(), parts_.end(), 0u); }
  std::span<const unsigned> parts() const { return parts_; }

 private:
  std::vector<unsigned> parts_;
};

/// k! / (l_1! ... l_n!), exact.
inline Integer multinomial(const MultiIndex& idx) {
  // product of binomials C(l_1 + ... + l_i, l_i): every partial result is an integer
  Integer result = 1;
  unsigned running = 0;
  for (unsigned part : idx.parts()) {
    for (unsigned i = 1; i <= part; ++i) {
      ++running;
      result *= running;
      result /= i;
    }
  }
  return result;
}

namespace detail {

inline void for_each_composition(unsigned total, std::size_t slots, std::vector<unsigned>& parts, std::size_t at,
                                 const std::function<void(const std::vector<unsigned>&)>& visit) {
  if (at + 1 == slots) {
    parts[at] = total;
    visit(parts);
    return;
  }
  for (unsigned l = 0; l <= total; ++l) {
    parts[at] = l;
    for_each_composition(total - l, slots, parts, at + 1, visit);
  }
}

}  // namespace detail

/// Multi-parameter Mittag-Leffler function truncated at total degree kmax.
inline double multi_mittag_leffler(std::span<const double> alphas, double beta, std::span<const double> z,
                                   std::size_t kmax) {
  if (alphas.size() != z.size() || alphas.empty())
    throw DimError("multi_mittag_leffler: alphas and z must have the same non-zero length");
  for (double a : alphas)
    if (!(a > 0.0)) throw DomainError("multi_mittag_leffler: orders must be positive");
  const std::size_t n = alphas.size();
  double sum = 0.0;
  std::vector<unsigned> parts(n, 0);
  for (std::size_t k = 0; k <= kmax; ++k) {
    detail::for_each_composition(static_cast<unsigned>(k), n, parts, 0, [&](const std::vector<unsigned>& l) {
      double numerator = multinomial(MultiIndex(l)).convert_to<double>();
      double shift = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        numerator *= std::pow(z[j], static_cast<double>(l[j]));
        shift += alphas[j] * static_cast<double>(l[j]);
      }
      if (numerator != 0.0) sum += numerator / gamma(beta + shift);
    });
  }
  return sum;
}

/// Principal branch W0 of the Lambert W function (w e^w = x) for x >= -1/e,
/// by damped Newton iteration.
inline double lambert_w0(double x) {
  constexpr double inv_e = 1.0 / std::numbers::e;
  if (std::isnan(x) || x < -inv_e) throw DomainError("lambert_w0 requires x >= -1/e, got " + format_double(x));
  if (x == 0.0) return 0.0;
  if (x == -inv_e) return -1.0;

  double w;
  if (x < -0.25) {
    // branch-point expansion in p = sqrt(2(ex + 1))
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  if (x > std::numbers::e) {
    // w + ln w = ln x is far better conditioned than w e^w = x for large x
    const double target = std::log(x);
    for (int iter = 0; iter < 100; ++iter) {
      const double f = w + std::log(w) - target;
      const double step = f / (1.0 + 1.0 / w);
      double next = w - step;
      if (next <= 0.0) next = 0.5 * w;
      const bool done = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next);
      w = next;
      if (done) break;
    }
    return w;
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double fp = ew * (w + 1.0);
    if (fp == 0.0) break;
    double step = f / fp;
    double next = w - step;
    // damp steps that would jump past the branch point
    while (next < -1.0) {
      step *= 0.5;
      next = w - step;
    }
    const bool done = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(next));
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace propdelay::specfun

#endif  // PROPDELAY_SPECFUN_HPP
