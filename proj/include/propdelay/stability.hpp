#ifndef PROPDELAY_STABILITY_HPP
#define PROPDELAY_STABILITY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/series.hpp"
#include "propdelay/specfun.hpp"

namespace propdelay::stability {

/// Sufficient condition a + b < 0 for asymptotic stability of the zero
/// solution of y' = a y + b y(qt). A false result means "not concluded",
/// not "unstable".
inline bool pantograph_stable(const Scalar& a, const Scalar& b) { return a + b < Scalar(0); }

// Linearization at an equilibrium with the delay frozen at tau* = (1 - q) t0.
struct StabilityQuery {
  Scalar a;         // df/dy
  Scalar b;         // df/dy(t - tau)
  Scalar tau_star;  // >= 0
};

enum class RootMethod { sum_criterion, lambert_w, root_scan };
enum class Verdict { stable, unstable, inconclusive };

inline std::string_view to_string(RootMethod m) {
  switch (m) {
    case RootMethod::sum_criterion: return "sum-criterion";
    case RootMethod::lambert_w: return "lambert-w";
    case RootMethod::root_scan: return "root-scan";
  }
  return "?";
}

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct StabilityReport {
  bool stable = false;
  Verdict verdict = Verdict::inconclusive;
  RootMethod method = RootMethod::sum_criterion;
  std::optional<std::complex<double>> rightmost_root;
  double margin = 0.0;  // |Re lambda| of the rightmost root
  // grid spacing used by root-scan (zero for the other methods)
  double resolution_re = 0.0;
  double resolution_im = 0.0;
};

/// lambda - a - b e^{-lambda tau}
inline std::complex<double> characteristic(std::complex<double> lambda, double a, double b, double tau) {
  return lambda - a - b * std::exp(-lambda * tau);
}

inline double characteristic_residual(std::complex<double> lambda, double a, double b, double tau) {
  return std::abs(characteristic(lambda, a, b, tau));
}

inline constexpr double kRootResidualTolerance = 1e-9;

struct ScanOptions {
  std::size_t re_points = 400;
  std::size_t im_points = 400;
  int newton_iterations = 60;
};

namespace detail {

inline StabilityReport finish(StabilityReport r) {
  if (r.rightmost_root) {
    const double re = r.rightmost_root->real();
    r.stable = re < 0.0;
    r.verdict = r.stable ? Verdict::stable : Verdict::unstable;
    r.margin = std::abs(re);
  }
  return r;
}

inline std::optional<std::complex<double>> newton_polish(std::complex<double> z, double a, double b, double tau,
                                                         int iterations) {
  for (int i = 0; i < iterations; ++i) {
    const std::complex<double> e = std::exp(-z * tau);
    const std::complex<double> g = z - a - b * e;
    const std::complex<double> dg = 1.0 + b * tau * e;
    if (std::abs(dg) == 0.0) return std::nullopt;
    const std::complex<double> step = g / dg;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  if (characteristic_residual(z, a, b, tau) > 1e-11 * std::max(1.0, std::abs(z))) return std::nullopt;
  return z;
}

// Largest real r with r - a = |b| e^{-tau r}; every root has Re <= r.
inline double real_part_ceiling(double a, double b, double tau) {
  const double ab = std::abs(b);
  if (ab == 0.0) return a;
  auto h = [&](double r) { return r - a - ab * std::exp(-tau * r); };
  double lo = a;
  double hi = a + 1.0;
  while (h(hi) < 0.0) hi = a + 2.0 * (hi - a);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace detail

/// Rightmost root of lambda - a - b e^{-lambda tau*} by scanning |g| over a
/// rectangle of the upper half plane, taking local minima and polishing them
/// with Newton's method.
///
/// The rectangle is Re in [min(a - |b| - 1, a - 1/tau - 1), max(a + |b| + 1,
/// ceiling + 1/2)], Im in [0, 4 pi / tau], where the ceiling bounds the real
/// part of every root. The widening of the default a -/+ (|b| + 1) window keeps
/// real roots near a + W0(.)/tau inside it. This is a heuristic: when no
/// minimum polishes to a root the verdict is inconclusive.
inline StabilityReport char_root_scan(const StabilityQuery& query, const ScanOptions& opts = {}) {
  const double a = query.a.to_double();
  const double b = query.b.to_double();
  const double tau = query.tau_star.to_double();
  if (tau < 0.0) throw DomainError("tau* must be non-negative");
  if (tau == 0.0) throw DomainError("root scan needs tau* > 0");
  if (opts.re_points < 2 || opts.im_points < 2) throw DomainError("scan grid needs at least 2x2 points");

  const double re_lo = std::min(a - std::abs(b) - 1.0, a - 1.0 / tau - 1.0);
  const double re_hi = std::max(a + std::abs(b) + 1.0, detail::real_part_ceiling(a, b, tau) + 0.5);
  const double im_hi = 4.0 * std::numbers::pi / tau;
  const double dre = (re_hi - re_lo) / static_cast<double>(opts.re_points - 1);
  const double dim = im_hi / static_cast<double>(opts.im_points - 1);

  std::vector<double> modulus(opts.re_points * opts.im_points);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return modulus[i * opts.im_points + j]; };
  for (std::size_t i = 0; i < opts.re_points; ++i)
    for (std::size_t j = 0; j < opts.im_points; ++j)
      at(i, j) = characteristic_residual({re_lo + dre * static_cast<double>(i), dim * static_cast<double>(j)}, a, b, tau);

  std::vector<std::complex<double>> roots;
  for (std::size_t i = 0; i < opts.re_points; ++i) {
    for (std::size_t j = 0; j < opts.im_points; ++j) {
      const double v = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long ni = static_cast<long>(i) + di;
          const long nj = static_cast<long>(j) + dj;
          if (ni < 0 || nj < 0 || ni >= static_cast<long>(opts.re_points) || nj >= static_cast<long>(opts.im_points))
            continue;
          if (at(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj)) < v) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;
      auto root = detail::newton_polish({re_lo + dre * static_cast<double>(i), dim * static_cast<double>(j)}, a, b,
                                        tau, opts.newton_iterations);
      if (!root) continue;
      std::complex<double> z(root->real(), std::abs(root->imag()));
      if (z.imag() < 1e-12 * std::max(1.0, std::abs(z.real()))) z = {z.real(), 0.0};
      if (z.real() < re_lo - 1.0 || z.real() > re_hi + 1.0 || z.imag() > im_hi + 1.0) continue;
      roots.push_back(z);
    }
  }

  StabilityReport report;
  report.method = RootMethod::root_scan;
  report.resolution_re = dre;
  report.resolution_im = dim;
  if (roots.empty()) return report;
  auto best = std::max_element(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() > y.imag();
  });
  report.rightmost_root = *best;
  return detail::finish(report);
}

/// Rightmost characteristic root of lambda - a - b e^{-lambda tau*} = 0.
///
/// tau* = 0: the root is a + b. When b tau* e^{-a tau*} >= -1/e the root is
/// real, a + W0(b tau* e^{-a tau*}) / tau*. Otherwise it is complex and is
/// located by char_root_scan.
inline StabilityReport char_root_rightmost(const StabilityQuery& query, const ScanOptions& opts = {}) {
  if (query.tau_star < Scalar(0)) throw DomainError("tau* must be non-negative");
  const double a = query.a.to_double();
  const double b = query.b.to_double();
  const double tau = query.tau_star.to_double();

  StabilityReport report;
  if (query.tau_star.is_zero() || b == 0.0) {
    report.method = RootMethod::sum_criterion;
    report.rightmost_root = std::complex<double>((query.a + query.b).to_double(), 0.0);
    return detail::finish(report);
  }
  const double x = b * tau * std::exp(-a * tau);
  if (x >= -1.0 / std::numbers::e) {
    const std::complex<double> root(a + specfun::lambert_w0(x) / tau, 0.0);
    if (characteristic_residual(root, a, b, tau) <= kRootResidualTolerance * std::max(1.0, std::abs(root))) {
      report.method = RootMethod::lambert_w;
      report.rightmost_root = root;
      return detail::finish(report);
    }
  }
  return char_root_scan(query, opts);
}

enum class Envelope { decreasing, increasing, mixed, flat };

inline std::string_view to_string(Envelope e) {
  switch (e) {
    case Envelope::decreasing: return "decreasing";
    case Envelope::increasing: return "increasing";
    case Envelope::mixed: return "mixed";
    case Envelope::flat: return "flat";
  }
  return "?";
}

// Observational only: samples of a truncated series, not a stability proof.
struct DecayReport {
  Envelope trend = Envelope::flat;
  double initial_magnitude = 0.0;
  double final_magnitude = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, |y(t)|)
  bool observational = true;
};

/// Samples |y(t)| on [0, safe_frac * horizon] and classifies the trend.
/// Throws Unconverged if dropping the upper half of the coefficients changes
/// y(horizon) by 1e-12 * max(1, |y|) or more.
inline DecayReport decay_probe(const PowerSeries& series, double horizon, double safe_frac, std::size_t points = 101) {
  if (!(safe_frac > 0.0) || safe_frac > 1.0) throw DomainError("safe_frac must lie in (0, 1]");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (points < 2) throw DomainError("decay_probe needs at least two sample points");

  const double full = eval_double(series, horizon);
  const double half = eval_double(series.truncated(series.trunc() / 2), horizon);
  if (!std::isfinite(full) || std::abs(full - half) >= 1e-12 * std::max(1.0, std::abs(full)))
    throw Unconverged("series not converged at horizon " + format_double(horizon) + " (half/full terms differ by " +
                      format_double(std::abs(full - half)) + ")");

  DecayReport report;
  const double end = safe_frac * horizon;
  bool any_up = false, any_down = false;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = end * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = std::abs(eval_double(series, t));
    if (!report.samples.empty()) {
      const double prev = report.samples.back().second;
      any_up = any_up || v > prev;
      any_down = any_down || v < prev;
    }
    report.samples.emplace_back(t, v);
  }
  report.initial_magnitude = report.samples.front().second;
  report.final_magnitude = report.samples.back().second;
  if (any_up && any_down)
    report.trend = Envelope::mixed;
  else if (any_down)
    report.trend = Envelope::decreasing;
  else if (any_up)
    report.trend = Envelope::increasing;
  return report;
}

}  // namespace propdelay::stability

#endif  // PROPDELAY_STABILITY_HPP
