#ifndef PROPDELAY_SAM_HPP
#define PROPDELAY_SAM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/series.hpp"
#include "propdelay/specfun.hpp"

namespace propdelay::sam {

// c * t^t_power * y^y_power * y(qt)^yq_power
struct RhsTerm {
  Scalar coeff;
  unsigned t_power = 0;
  unsigned y_power = 0;
  unsigned yq_power = 0;
};

// Polynomial right-hand side f(t, y(t), y(qt)) with delay factor 0 < q < 1.
// Terms are kept normalized: sorted by (t, y, yq) powers, duplicates merged,
// zero coefficients dropped.
class PolyRHS {
 public:
  PolyRHS(std::vector<RhsTerm> terms, Scalar q) : q_(std::move(q)) {
    if (!(q_ > Scalar(0)) || !(q_ < Scalar(1)))
      throw DomainError("delay factor q must lie in (0, 1), got " + q_.to_string());
    std::map<std::tuple<unsigned, unsigned, unsigned>, Scalar> merged;
    for (auto& term : terms) {
      auto key = std::make_tuple(term.t_power, term.y_power, term.yq_power);
      auto [it, inserted] = merged.try_emplace(key, term.coeff);
      if (!inserted) it->second += term.coeff;
    }
    for (auto& [key, coeff] : merged) {
      if (coeff.is_zero()) continue;
      terms_.push_back(RhsTerm{coeff, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    }
  }

  // a y + b y(qt)
  static PolyRHS linear(const Scalar& a, const Scalar& b, const Scalar& q) {
    return PolyRHS({RhsTerm{a, 0, 1, 0}, RhsTerm{b, 0, 0, 1}}, q);
  }

  const std::vector<RhsTerm>& terms() const noexcept { return terms_; }
  const Scalar& q() const noexcept { return q_; }

  Scalar operator()(const Scalar& t, const Scalar& y, const Scalar& yq) const {
    Scalar sum(0);
    for (const auto& term : terms_)
      sum += term.coeff * pow(t, static_cast<long>(term.t_power)) * pow(y, static_cast<long>(term.y_power)) *
             pow(yq, static_cast<long>(term.yq_power));
    return sum;
  }

 private:
  std::vector<RhsTerm> terms_;
  Scalar q_;
};

// D^alpha y = f(t, y, y(qt)), y(0) = y0 (Caputo; alpha = 1 is the ordinary
// derivative). Iterates are truncated at order `trunc`; at most `iters`
// Picard steps are taken.
struct ProblemSpec {
  PolyRHS rhs;
  Scalar alpha = 1;
  Scalar y0 = 0;
  std::size_t trunc = 1;
  std::size_t iters = 1;

  void validate() const {
    check_order(alpha);
    if (trunc < 1) throw DomainError("trunc must be at least 1");
    if (iters < 1) throw DomainError("iters must be at least 1");
  }
};

// |t| <= t_radius, |y_i - y0_i| <= y_radius[i]. Scalar problems use one radius.
struct Rectangle {
  Scalar t_radius;
  std::vector<Scalar> y_radius;

  Rectangle(Scalar a, Scalar b) : t_radius(std::move(a)), y_radius{std::move(b)} { validate(); }
  Rectangle(Scalar a, std::vector<Scalar> b) : t_radius(std::move(a)), y_radius(std::move(b)) { validate(); }

  const Scalar& b() const { return y_radius.front(); }

 private:
  void validate() const {
    if (!(t_radius > Scalar(0))) throw DomainError("rectangle t radius must be positive");
    if (y_radius.empty()) throw DimError("rectangle needs at least one y radius");
    for (const auto& r : y_radius)
      if (!(r > Scalar(0))) throw DomainError("rectangle y radius must be positive");
  }
};

struct BoundsReport {
  Scalar M;
  Scalar L1;
  Scalar L2;
  Scalar zeta;
  // the |phi_n - phi_{n-1}| bound is only proven for alpha = 1
  bool bound_extrapolated = false;
};

struct SolveResult {
  PowerSeries series;
  std::size_t iterations_used = 0;
  bool stabilized = false;
};

struct ResidualReport {
  bool clean = true;
  Scalar max_abs;
  std::optional<std::size_t> first_nonzero_order;
};

namespace detail {

inline PowerSeries power_of(const PowerSeries& base, unsigned exponent, std::vector<PowerSeries>& cache) {
  if (cache.empty()) cache.push_back(PowerSeries::constant(Scalar(1), base.alpha(), base.trunc()));
  while (cache.size() <= exponent) cache.push_back(mul(cache.back(), base));
  return cache[exponent];
}

// Per-coefficient stabilization test: exact equality for rationals, relative
// 1e-13 with an absolute floor of 1e-300 for floats.
inline bool coefficient_equal(const Scalar& x, const Scalar& y, double rel_tol) {
  if (x.is_exact() && y.is_exact()) return x == y;
  const double a = x.to_double();
  const double b = y.to_double();
  const double diff = std::abs(a - b);
  return diff <= 1e-300 || diff <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

// f(t, phi(t), phi(q t)) as a series on phi's grid and truncation.
inline PowerSeries rhs_on_series(const PolyRHS& rhs, const PowerSeries& phi) {
  const std::size_t n = phi.trunc();
  PowerSeries total = PowerSeries::zero(phi.alpha(), n);
  const PowerSeries delayed = scale_argument(phi, rhs.q());
  std::vector<PowerSeries> y_powers;
  std::vector<PowerSeries> yq_powers;
  for (const auto& term : rhs.terms()) {
    const std::size_t index = grid_index_of_power(term.t_power, phi.alpha());
    if (index > n) continue;
    PowerSeries piece = PowerSeries::monomial(term.coeff, index, phi.alpha(), n);
    if (term.y_power > 0) piece = mul(piece, detail::power_of(phi, term.y_power, y_powers));
    if (term.yq_power > 0) piece = mul(piece, detail::power_of(delayed, term.yq_power, yq_powers));
    total = add(total, piece);
  }
  return total;
}

inline PowerSeries initial_iterate(const ProblemSpec& spec) {
  return PowerSeries::constant(spec.y0, spec.alpha, spec.trunc);
}

// phi -> y0 + I^alpha f(., phi(.), phi(q .)), truncated at spec.trunc.
inline PowerSeries picard_step(const PowerSeries& phi, const ProblemSpec& spec) {
  ::propdelay::detail::require_same_grid(phi.alpha(), spec.alpha, "picard_step");
  const PowerSeries integrated = frac_integrate(rhs_on_series(spec.rhs, phi), spec.alpha);
  const PowerSeries start = PowerSeries::constant(spec.y0, spec.alpha, integrated.trunc());
  return add(start, integrated).truncated(spec.trunc);
}

// phi_0 = y0, phi_1, ..., phi_count.
inline std::vector<PowerSeries> picard_iterates(const ProblemSpec& spec, std::size_t count) {
  spec.validate();
  std::vector<PowerSeries> out{initial_iterate(spec)};
  out.reserve(count + 1);
  for (std::size_t k = 0; k < count; ++k) out.push_back(picard_step(out.back(), spec));
  return out;
}

inline bool same_through(const PowerSeries& x, const PowerSeries& y, std::size_t order, double rel_tol = 1e-13) {
  for (std::size_t m = 0; m <= order; ++m)
    if (!detail::coefficient_equal(x[m], y[m], rel_tol)) return false;
  return true;
}

// Picard iteration from phi_0 = y0 until two consecutive iterates agree on
// orders 0..trunc or spec.iters steps have been taken.
inline SolveResult solve(const ProblemSpec& spec) {
  spec.validate();
  PowerSeries phi = initial_iterate(spec);
  for (std::size_t k = 1; k <= spec.iters; ++k) {
    PowerSeries next = picard_step(phi, spec);
    const bool stable = same_through(next, phi, spec.trunc);
    phi = std::move(next);
    if (stable) return SolveResult{std::move(phi), k, true};
  }
  return SolveResult{std::move(phi), spec.iters, false};
}

namespace detail {

inline Scalar abs_sum_bound(const PolyRHS& rhs, const Scalar& y0, const Rectangle& rect, int which) {
  // which: 0 -> f itself, 1 -> d/dy, 2 -> d/dyq
  const Scalar ybound = abs(y0) + rect.b();
  Scalar total(0);
  for (const auto& term : rhs.terms()) {
    long jy = term.y_power;
    long jq = term.yq_power;
    Scalar mult(1);
    if (which == 1) {
      if (jy == 0) continue;
      mult = Scalar(jy);
      --jy;
    } else if (which == 2) {
      if (jq == 0) continue;
      mult = Scalar(jq);
      --jq;
    }
    total += abs(term.coeff) * mult * pow(rect.t_radius, static_cast<long>(term.t_power)) * pow(ybound, jy + jq);
  }
  return total;
}

}  // namespace detail

/// Triangle-inequality bound M >= sup |f| over the rectangle:
/// sum |c| a^i (|y0| + b)^(j + k).
inline Scalar sup_bound_M(const PolyRHS& rhs, const Scalar& y0, const Rectangle& rect) {
  return detail::abs_sum_bound(rhs, y0, rect, 0);
}

struct LipschitzConstants {
  Scalar L1;  // in y(t)
  Scalar L2;  // in y(qt)
};

/// Bounds of |df/dy| and |df/dyq| over the rectangle, term by term.
inline LipschitzConstants lipschitz_constants(const PolyRHS& rhs, const Scalar& y0, const Rectangle& rect) {
  return {detail::abs_sum_bound(rhs, y0, rect, 1), detail::abs_sum_bound(rhs, y0, rect, 2)};
}

namespace detail {

inline Scalar fractional_radius(const Scalar& M, const Scalar& b, const Scalar& alpha) {
  if (is_unit_order(alpha)) return b / M;
  const double a = alpha.to_double();
  return Scalar(std::pow(specfun::gamma(a + 1.0) * b.to_double() / M.to_double(), 1.0 / a));
}

}  // namespace detail

/// Radius of the interval on which the iterates stay inside the rectangle:
/// min{a, b/M} at alpha = 1, min{a, (Gamma(alpha+1) b / M)^(1/alpha)} otherwise.
inline Scalar existence_interval(const Scalar& M, const Rectangle& rect, const Scalar& alpha) {
  check_order(alpha);
  if (M < Scalar(0)) throw DomainError("M must be non-negative");
  if (M.is_zero()) return rect.t_radius;
  return min(rect.t_radius, detail::fractional_radius(M, rect.b(), alpha));
}

/// Componentwise version for systems: one (b_i, alpha_i) pair per equation.
inline Scalar system_existence_interval(const Scalar& M, const Rectangle& rect, std::span<const Scalar> alphas) {
  if (alphas.size() != rect.y_radius.size()) throw DimError("need one order per rectangle component");
  if (M < Scalar(0)) throw DomainError("M must be non-negative");
  for (const auto& a : alphas) check_order(a);
  if (M.is_zero()) return rect.t_radius;
  Scalar zeta = rect.t_radius;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    zeta = min(zeta, detail::fractional_radius(M, rect.y_radius[i], alphas[i]));
  return zeta;
}

/// True when convergence_bound is the fractional analog rather than the
/// proven integer-order estimate.
inline bool convergence_bound_extrapolated(const Scalar& alpha) { return !is_unit_order(alpha); }

/// Bound on |phi_n(t) - phi_{n-1}(t)|: M (L1 + L2)^(n-1) |t|^n / n! at
/// alpha = 1, and M (L1 + L2)^(n-1) |t|^(n alpha) / Gamma(n alpha + 1) otherwise.
inline Scalar convergence_bound(const Scalar& M, const Scalar& L1, const Scalar& L2, std::size_t n, const Scalar& t,
                                const Scalar& alpha) {
  if (n < 1) throw DomainError("convergence_bound needs n >= 1");
  check_order(alpha);
  const Scalar lead = M * pow(L1 + L2, static_cast<long>(n) - 1);
  if (is_unit_order(alpha)) return lead * pow(abs(t), static_cast<long>(n)) / ::propdelay::detail::grid_gamma(n, alpha);
  const double na = static_cast<double>(n) * alpha.to_double();
  return lead * Scalar(std::pow(std::abs(t.to_double()), na) / specfun::gamma(na + 1.0));
}

inline BoundsReport bounds_report(const ProblemSpec& spec, const Rectangle& rect) {
  BoundsReport out;
  out.M = sup_bound_M(spec.rhs, spec.y0, rect);
  auto [l1, l2] = lipschitz_constants(spec.rhs, spec.y0, rect);
  out.L1 = l1;
  out.L2 = l2;
  out.zeta = existence_interval(out.M, rect, spec.alpha);
  out.bound_extrapolated = convergence_bound_extrapolated(spec.alpha);
  return out;
}

/// r = y - y0 - I^alpha f(., y(.), y(q .)) through order min(spec.trunc,
/// y.trunc). Float coefficients count as zero below rel_tol relative to the
/// larger of the two sides (absolute floor 1e-300).
inline ResidualReport residual_check(const PowerSeries& y, const ProblemSpec& spec, double rel_tol = 1e-13) {
  ::propdelay::detail::require_same_grid(y.alpha(), spec.alpha, "residual_check");
  const std::size_t order = std::min(spec.trunc, y.trunc());
  const PowerSeries integrated = frac_integrate(rhs_on_series(spec.rhs, y), spec.alpha);
  const PowerSeries image = add(PowerSeries::constant(spec.y0, spec.alpha, integrated.trunc()), integrated);
  ResidualReport out;
  out.max_abs = y.is_exact() && image.is_exact() ? Scalar(0) : Scalar(0.0);
  for (std::size_t m = 0; m <= order; ++m) {
    const Scalar r = y[m] - image[m];
    if (detail::coefficient_equal(y[m], image[m], rel_tol)) continue;
    out.clean = false;
    if (!out.first_nonzero_order) out.first_nonzero_order = m;
    out.max_abs = max(out.max_abs, abs(r));
  }
  return out;
}

}  // namespace propdelay::sam

#endif  // PROPDELAY_SAM_HPP
