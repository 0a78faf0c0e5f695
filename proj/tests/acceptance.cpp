// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 255).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "propdelay/propdelay.hpp"

using namespace propdelay;

namespace {

// Pinned tolerances.
constexpr double kRuntimeLimitSeconds = 1.0;
constexpr double kSineTolUnit = 1e-9;     // [0, 1]
constexpr double kSineTolEight = 5e-2;    // [0, 8]; observed 2.55e-2, frozen with 2x headroom
constexpr double kGridStep = 0.01;
constexpr double kRootAgreement = 1e-6;
constexpr double kContinuityTol = 1e-4;   // |root - (a + b)| at tau = 1e-5
constexpr double kDoublingTol = 1e-12;    // absolute change in eval at t = 5

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (!out_.detail.empty()) out_.detail += "; ";
      out_.detail += what;
    }
  }
  void note(const std::string& what) { notes_.push_back(what); }
  Outcome done() {
    if (out_.pass) {
      for (const auto& n : notes_) {
        if (!out_.detail.empty()) out_.detail += "; ";
        out_.detail += n;
      }
    }
    return out_;
  }

 private:
  Outcome out_;
  std::vector<std::string> notes_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Scalar r(const char* s) { return Scalar::parse(s); }

sam::ProblemSpec example1(std::size_t trunc, std::size_t iters) {
  return sam::ProblemSpec{
      sam::PolyRHS({sam::RhsTerm{Scalar(1), 0, 0, 0}, sam::RhsTerm{Scalar(-2), 0, 0, 2}}, r("1/2")), Scalar(1), Scalar(0),
      trunc, iters};
}

PowerSeries odd_series(std::size_t trunc, std::initializer_list<const char*> odd) {
  std::vector<Scalar> c(trunc + 1, Scalar(0));
  std::size_t m = 1;
  for (const char* s : odd) {
    c.at(m) = r(s);
    m += 2;
  }
  return PowerSeries(Scalar(1), std::move(c));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1
Outcome exact_iterates() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto it = sam::picard_iterates(example1(31, 5), 4);
  c.require(it[1] == odd_series(31, {"1"}), "phi1");
  c.require(it[2] == odd_series(31, {"1", "-1/6"}), "phi2");
  c.require(it[3] == odd_series(31, {"1", "-1/6", "1/120", "-1/8064"}), "phi3");
  c.require(it[4][9] == r("61/23224320"), "phi4 t^9");
  c.require(it[4][11] == r("-67/3406233600"), "phi4 t^11");
  c.require(it[4][13] == r("1/12881756160"), "phi4 t^13");
  c.require(it[4][15] == r("-1/7990652436480"), "phi4 t^15");
  const double dt = seconds_since(t0);
  c.require(dt < kRuntimeLimitSeconds, "runtime " + sci(dt) + " s");
  c.note("runtime " + sci(dt) + " s");
  return c.done();
}

// 2
Outcome sine_agreement() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto phi5 = sam::picard_iterates(example1(31, 5), 5)[5];
  c.require(phi5.trunc() == 31, "phi5 truncation order");
  double unit = 0.0, eight = 0.0;
  for (int i = 0; i <= 800; ++i) {
    const double t = kGridStep * i;
    const double e = std::abs(eval_double(phi5, t) - std::sin(t));
    if (i <= 100) unit = std::max(unit, e);
    eight = std::max(eight, e);
  }
  c.require(unit <= kSineTolUnit, "[0,1] max err " + sci(unit));
  c.require(eight <= kSineTolEight, "[0,8] max err " + sci(eight));
  const double dt = seconds_since(t0);
  c.require(dt < kRuntimeLimitSeconds, "runtime " + sci(dt) + " s");
  c.note("[0,1] " + sci(unit) + ", [0,8] " + sci(eight));
  return c.done();
}

// 3
Outcome closed_form_vs_sam() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t trunc = 20;
  for (const auto& [a, b, q] : std::vector<std::tuple<const char*, const char*, const char*>>{
           {"1", "1", "1/2"}, {"1/2", "-1/2", "1/4"}, {"0", "1", "3/4"}}) {
    const auto res = sam::solve({sam::PolyRHS::linear(r(a), r(b), r(q)), Scalar(1), Scalar(1), trunc, 60});
    c.require(res.stabilized, std::string("sam did not stabilize for pantograph ") + a + "," + b + "," + q);
    c.require(res.series == closedform::pantograph_series({r(a), r(b), r(q)}, trunc + 1),
              std::string("pantograph mismatch ") + a + "," + b + "," + q);
  }
  for (const Scalar& q : {Scalar(2), Scalar(3)}) {
    const Scalar inv = Scalar(1) / q;
    const auto res = sam::solve({sam::PolyRHS::linear(Scalar(-1), inv, inv), Scalar(1), Scalar(1), trunc, 60});
    c.require(res.stabilized, "sam did not stabilize for Ambartsumian q=" + q.to_string());
    c.require(res.series == closedform::ambartsumian_series({q}, trunc + 1), "Ambartsumian mismatch q=" + q.to_string());
  }
  const double dt = seconds_since(t0);
  c.require(dt < kRuntimeLimitSeconds, "runtime " + sci(dt) + " s");
  c.note("runtime " + sci(dt) + " s");
  return c.done();
}

// 4
Outcome fractional_reduction() {
  Check c;
  for (const auto& [a, b, q] : std::vector<std::tuple<const char*, const char*, const char*>>{
           {"1", "1", "1/2"}, {"-2", "3/7", "1/3"}, {"5/2", "-1", "9/10"}}) {
    const auto p = closedform::pantograph_series({r(a), r(b), r(q), Scalar(1)}, 25);
    for (std::size_t m = 0; m < 25; ++m) {
      Scalar prod(1), fact(1);
      for (std::size_t j = 0; j < m; ++j) {
        prod *= r(a) + r(b) * pow(r(q), static_cast<long>(j));
        fact *= Scalar(static_cast<long long>(j + 1));
      }
      c.require(p[m] == prod / fact, std::string("pantograph coefficient ") + std::to_string(m) + " for " + a + "," + b);
    }
  }
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 40), len(0, 15);
  for (int i = 0; i < 100; ++i) {
    std::vector<Scalar> coeffs;
    const int n = len(rng);
    for (int m = 0; m <= n; ++m) coeffs.push_back(Scalar::ratio(num(rng), den(rng)));
    const PowerSeries p(Scalar(1), coeffs);
    c.require(frac_integrate(p, Scalar(1)) == integrate(p), "frac_integrate != integrate on sample " + std::to_string(i));
  }
  return c.done();
}

// 5
Outcome sandwich() {
  Check c;
  int checked = 0;
  const std::vector<Scalar> vals{Scalar(0), r("1/2"), Scalar(1), Scalar(2)};
  for (const auto& a : vals)
    for (const auto& b : vals)
      for (const Scalar& q : {r("1/4"), r("1/2"), r("3/4")})
        for (const Scalar& alpha : {r("1/2"), Scalar(1)}) {
          const auto rep = closedform::sandwich_check({a, b, q, alpha}, 41);
          ++checked;
          if (!rep.passed()) {
            std::ostringstream s;
            s << "violation at m=" << *rep.first_violation << " for a=" << a << " b=" << b << " q=" << q
              << " alpha=" << alpha;
            c.require(false, s.str());
          }
        }
  c.note(std::to_string(checked) + " settings, m <= 40");
  return c.done();
}

// 6
Outcome bound_domination() {
  Check c;
  const Scalar half = r("1/2");
  const sam::ProblemSpec spec{sam::PolyRHS::linear(half, half, half), Scalar(1), Scalar(1), 12, 12};
  const auto rep = sam::bounds_report(spec, sam::Rectangle(Scalar(1), Scalar(1)));
  c.require(rep.M == Scalar(2), "M = " + rep.M.to_string());
  c.require(rep.L1 == half, "L1 = " + rep.L1.to_string());
  c.require(rep.L2 == half, "L2 = " + rep.L2.to_string());
  c.require(rep.zeta == half, "zeta = " + rep.zeta.to_string());
  const auto it = sam::picard_iterates(spec, 8);
  for (std::size_t n = 1; n <= 8; ++n)
    for (int i = 0; i < 20; ++i) {
      const Scalar t = Scalar::ratio(i, 38);  // 20 points on [0, 1/2]
      const Scalar gap = abs(eval(it[n], t) - eval(it[n - 1], t));
      const Scalar bound = sam::convergence_bound(rep.M, rep.L1, rep.L2, n, t, Scalar(1));
      c.require(gap <= bound, "n=" + std::to_string(n) + " t=" + t.to_string());
    }
  return c.done();
}

// 7
Outcome residual_fixed_point() {
  Check c;
  std::vector<std::pair<std::string, sam::ProblemSpec>> suite;
  suite.emplace_back("example 1", example1(31, 40));
  for (const auto& [a, b, q] : std::vector<std::tuple<const char*, const char*, const char*>>{
           {"1", "1", "1/2"}, {"1/2", "-1/2", "1/4"}, {"0", "1", "3/4"}})
    suite.emplace_back(std::string("pantograph ") + a + "," + b + "," + q,
                       sam::ProblemSpec{sam::PolyRHS::linear(r(a), r(b), r(q)), Scalar(1), Scalar(1), 20, 60});
  for (const Scalar& q : {Scalar(2), Scalar(3)}) {
    const Scalar inv = Scalar(1) / q;
    suite.emplace_back("Ambartsumian q=" + q.to_string(),
                       sam::ProblemSpec{sam::PolyRHS::linear(Scalar(-1), inv, inv), Scalar(1), Scalar(1), 20, 60});
  }
  for (const auto& [name, spec] : suite) {
    const auto res = sam::solve(spec);
    c.require(res.stabilized, name + " did not stabilize");
    if (!res.stabilized) continue;
    const auto rc = sam::residual_check(res.series, spec);
    c.require(rc.clean, name + " residual nonzero at order " +
                            (rc.first_nonzero_order ? std::to_string(*rc.first_nonzero_order) : std::string("?")));
  }
  c.note(std::to_string(suite.size()) + " fixtures");
  return c.done();
}

// 8
Outcome system_decoupling() {
  Check c;
  const std::size_t terms = 16;  // trunc 15
  const Scalar q = r("1/2"), qa = Scalar(3);
  const std::vector<std::vector<Scalar>> a_diag{{Scalar(1), Scalar(0)}, {r("1/2"), Scalar(-1), Scalar(2)}};
  const std::vector<std::vector<Scalar>> b_diag{{Scalar(1), Scalar(1)}, {r("1/3"), Scalar(-1), r("3/4")}};
  for (std::size_t s = 0; s < a_diag.size(); ++s) {
    const std::size_t n = a_diag[s].size();
    const auto A = closedform::SquareMatrix::diagonal(a_diag[s]);
    const auto B = closedform::SquareMatrix::diagonal(b_diag[s]);
    std::vector<Scalar> lambda;
    for (std::size_t i = 0; i < n; ++i) lambda.push_back(Scalar(static_cast<long long>(i + 1)));
    const auto pv = closedform::pantograph_system_series(A, B, q, Scalar(1), lambda, terms);
    const auto av = closedform::ambartsumian_system_series(B, qa, Scalar(1), lambda, terms);
    for (std::size_t i = 0; i < n; ++i) {
      c.require(pv.component(i) == closedform::pantograph_series({a_diag[s][i], b_diag[s][i], q, Scalar(1), lambda[i]}, terms),
                "pantograph n=" + std::to_string(n) + " component " + std::to_string(i));
      // scalar reference: D y = -y + b y(t/q) has coefficient prod_{j<m} (b q^-j - 1) / m!
      std::vector<Scalar> ref{lambda[i]};
      for (std::size_t m = 1; m < terms; ++m)
        ref.push_back(ref.back() * (b_diag[s][i] * pow(qa, -static_cast<long>(m - 1)) - Scalar(1)) /
                      Scalar(static_cast<long long>(m)));
      c.require(av.component(i) == PowerSeries(Scalar(1), ref),
                "Ambartsumian n=" + std::to_string(n) + " component " + std::to_string(i));
      if (b_diag[s][i] == Scalar(1) / qa)
        c.require(av.component(i) == scale(closedform::ambartsumian_series({qa}, terms), lambda[i]),
                  "Ambartsumian scalar series n=" + std::to_string(n));
    }
  }
  return c.done();
}

// 9
Outcome stability_suite() {
  Check c;
  c.require(stability::pantograph_stable(Scalar(-2), Scalar(1)), "(-2, 1) should be stable");
  c.require(!stability::pantograph_stable(Scalar(1), r("1/2")), "(1, 1/2) should be unconcluded");
  c.require(!stability::pantograph_stable(Scalar(-1), Scalar(1)), "(-1, 1) should be unconcluded");

  struct Case {
    double a, b, tau;
  };
  const std::vector<Case> cases{{-2, 1, 0.5},  {-1, 0.5, 1},    {-3, 2, 0.2},  {0.5, 0.2, 1}, {1, 1, 0.5},
                                {-2, -0.01, 1}, {-5, 2, 1},     {0.1, 0.3, 2}, {-1, -0.2, 0.5}, {2, -0.05, 1}};
  int stable = 0;
  double worst = 0.0;
  for (const auto& k : cases) {
    const stability::StabilityQuery query{Scalar(k.a), Scalar(k.b), Scalar(k.tau)};
    const auto lw = stability::char_root_rightmost(query);
    const auto scan = stability::char_root_scan(query);
    const std::string id = "(" + format_double(k.a) + "," + format_double(k.b) + "," + format_double(k.tau) + ")";
    c.require(lw.method == stability::RootMethod::lambert_w, id + " not solved by Lambert W");
    c.require(scan.rightmost_root.has_value(), id + " scan found no root");
    if (!lw.rightmost_root || !scan.rightmost_root) continue;
    const double d = std::abs(*lw.rightmost_root - *scan.rightmost_root);
    worst = std::max(worst, d);
    c.require(d <= kRootAgreement, id + " disagreement " + sci(d));
    c.require(lw.verdict == scan.verdict, id + " verdicts differ");
    stable += lw.stable ? 1 : 0;
  }
  c.require(stable > 0 && stable < static_cast<int>(cases.size()), "cases must mix stable and unstable");

  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{-2, 1}, {-1, 0.5}, {0.5, 0.5}}) {
    double prev = 1e300;
    for (double tau : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const auto rep = stability::char_root_rightmost({Scalar(a), Scalar(b), Scalar(tau)});
      const double gap = std::abs(rep.rightmost_root->real() - (a + b));
      c.require(gap < prev, "continuity not monotone at tau=" + sci(tau));
      prev = gap;
    }
    c.require(prev < kContinuityTol, "root does not approach a+b: gap " + sci(prev));
  }

  const auto phi5 = sam::picard_iterates(example1(31, 5), 5)[5];
  const double sam_err = std::abs(eval_double(phi5, 8.0) - std::sin(8.0));
  const double adm_err = std::abs(eval_double(reference::adm_vim_ham_series(), 8.0) - std::sin(8.0));
  c.require(sam_err < adm_err, "SAM error " + sci(sam_err) + " not below published series error " + sci(adm_err));
  c.note("root agreement " + sci(worst) + "; t=8 error SAM " + sci(sam_err) + " vs published " + sci(adm_err));
  return c.done();
}

// 10
Outcome doubling_convergence() {
  Check c;
  const Scalar t5(5);
  auto change = [&](const std::function<PowerSeries(std::size_t)>& make, bool exact) {
    const PowerSeries s40 = make(40), s80 = make(80);
    if (exact) return abs(eval(s80, t5) - eval(s40, t5)).to_double();
    return std::abs(eval_double(s80, 5.0) - eval_double(s40, 5.0));
  };
  std::vector<std::string> seen;
  for (const Scalar& alpha : {r("1/2"), Scalar(1)}) {
    const bool exact = is_unit_order(alpha);
    const double dp =
        change([&](std::size_t n) { return closedform::pantograph_series({Scalar(1), Scalar(1), r("1/2"), alpha}, n); },
               exact);
    const double da =
        change([&](std::size_t n) { return closedform::ambartsumian_series({Scalar(2), alpha}, n); }, exact);
    c.require(dp < kDoublingTol, "pantograph alpha=" + alpha.to_string() + " change " + sci(dp));
    c.require(da < kDoublingTol, "Ambartsumian alpha=" + alpha.to_string() + " change " + sci(da));
    seen.push_back("alpha=" + alpha.to_string() + ": pantograph " + sci(dp) + ", Ambartsumian " + sci(da));
  }
  for (const auto& s : seen) c.note(s);
  return c.done();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "exact iterate reproduction", exact_iterates},
      {2, "exact-solution agreement", sine_agreement},
      {3, "closed-form / SAM equivalence", closed_form_vs_sam},
      {4, "fractional reduction", fractional_reduction},
      {5, "Mittag-Leffler sandwich", sandwich},
      {6, "error-bound domination", bound_domination},
      {7, "residual fixed point", residual_fixed_point},
      {8, "system decoupling", system_decoupling},
      {9, "stability suite", stability_suite},
      {10, "convergence under term doubling", doubling_convergence},
  };
  int failed = 0;
  for (const auto& k : criteria) {
    Outcome o;
    try {
      o = k.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s%s%s\n", o.pass ? "PASS" : "FAIL", k.id, k.name, o.detail.empty() ? "" : " -- ",
                o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed > 255 ? 255 : failed;
}
