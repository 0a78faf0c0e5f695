// Pantograph y' = y + y(t/2), y(0) = 1: closed form, Picard iteration and the
// Mittag-Leffler sandwich, side by side.
#include <cstdio>

#include "propdelay/propdelay.hpp"

int main() {
  using namespace propdelay;
  const Scalar a(1), b(1), q = Scalar::ratio(1, 2);

  const PowerSeries closed = closedform::pantograph_series({a, b, q}, 12);
  sam::ProblemSpec spec{sam::PolyRHS::linear(a, b, q), Scalar(1), Scalar(1), 11, 20};
  const auto picard = sam::solve(spec);

  std::printf("%3s  %-36s %-36s\n", "m", "closed form", "picard");
  for (std::size_t m = 0; m <= 11; ++m)
    std::printf("%3zu  %-36s %-36s\n", m, closed[m].to_string().c_str(), picard.series[m].to_string().c_str());
  std::printf("picard stabilized after %zu iterations\n", picard.iterations_used);

  for (double t : {0.5, 1.0, 2.0}) {
    const double lo = specfun::mittag_leffler(1.0, a.to_double() * t, 60).value;
    const double hi = specfun::mittag_leffler(1.0, (a + b).to_double() * t, 60).value;
    std::printf("t=%.1f  e^{at}=%.6f  y=%.6f  e^{(a+b)t}=%.6f\n", t, lo, eval_double(closed, t), hi);
  }
}
