#ifndef PROPDELAY_REFERENCE_HPP
#define PROPDELAY_REFERENCE_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "propdelay/errors.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/serialize.hpp"
#include "propdelay/series.hpp"
#include "propdelay/specfun.hpp"

namespace propdelay::reference {

// Transcribed published data: the 9-term series reported for the
// Adomian decomposition, variational iteration and homotopy analysis methods
// on y' = 1 - 2 y^2(t/2), y(0) = 0. Read-only.
inline PowerSeries adm_vim_ham_series() {
  std::vector<Scalar> c(18, Scalar(0));
  const char* odd[] = {"1",         "-1/6",           "1/120",           "-1/5040",          "1/362880",
                       "-1/39916800", "1/6227020800", "-1/1307674368000", "1/355687428096000"};
  for (std::size_t k = 0; k < 9; ++k) c[2 * k + 1] = Scalar::parse(odd[k]);
  return PowerSeries(Scalar(1), std::move(c));
}

// Transcribed published data: the 4-term optimal homotopy asymptotic
// polynomial for the same problem. Decimal coefficients, stored as floats.
inline PowerSeries oham_series() {
  std::vector<Scalar> c(8, Scalar(0.0));
  c[1] = Scalar(1.0);
  c[3] = Scalar(-0.166665);
  c[5] = Scalar(0.00832857);
  c[7] = Scalar(-0.000192105);
  return PowerSeries(Scalar(1), std::move(c));
}

struct Sine {};
struct Exponential {
  double rate;
};
struct MittagLeffler {
  double alpha;
  double rate;
};
struct SeriesRef {
  PowerSeries series;
};

// sin | exp:RATE | ml:ALPHA:RATE | file:PATH | adm-vim-ham | oham
class ReferenceSolution {
 public:
  using Kind = std::variant<Sine, Exponential, MittagLeffler, SeriesRef>;

  explicit ReferenceSolution(Kind kind, std::string label) : kind_(std::move(kind)), label_(std::move(label)) {}

  static ReferenceSolution parse(std::string_view spec) {
    const std::string text(spec);
    auto number = [&](std::string_view s) {
      try {
        return Scalar::parse(s).to_double();
      } catch (const ParseError&) {
        throw ParseError("bad number in reference '" + text + "'", "ref");
      }
    };
    if (spec == "sin") return ReferenceSolution(Sine{}, text);
    if (spec == "adm-vim-ham") return ReferenceSolution(SeriesRef{adm_vim_ham_series()}, text);
    if (spec == "oham") return ReferenceSolution(SeriesRef{oham_series()}, text);
    if (spec.starts_with("exp:")) return ReferenceSolution(Exponential{number(spec.substr(4))}, text);
    if (spec.starts_with("ml:")) {
      auto rest = spec.substr(3);
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected ml:ALPHA:RATE, got '" + text + "'", "ref");
      const double alpha = number(rest.substr(0, colon));
      if (!(alpha > 0.0) || alpha > 1.0) throw ParseError("Mittag-Leffler order must lie in (0, 1]", "ref");
      return ReferenceSolution(MittagLeffler{alpha, number(rest.substr(colon + 1))}, text);
    }
    if (spec.starts_with("file:"))
      return ReferenceSolution(SeriesRef{io::series_from_json(io::read_json_file(std::string(spec.substr(5))))}, text);
    throw ParseError("unknown reference kind '" + text + "'", "ref");
  }

  double operator()(double t) const {
    return std::visit(
        [t](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Sine>) {
            return std::sin(t);
          } else if constexpr (std::is_same_v<K, Exponential>) {
            return std::exp(k.rate * t);
          } else if constexpr (std::is_same_v<K, MittagLeffler>) {
            if (t < 0.0 && k.alpha != 1.0) throw DomainError("t^alpha undefined for t < 0");
            // E_alpha(rate t^alpha)
            const auto ml = specfun::mittag_leffler(k.alpha, k.rate * std::pow(t, k.alpha), 400);
            return ml.value;
          } else {
            return eval_double(k.series, t);
          }
        },
        kind_);
  }

  const std::string& label() const noexcept { return label_; }

 private:
  Kind kind_;
  std::string label_;
};

}  // namespace propdelay::reference

#endif  // PROPDELAY_REFERENCE_HPP
