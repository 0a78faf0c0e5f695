#ifndef PROPDELAY_CLI_HPP
#define PROPDELAY_CLI_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "propdelay/closedform.hpp"
#include "propdelay/errors.hpp"
#include "propdelay/reference.hpp"
#include "propdelay/sam.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/serialize.hpp"
#include "propdelay/series.hpp"
#include "propdelay/stability.hpp"

// Command-line front end. Output conventions:
//
//   * With an evaluation grid (--t-end given), stdout carries the table in
//     --format (csv by default, or json); otherwise it carries the series
//     dump as JSON.
//   * --out PATH sends that stdout payload to a file instead.
//   * --series-out PATH additionally writes the series dump to a file.
//   * Diagnostics (bounds, residuals, sandwich, warnings) go to stderr.
//
// Exit codes: 0 success (also when solve did not stabilize), 2 bad input,
// 1 anything unexpected.
namespace propdelay::cli {

using json = nlohmann::json;

enum class Format { csv, json };

struct Grid {
  double start = 0.0;
  double end = 0.0;
  double step = 0.1;

  std::vector<double> points() const {
    if (!(step > 0.0)) throw DomainError("t-step must be positive");
    if (!(start <= end)) throw DomainError("t-start must not exceed t-end");
    const auto n = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9));
    std::vector<double> t;
    t.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t.push_back(start + step * static_cast<double>(i));
    return t;
  }
};

struct RunConfig {
  std::string command;
  std::string input;  // problem, matrix or series file, depending on command
  Format format = Format::csv;
  bool format_given = false;
  std::optional<Grid> grid;
  std::string out_path;
  std::string series_out_path;
  std::optional<std::size_t> trunc;
  std::optional<std::size_t> iters;
};

namespace detail {

inline Scalar flag_scalar(const std::string& text, const std::string& flag) {
  try {
    return Scalar::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), flag);
  }
}

inline void check_grid_domain(const Grid& g, const Scalar& alpha) {
  if (!is_unit_order(alpha) && g.start < 0.0)
    throw DomainError("fractional series are defined only for t >= 0 (t-start = " + format_double(g.start) + ")");
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << text;
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void payload(const std::string& text) {
    if (cfg_.out_path.empty())
      out_ << text;
    else
      write_text(cfg_.out_path, text);
  }

  void series_dump(const json& dump, bool grid_present) {
    const std::string text = dump.dump(2) + "\n";
    if (!cfg_.series_out_path.empty()) write_text(cfg_.series_out_path, text);
    if (!grid_present) payload(text);
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

// columns[0] is t; names has one entry per column.
inline std::string render_table(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
                                Format format) {
  std::ostringstream s;
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  if (format == Format::csv) {
    for (std::size_t c = 0; c < names.size(); ++c) s << (c ? "," : "") << names[c];
    s << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < columns.size(); ++c) s << (c ? "," : "") << format_double(columns[c][r]);
      s << "\n";
    }
  } else {
    json j = json::object();
    for (std::size_t c = 0; c < names.size(); ++c) j[names[c]] = columns[c];
    s << j.dump(2) << "\n";
  }
  return s.str();
}

inline std::vector<double> eval_column(const PowerSeries& p, const std::vector<double>& t) {
  std::vector<double> y;
  y.reserve(t.size());
  for (double x : t) y.push_back(eval(p, Scalar(x)).to_double());
  return y;
}

inline void emit_scalar_run(const RunConfig& cfg, const PowerSeries& series, Emitter& emit) {
  if (cfg.grid) {
    check_grid_domain(*cfg.grid, series.alpha());
    const auto t = cfg.grid->points();
    emit.series_dump(io::to_json(series), true);
    emit.payload(render_table({"t", "y"}, {t, eval_column(series, t)}, cfg.format));
  } else {
    emit.series_dump(io::to_json(series), false);
  }
}

inline void report_sandwich(const closedform::PantographParams& p, std::size_t terms, std::ostream& err) {
  if (p.a < Scalar(0) || p.b < Scalar(0)) return;
  const auto report = closedform::sandwich_check(p, terms);
  if (report.passed())
    err << "sandwich: a^m <= prod <= (a+b)^m holds for all m < " << terms << "\n";
  else
    err << "sandwich: violated first at m = " << *report.first_violation << "\n";
}

inline void report_bounds(const sam::ProblemSpec& spec, const sam::Rectangle& rect, std::ostream& err) {
  const auto b = sam::bounds_report(spec, rect);
  err << "bounds: M=" << b.M << " L1=" << b.L1 << " L2=" << b.L2 << " zeta=" << b.zeta;
  if (b.bound_extrapolated) err << " (error bound extrapolated to alpha < 1)";
  err << "\n";
}

inline void report_residual(const PowerSeries& y, const sam::ProblemSpec& spec, std::ostream& err) {
  const auto r = sam::residual_check(y, spec);
  const std::size_t order = std::min(spec.trunc, y.trunc());
  if (r.clean)
    err << "residual: clean through order " << order << "\n";
  else
    err << "residual: nonzero from order " << *r.first_nonzero_order << " (max |r| = " << r.max_abs << ")\n";
}

inline sam::ProblemSpec load_problem(const RunConfig& cfg) {
  sam::ProblemSpec spec = io::problem_from_json(io::read_json_file(cfg.input));
  if (cfg.trunc) spec.trunc = *cfg.trunc;
  if (cfg.iters) spec.iters = *cfg.iters;
  spec.validate();
  return spec;
}

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg, const Scalar& rect_a, const Scalar& rect_b, std::ostream& out,
                     std::ostream& err) {
  const sam::ProblemSpec spec = detail::load_problem(cfg);
  if (cfg.grid) detail::check_grid_domain(*cfg.grid, spec.alpha);
  detail::report_bounds(spec, sam::Rectangle(rect_a, rect_b), err);
  const auto result = sam::solve(spec);
  if (result.stabilized)
    err << "solve: stabilized after " << result.iterations_used << " iterations\n";
  else
    err << "warning: iterates did not stabilize within " << spec.iters << " iterations (through order " << spec.trunc
        << ")\n";
  detail::report_residual(result.series, spec, err);
  detail::Emitter emit(cfg, out);
  detail::emit_scalar_run(cfg, result.series, emit);
  return 0;
}

inline int cmd_compare(const RunConfig& cfg, const std::string& series_path, const std::string& ref_spec,
                       std::ostream& out, std::ostream& err) {
  if (cfg.input.empty() == series_path.empty()) throw ParseError("give exactly one of --problem or --series", "input");
  const auto ref = reference::ReferenceSolution::parse(ref_spec);
  PowerSeries series = PowerSeries::zero(Scalar(1), 0);
  if (!series_path.empty()) {
    series = io::series_from_json(io::read_json_file(series_path));
  } else {
    const auto spec = detail::load_problem(cfg);
    const auto result = sam::solve(spec);
    if (!result.stabilized) err << "warning: iterates did not stabilize within " << spec.iters << " iterations\n";
    series = result.series;
  }
  const Grid grid = cfg.grid.value_or(Grid{0.0, 1.0, 0.05});
  detail::check_grid_domain(grid, series.alpha());
  const auto t = grid.points();
  std::vector<double> y = detail::eval_column(series, t), r, e;
  double max_err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    r.push_back(ref(t[i]));
    e.push_back(std::abs(y[i] - r.back()));
    max_err = std::max(max_err, e.back());
  }
  detail::Emitter emit(cfg, out);
  const Format format = cfg.format_given ? cfg.format : Format::csv;
  emit.payload(detail::render_table({"t", "y", "ref", "abs_err"}, {t, y, r, e}, format));
  out << "max_abs_err=" << format_double(max_err) << "\n";
  return 0;
}

struct PantographFlags {
  std::string a = "1", b = "1", q = "1/2", alpha = "1", y0 = "1";
  std::size_t terms = 30;
};

inline int cmd_pantograph(const RunConfig& cfg, const PantographFlags& f, std::ostream& out, std::ostream& err) {
  closedform::PantographParams p{detail::flag_scalar(f.a, "--a"), detail::flag_scalar(f.b, "--b"),
                                 detail::flag_scalar(f.q, "--q"), detail::flag_scalar(f.alpha, "--alpha"),
                                 detail::flag_scalar(f.y0, "--y0")};
  const std::size_t terms = cfg.trunc ? *cfg.trunc + 1 : f.terms;
  const PowerSeries series = closedform::pantograph_series(p, terms);
  detail::report_sandwich(p, terms, err);
  detail::Emitter emit(cfg, out);
  detail::emit_scalar_run(cfg, series, emit);
  return 0;
}

struct AmbartsumianFlags {
  std::string q = "2", alpha = "1", lambda = "1", product = "auto";
  std::size_t terms = 30;
};

inline int cmd_ambartsumian(const RunConfig& cfg, const AmbartsumianFlags& f, std::ostream& out, std::ostream&) {
  closedform::AmbartsumianParams p{detail::flag_scalar(f.q, "--q"), detail::flag_scalar(f.alpha, "--alpha"),
                                   detail::flag_scalar(f.lambda, "--lambda")};
  closedform::AmbartsumianProduct form = closedform::AmbartsumianProduct::automatic;
  if (f.product == "integer")
    form = closedform::AmbartsumianProduct::integer_order;
  else if (f.product == "fractional")
    form = closedform::AmbartsumianProduct::fractional_order;
  const std::size_t terms = cfg.trunc ? *cfg.trunc + 1 : f.terms;
  const PowerSeries series = closedform::ambartsumian_series(p, terms, form);
  detail::Emitter emit(cfg, out);
  detail::emit_scalar_run(cfg, series, emit);
  return 0;
}

struct SystemFlags {
  std::string kind = "auto";  // pantograph | ambartsumian | auto (pantograph when A is present)
  bool paper_literal = false;
  std::size_t terms = 30;
};

inline int cmd_system(const RunConfig& cfg, const SystemFlags& f, std::ostream& out, std::ostream& err) {
  const io::MatrixProblem mp = io::matrix_problem_from_json(io::read_json_file(cfg.input));
  const std::size_t terms = cfg.trunc ? *cfg.trunc + 1 : f.terms;
  const bool pantograph = f.kind == "pantograph" || (f.kind == "auto" && mp.A.has_value());
  VectorSeries series = [&] {
    if (pantograph) {
      if (!mp.A) throw ParseError("pantograph system needs matrix A", "A");
      return closedform::pantograph_system_series(
          *mp.A, mp.B, mp.q, mp.alpha, mp.lambda, terms,
          f.paper_literal ? closedform::SystemExponent::paper_literal : closedform::SystemExponent::scalar_consistent);
    }
    return closedform::ambartsumian_system_series(mp.B, mp.q, mp.alpha, mp.lambda, terms);
  }();
  err << "system: " << (pantograph ? "pantograph" : "ambartsumian") << ", n = " << series.dim() << ", " << terms
      << " terms\n";
  detail::Emitter emit(cfg, out);
  emit.series_dump(io::to_json(series), cfg.grid.has_value());
  if (cfg.grid) {
    detail::check_grid_domain(*cfg.grid, mp.alpha);
    const auto t = cfg.grid->points();
    std::vector<std::string> names{"t"};
    std::vector<std::vector<double>> columns{t};
    for (std::size_t i = 0; i < series.dim(); ++i) {
      names.push_back("y" + std::to_string(i + 1));
      columns.push_back(detail::eval_column(series.component(i), t));
    }
    emit.payload(detail::render_table(names, columns, cfg.format));
  }
  return 0;
}

struct StabilityFlags {
  std::string a, b;
  std::optional<std::string> tau;
};

inline int cmd_stability(const RunConfig& cfg, const StabilityFlags& f, std::ostream& out, std::ostream& err) {
  const Scalar a = detail::flag_scalar(f.a, "--a");
  const Scalar b = detail::flag_scalar(f.b, "--b");
  const bool sum_stable = stability::pantograph_stable(a, b);
  json j;
  j["sum_criterion"] = {{"a", io::to_json(a)},
                        {"b", io::to_json(b)},
                        {"verdict", sum_stable ? "stable" : "not-concluded"},
                        {"sufficient_only", true}};
  err << "sum criterion (a + b < 0, sufficient only): " << (sum_stable ? "stable" : "not-concluded") << "\n";
  if (f.tau) {
    const Scalar tau = detail::flag_scalar(*f.tau, "--tau");
    const auto r = stability::char_root_rightmost({a, b, tau});
    json root = nullptr;
    if (r.rightmost_root) root = {{"re", r.rightmost_root->real()}, {"im", r.rightmost_root->imag()}};
    j["char_root"] = {{"tau", io::to_json(tau)},
                      {"method", std::string(stability::to_string(r.method))},
                      {"verdict", std::string(stability::to_string(r.verdict))},
                      {"rightmost_root", root},
                      {"margin", r.margin}};
    if (r.method == stability::RootMethod::root_scan)
      j["char_root"]["resolution"] = {{"re", r.resolution_re}, {"im", r.resolution_im}};
    err << "characteristic root (tau* = " << tau << ", " << stability::to_string(r.method)
        << "): " << stability::to_string(r.verdict);
    if (r.rightmost_root)
      err << ", rightmost root " << format_double(r.rightmost_root->real()) << " + "
          << format_double(r.rightmost_root->imag()) << "i";
    err << "\n";
  }
  detail::Emitter emit(cfg, out);
  emit.payload(j.dump(2) + "\n");
  return 0;
}

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Series solvers for delay differential equations with proportional delay"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "csv";
  double t_start = 0.0, t_step = 0.1;
  std::optional<double> t_end;
  std::optional<std::size_t> trunc_v, iters_v;
  bool format_given = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--t-start", t_start, "grid start");
    sub->add_option("--t-end", t_end, "grid end; enables grid output");
    sub->add_option("--t-step", t_step, "grid spacing");
    sub->add_option("--format", format, "grid output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->each([&](const std::string&) { format_given = true; });
    sub->add_option("--out", cfg.out_path, "write stdout payload to this file");
    sub->add_option("--series-out", cfg.series_out_path, "also write the series dump to this file");
    sub->add_option("--trunc", trunc_v, "truncation order override");
  };

  Scalar rect_a(1), rect_b(1);
  std::string rect_a_s = "1", rect_b_s = "1";
  auto* solve = app.add_subcommand("solve", "Picard iteration on a problem file");
  solve->add_option("problem", cfg.input, "problem JSON")->required();
  solve->add_option("--iters", iters_v, "iteration cap override");
  solve->add_option("--rect-a", rect_a_s, "rectangle t radius for the bounds report");
  solve->add_option("--rect-b", rect_b_s, "rectangle y radius for the bounds report");
  add_common(solve);

  PantographFlags pf;
  auto* panto = app.add_subcommand("pantograph", "closed-form pantograph series");
  panto->add_option("--a", pf.a);
  panto->add_option("--b", pf.b);
  panto->add_option("--q", pf.q);
  panto->add_option("--alpha", pf.alpha);
  panto->add_option("--y0", pf.y0);
  panto->add_option("--terms", pf.terms)->check(CLI::PositiveNumber);
  add_common(panto);

  AmbartsumianFlags af;
  auto* amb = app.add_subcommand("ambartsumian", "closed-form Ambartsumian series");
  amb->add_option("--q", af.q);
  amb->add_option("--alpha", af.alpha);
  amb->add_option("--lambda", af.lambda);
  amb->add_option("--product", af.product)->check(CLI::IsMember({"auto", "integer", "fractional"}));
  amb->add_option("--terms", af.terms)->check(CLI::PositiveNumber);
  add_common(amb);

  SystemFlags sf;
  auto* sys = app.add_subcommand("system", "matrix system series from a matrix file");
  sys->add_option("matrix", cfg.input, "matrix JSON")->required();
  sys->add_option("--kind", sf.kind)->check(CLI::IsMember({"auto", "pantograph", "ambartsumian"}));
  sys->add_flag("--paper-literal", sf.paper_literal, "use the printed q^{-(k-j) alpha} exponent");
  sys->add_option("--terms", sf.terms)->check(CLI::PositiveNumber);
  add_common(sys);

  StabilityFlags stf;
  std::string tau_s;
  auto* stab = app.add_subcommand("stability", "stability verdicts for y' = a y + b y(qt)");
  stab->add_option("--a", stf.a)->required();
  stab->add_option("--b", stf.b)->required();
  auto* tau_opt = stab->add_option("--tau", tau_s, "frozen delay tau* = (1 - q) t0");
  stab->add_option("--out", cfg.out_path);

  std::string series_path, ref_spec = "sin";
  auto* cmp = app.add_subcommand("compare", "tabulate a series against a reference solution");
  cmp->add_option("--problem", cfg.input, "solve this problem file first");
  cmp->add_option("--series", series_path, "series JSON to compare");
  cmp->add_option("--ref", ref_spec, "sin | exp:RATE | ml:ALPHA:RATE | file:PATH | adm-vim-ham | oham");
  cmp->add_option("--iters", iters_v, "iteration cap override");
  add_common(cmp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) {
      cfg.command = sub->get_name();
      cfg.format = format == "json" ? Format::json : Format::csv;
      cfg.format_given = format_given;
      if (t_end) cfg.grid = Grid{t_start, *t_end, t_step};
      cfg.trunc = trunc_v;
      cfg.iters = iters_v;
      if (cfg.grid) (void)cfg.grid->points();
      if (cfg.command == "solve") {
        rect_a = detail::flag_scalar(rect_a_s, "--rect-a");
        rect_b = detail::flag_scalar(rect_b_s, "--rect-b");
        return cmd_solve(cfg, rect_a, rect_b, out, err);
      }
      if (cfg.command == "pantograph") return cmd_pantograph(cfg, pf, out, err);
      if (cfg.command == "ambartsumian") return cmd_ambartsumian(cfg, af, out, err);
      if (cfg.command == "system") return cmd_system(cfg, sf, out, err);
      if (cfg.command == "stability") {
        if (tau_opt->count()) stf.tau = tau_s;
        return cmd_stability(cfg, stf, out, err);
      }
      if (cfg.command == "compare") return cmd_compare(cfg, series_path, ref_spec, out, err);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace propdelay::cli

#endif  // PROPDELAY_CLI_HPP
