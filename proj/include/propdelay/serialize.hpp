#ifndef PROPDELAY_SERIALIZE_HPP
#define PROPDELAY_SERIALIZE_HPP

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "propdelay/closedform.hpp"
#include "propdelay/errors.hpp"
#include "propdelay/sam.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/series.hpp"

// JSON formats:
//
//   series   {"alpha": a, "coeffs": [c0, c1, ...]}
//   vector   {"alpha": a, "dim": n, "coeffs": [[c0_1, ..., c0_n], ...]}
//   problem  {"alpha": a, "q": q, "y0": y0, "trunc": N, "iters": K,
//             "rhs": [{"c": c, "t": i, "y": j, "yq": k}, ...]}
//   matrix   {"A": [[...]], "B": [[...]], "lambda": [...], "q": q, "alpha": a}
//
// Scalars are JSON numbers (integers read as exact, others as floats) or
// strings "p/q" for exact rationals. Dumps write exact values as strings and
// floats as shortest round-trip numbers.
namespace propdelay::io {

using json = nlohmann::json;

inline json to_json(const Scalar& s) {
  if (s.is_exact()) return s.to_string();
  return s.to_double();
}

inline Scalar scalar_from_json(const json& j, const std::string& field) {
  if (j.is_number_integer()) return Scalar(j.get<long long>());
  if (j.is_number_unsigned()) return Scalar(Integer(j.get<unsigned long long>()));
  if (j.is_number_float()) return Scalar(j.get<double>());
  if (j.is_string()) {
    try {
      return Scalar::parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), field);
    }
  }
  throw ParseError("expected a number or \"p/q\" string", field);
}

inline const json& require(const json& obj, const char* key, const std::string& prefix = {}) {
  const std::string field = prefix + key;
  if (!obj.is_object()) throw ParseError("expected a JSON object", prefix.empty() ? "<root>" : prefix);
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing required field", field);
  return *it;
}

inline std::size_t count_from_json(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
  throw ParseError("expected a non-negative integer", field);
}

inline json to_json(const PowerSeries& p) {
  json coeffs = json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(to_json(c));
  return json{{"alpha", to_json(p.alpha())}, {"coeffs", coeffs}};
}

inline PowerSeries series_from_json(const json& j) {
  const Scalar alpha = scalar_from_json(require(j, "alpha"), "alpha");
  const json& arr = require(j, "coeffs");
  if (!arr.is_array() || arr.empty()) throw ParseError("expected a non-empty array", "coeffs");
  std::vector<Scalar> c;
  for (std::size_t m = 0; m < arr.size(); ++m) c.push_back(scalar_from_json(arr[m], "coeffs[" + std::to_string(m) + "]"));
  try {
    return PowerSeries(alpha, std::move(c));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), "alpha");
  }
}

inline json to_json(const VectorSeries& v) {
  json coeffs = json::array();
  for (const auto& row : v.coeffs()) {
    json r = json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    coeffs.push_back(r);
  }
  return json{{"alpha", to_json(v.alpha())}, {"dim", v.dim()}, {"coeffs", coeffs}};
}

inline sam::ProblemSpec problem_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("problem file must be a JSON object", "<root>");
  const Scalar alpha = scalar_from_json(require(j, "alpha"), "alpha");
  const Scalar q = scalar_from_json(require(j, "q"), "q");
  const Scalar y0 = scalar_from_json(require(j, "y0"), "y0");
  const std::size_t trunc = count_from_json(require(j, "trunc"), "trunc");
  const std::size_t iters = count_from_json(require(j, "iters"), "iters");
  const json& rhs = require(j, "rhs");
  if (!rhs.is_array()) throw ParseError("expected an array of terms", "rhs");
  std::vector<sam::RhsTerm> terms;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const std::string prefix = "rhs[" + std::to_string(i) + "].";
    const json& term = rhs[i];
    if (!term.is_object()) throw ParseError("expected a term object", "rhs[" + std::to_string(i) + "]");
    auto power = [&](const char* key) -> unsigned {
      auto it = term.find(key);
      if (it == term.end()) return 0;
      return static_cast<unsigned>(count_from_json(*it, prefix + key));
    };
    terms.push_back(sam::RhsTerm{scalar_from_json(require(term, "c", prefix), prefix + "c"), power("t"), power("y"),
                                 power("yq")});
  }
  try {
    check_order(alpha);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), "alpha");
  }
  if (trunc < 1) throw ParseError("must be at least 1", "trunc");
  if (iters < 1) throw ParseError("must be at least 1", "iters");
  try {
    sam::ProblemSpec spec{sam::PolyRHS(std::move(terms), q), alpha, y0, trunc, iters};
    for (const auto& t : spec.rhs.terms()) (void)grid_index_of_power(t.t_power, alpha);
    return spec;
  } catch (const DomainError& e) {
    throw ParseError(e.what(), "q");
  } catch (const AlphaMismatch& e) {
    throw ParseError(e.what(), "rhs");
  }
}

inline json to_json(const sam::ProblemSpec& spec) {
  json rhs = json::array();
  for (const auto& t : spec.rhs.terms())
    rhs.push_back(json{{"c", to_json(t.coeff)}, {"t", t.t_power}, {"y", t.y_power}, {"yq", t.yq_power}});
  return json{{"alpha", to_json(spec.alpha)}, {"q", to_json(spec.rhs.q())}, {"y0", to_json(spec.y0)},
              {"trunc", spec.trunc}, {"iters", spec.iters},       {"rhs", rhs}};
}

struct MatrixProblem {
  std::optional<closedform::SquareMatrix> A;
  closedform::SquareMatrix B;
  std::vector<Scalar> lambda;
  Scalar q;
  Scalar alpha = 1;
};

inline closedform::SquareMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows", field);
  std::vector<std::vector<Scalar>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw ParseError("expected a row array", field + "[" + std::to_string(i) + "]");
    std::vector<Scalar> row;
    for (std::size_t k = 0; k < j[i].size(); ++k)
      row.push_back(scalar_from_json(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    rows.push_back(std::move(row));
  }
  try {
    return closedform::SquareMatrix(rows);
  } catch (const DimError& e) {
    throw ParseError(e.what(), field);
  }
}

inline MatrixProblem matrix_problem_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("matrix file must be a JSON object", "<root>");
  MatrixProblem mp{std::nullopt, matrix_from_json(require(j, "B"), "B"), {}, Scalar(0), Scalar(1)};
  if (j.contains("A")) mp.A = matrix_from_json(j["A"], "A");
  const json& lam = require(j, "lambda");
  if (!lam.is_array()) throw ParseError("expected an array", "lambda");
  for (std::size_t i = 0; i < lam.size(); ++i) mp.lambda.push_back(scalar_from_json(lam[i], "lambda[" + std::to_string(i) + "]"));
  mp.q = scalar_from_json(require(j, "q"), "q");
  if (j.contains("alpha")) mp.alpha = scalar_from_json(j["alpha"], "alpha");
  if (mp.lambda.size() != mp.B.dim()) throw ParseError("length must match the dimension of B", "lambda");
  if (mp.A && mp.A->dim() != mp.B.dim()) throw ParseError("dimension must match B", "A");
  return mp;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// CSV number: shortest round-trip decimal of the double value.
inline std::string csv_number(const Scalar& s) { return format_double(s.to_double()); }
inline std::string csv_number(double d) { return format_double(d); }

}  // namespace propdelay::io

#endif  // PROPDELAY_SERIALIZE_HPP
