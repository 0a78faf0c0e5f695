#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "propdelay/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = propdelay::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(PROPDELAY_DATA_DIR) + "/" + name; }

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line.find('=') != std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST(Cli, SolveExample1GridMatchesSine) {
  const auto r = run({"solve", data("example1.json"), "--t-end", "1", "--t-step", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(r.out, &header);
  EXPECT_EQ(header, "t,y");
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& row : rows) EXPECT_NEAR(row[1], std::sin(row[0]), 1e-9);
  EXPECT_NE(r.err.find("bounds: M=3 L1=0 L2=4 zeta=1/3"), std::string::npos);
  EXPECT_NE(r.err.find("residual:"), std::string::npos);
  EXPECT_NE(r.err.find("warning:"), std::string::npos);
}

TEST(Cli, SolveThirdIterateDump) {
  const auto r = run({"solve", data("example1.json"), "--trunc", "7", "--iters", "3"});
  ASSERT_EQ(r.code, 0);
  const auto dump = nlohmann::json::parse(r.out);
  EXPECT_EQ(dump["coeffs"], nlohmann::json::parse(R"(["0","1","0","-1/6","0","1/120","0","-1/8064"])"));
}

TEST(Cli, SolveConstantColumn) {
  const auto r = run({"solve", data("constant.json"), "--t-end", "2", "--t-step", "0.5"});
  ASSERT_EQ(r.code, 0);
  for (const auto& row : parse_csv(r.out)) EXPECT_EQ(row[1], 3.0);
}

TEST(Cli, MalformedProblemNamesField) {
  const auto bad = temp_file("propdelay_bad_problem.json", R"({"alpha":1,"q":"1/2","y0":"x","trunc":3,"iters":2,"rhs":[]})");
  const auto r = run({"solve", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("y0"), std::string::npos);
  const auto broken = temp_file("propdelay_broken.json", "{not json");
  EXPECT_EQ(run({"solve", broken.string()}).code, 2);
  EXPECT_EQ(run({"solve", "/nonexistent/problem.json"}).code, 2);
}

TEST(Cli, SeriesOutFileAndDeterminism) {
  const auto path = std::filesystem::temp_directory_path() / "propdelay_series_out.json";
  const auto a = run({"solve", data("example1.json"), "--t-end", "1", "--series-out", path.string()});
  const auto b = run({"solve", data("example1.json"), "--t-end", "1"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::ifstream in(path);
  const auto dump = nlohmann::json::parse(in);
  EXPECT_EQ(dump["coeffs"][31], "-1/1062664199886151693758358595882188800");
}

TEST(Cli, PantographDump) {
  const auto r = run({"pantograph", "--a", "1", "--b", "1", "--q", "1/2", "--terms", "30"});
  ASSERT_EQ(r.code, 0);
  const auto dump = nlohmann::json::parse(r.out);
  EXPECT_EQ(dump["coeffs"][3], "5/8");
  EXPECT_EQ(dump["coeffs"].size(), 30u);
  EXPECT_NE(r.err.find("sandwich"), std::string::npos);
  EXPECT_EQ(run({"pantograph", "--q", "3/2"}).code, 2);
  EXPECT_EQ(run({"pantograph", "--a", "one"}).code, 2);
}

TEST(Cli, AmbartsumianZeroSeries) {
  const auto r = run({"ambartsumian", "--q", "2", "--lambda", "0"});
  ASSERT_EQ(r.code, 0);
  for (const auto& c : nlohmann::json::parse(r.out)["coeffs"]) EXPECT_EQ(c, "0");
  EXPECT_EQ(run({"ambartsumian", "--q", "1/2"}).code, 2);
}

TEST(Cli, SystemColumnsMatchScalarRuns) {
  const auto sys = run({"system", data("diagonal_system.json"), "--terms", "20", "--t-end", "1", "--t-step", "0.25"});
  ASSERT_EQ(sys.code, 0) << sys.err;
  std::string header;
  const auto rows = parse_csv(sys.out, &header);
  EXPECT_EQ(header, "t,y1,y2");
  const auto y1 = parse_csv(run({"pantograph", "--a", "1", "--b", "1", "--q", "1/2", "--terms", "20", "--t-end", "1",
                                 "--t-step", "0.25"}).out);
  const auto y2 = parse_csv(run({"pantograph", "--a", "0", "--b", "1", "--q", "1/2", "--terms", "20", "--t-end", "1",
                                 "--t-step", "0.25"}).out);
  ASSERT_EQ(rows.size(), y1.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], y1[i][1]);
    EXPECT_EQ(rows[i][2], y2[i][1]);
  }
}

TEST(Cli, StabilityReports) {
  auto verdicts = [](const std::vector<std::string>& args) { return nlohmann::json::parse(run(args).out); };
  EXPECT_EQ(verdicts({"stability", "--a", "-2", "--b", "1"})["sum_criterion"]["verdict"], "stable");
  EXPECT_EQ(verdicts({"stability", "--a", "1", "--b", "0.5"})["sum_criterion"]["verdict"], "not-concluded");
  const auto j = verdicts({"stability", "--a", "-2", "--b", "1", "--tau", "0.5"});
  EXPECT_EQ(j["char_root"]["method"], "lambert-w");
  EXPECT_EQ(j["char_root"]["verdict"], "stable");
  EXPECT_LT(j["char_root"]["rightmost_root"]["re"].get<double>(), 0.0);
}

TEST(Cli, CompareAgainstSine) {
  const auto r = run({"compare", "--problem", data("example1.json"), "--ref", "sin", "--t-end", "1", "--t-step", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(r.out, &header);
  EXPECT_EQ(header, "t,y,ref,abs_err");
  EXPECT_EQ(rows.size(), 21u);
  const auto pos = r.out.find("max_abs_err=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r.out.substr(pos + 12)), 1e-9);
}

TEST(Cli, CompareSeriesWithItself) {
  const auto r = run({"compare", "--series", data("adm_vim_ham.json"), "--ref", "file:" + data("adm_vim_ham.json"),
                      "--t-end", "8", "--t-step", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max_abs_err=0\n"), std::string::npos);
}

TEST(Cli, PublishedSeriesWorseThanSamAtEight) {
  auto err_at_8 = [](std::vector<std::string> args) {
    args.insert(args.end(), {"--ref", "sin", "--t-start", "8", "--t-end", "8"});
    const auto r = run(args);
    return std::stod(r.out.substr(r.out.find("max_abs_err=") + 12));
  };
  const double sam = err_at_8({"compare", "--problem", data("example1.json")});
  const double adm = err_at_8({"compare", "--series", data("adm_vim_ham.json")});
  EXPECT_LT(sam, adm);
}

TEST(Cli, FractionalGridMustStartAtZero) {
  EXPECT_EQ(run({"pantograph", "--alpha", "1/2", "--t-start", "-1", "--t-end", "1"}).code, 2);
  EXPECT_EQ(run({"pantograph", "--alpha", "1/2", "--t-start", "0", "--t-end", "1"}).code, 0);
}

TEST(Cli, BadGridAndUsage) {
  EXPECT_EQ(run({"pantograph", "--t-end", "1", "--t-step", "0"}).code, 2);
  EXPECT_EQ(run({"pantograph", "--t-start", "2", "--t-end", "1"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, JsonGridFormat) {
  const auto r = run({"pantograph", "--t-end", "1", "--t-step", "0.5", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["t"].size(), 3u);
  EXPECT_EQ(j["y"][0], 1.0);
}
