#include "cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kelly/serialization.hpp"

namespace kelly::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kData = KELLY_TEST_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kelly_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, SolveStockCash) {
  const auto r = invoke({"solve", "--dist", kData + "/stock_cash.json", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc["weights"][0].get<double>(), 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(doc["optimal_value"].get<double>(), 0.03227, 1e-5);
  EXPECT_TRUE(doc["certificate"]["pass"].get<bool>());
  EXPECT_EQ(doc["assets"], json({"stock", "cash"}));
}

TEST(Cli, CertifyFailureIsStillSuccess) {
  const auto r = invoke({"certify", "--dist", kData + "/stock_cash.json", "--weights", "0.9,0.1",
                         "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(r.out)["pass"].get<bool>());
}

TEST(Cli, CertifyWeightErrors) {
  const auto wrong_count =
      invoke({"certify", "--dist", kData + "/stock_cash.json", "--weights", "1", "--n", "1"});
  EXPECT_EQ(wrong_count.code, 2);
  EXPECT_NE(wrong_count.err.find("--weights"), std::string::npos);
  const auto not_simplex =
      invoke({"certify", "--dist", kData + "/stock_cash.json", "--weights", "0.7,0.7", "--n", "1"});
  EXPECT_EQ(not_simplex.code, 2);
}

TEST(Cli, DominanceNamesAsset) {
  const auto r = invoke({"dominance", "--dist", kData + "/deterministic_dominant.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["dominant_asset"], "bond20");
  EXPECT_EQ(doc["dominant"], 0);

  const auto none = json::parse(invoke({"dominance", "--dist", kData + "/stock_cash.json"}).out);
  EXPECT_TRUE(none["dominant_asset"].is_null());
}

TEST(Cli, SimulateIsSeeded) {
  const std::vector<std::string> args{"simulate", "--dist", kData + "/stock_cash.json",
                                      "--k", "1,0", "--kstar", "0.6666666666666666,0.3333333333333334",
                                      "--horizon", "50", "--paths", "5", "--seed", "3"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  EXPECT_EQ(read_ensemble_csv(in).size(), 50u);

  auto unseeded = args;
  unseeded.resize(unseeded.size() - 2);
  EXPECT_EQ(invoke(unseeded).code, 2);
}

TEST(Cli, BacktestWritesArtifacts) {
  const auto dir = scratch_dir("backtest");
  const auto r = invoke({"backtest", "--prices", kData + "/synthetic_3asset.csv", "--window", "20",
                         "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(dir / "result.csv");
  const auto table = read_backtest_csv(csv);
  ASSERT_EQ(table.dates.size(), 253u);
  for (const auto& w : table.weights) {
    double sum = 0.0;
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_TRUE(sum == 0.0 || sum == 1.0);
  }
  std::ifstream js(dir / "summary.json");
  const auto summary = json::parse(js);
  EXPECT_EQ(summary["window"], 20);
  EXPECT_EQ(summary["warmup"], 20);
  EXPECT_EQ(summary["fallback"], "hold-previous");
  EXPECT_NEAR(summary["final_value"].get<double>(), table.values.back(), 0.0);
  EXPECT_TRUE(summary["baseline_final_values"].contains("BH_equal"));
}

TEST(Cli, BacktestRisklessFallbackNeedsIndex) {
  const auto dir = scratch_dir("riskless");
  const auto r = invoke({"backtest", "--prices", kData + "/synthetic_3asset.csv", "--window", "20",
                         "--fallback", "riskless", "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir / "result.csv"));
  EXPECT_FALSE(fs::exists(dir / "summary.json"));
}

TEST(Cli, InvalidInputLeavesNoOutput) {
  const auto dir = scratch_dir("invalid");
  std::ofstream(dir / "bad.json") << R"({"scenarios": [[0.1, 0.0]], "probabilities": [0.5]})";
  const auto out = dir / "solution.json";
  const auto r = invoke({"solve", "--dist", (dir / "bad.json").string(), "--n", "1", "--out", out.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("probabilit"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(dir / "solution.json.tmp"));

  std::ofstream(dir / "short.csv") << "date,A,B\n1,1,1\n2,1,1\n3,1,1\n";
  const auto bt = invoke({"backtest", "--prices", (dir / "short.csv").string(), "--window", "5",
                          "--out", (dir / "bt").string()});
  EXPECT_EQ(bt.code, 1);
  EXPECT_FALSE(fs::exists(dir / "bt" / "result.csv"));
}

TEST(Cli, DomainAndParseErrors) {
  // 4 scenarios at n = 10 exceed the enumeration cap.
  const auto dir = scratch_dir("domain");
  std::ofstream(dir / "wide.json")
      << R"({"scenarios": [[0.1, 0], [0.2, 0], [-0.3, 0], [0.4, 0]], "probabilities": [0.25, 0.25, 0.25, 0.25]})";
  EXPECT_EQ(invoke({"solve", "--dist", (dir / "wide.json").string(), "--n", "10"}).code, 1);

  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"solve", "--dist", "/nonexistent.json", "--n", "1"}).code, 2);
  EXPECT_EQ(invoke({"solve", "--dist", kData + "/stock_cash.json", "--n", "0"}).code, 2);
  EXPECT_EQ(invoke({"solve", "--dist", kData + "/stock_cash.json"}).code, 2);
}

TEST(Cli, SolveToFileRoundTrips) {
  const auto dir = scratch_dir("solve_out");
  const auto out = dir / "solution.json";
  ASSERT_EQ(invoke({"solve", "--dist", kData + "/stock_cash.json", "--n", "2", "--out", out.string()}).code, 0);
  std::ifstream in(out);
  const auto doc = json::parse(in);
  const auto result = optimization_result_from_json(doc);
  const auto cert = certificate_from_json(doc["certificate"]);
  EXPECT_TRUE(cert.pass);
  EXPECT_EQ(to_json(result)["weights"], doc["weights"]);
  EXPECT_EQ(doc["n"], 2);
}

}  // namespace
}  // namespace kelly::cli
