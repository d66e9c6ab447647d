#include "kelly/serialization.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kelly/error.hpp"
#include "support/models.hpp"

namespace kelly {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kelly_serialization_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(ParseNumberList, Examples) {
  EXPECT_EQ(parse_number_list("0.5,0.5"), (Vector{0.5, 0.5}));
  EXPECT_EQ(parse_number_list(" 1 , 0 ,0"), (Vector{1, 0, 0}));
  EXPECT_THROW(parse_number_list(""), InputError);
  EXPECT_THROW(parse_number_list("0.5,,0.5"), InputError);
  EXPECT_THROW(parse_number_list("half,half"), InputError);
}

TEST(DistributionJson, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dist = testing::random_model(rng);
    const auto back = distribution_from_json(json::parse(to_json(dist).dump()));
    ASSERT_EQ(back.scenario_count(), dist.scenario_count());
    EXPECT_EQ(back.asset_names(), dist.asset_names());
    for (std::size_t s = 0; s < dist.scenario_count(); ++s) {
      EXPECT_EQ(back.probability(s), dist.probability(s));
      for (std::size_t i = 0; i < dist.asset_count(); ++i) {
        EXPECT_EQ(back.scenario(s)[i], dist.scenario(s)[i]);
      }
    }
  }
}

TEST(DistributionJson, SchemaErrorsNameTheField) {
  try {
    distribution_from_json(json::parse(R"({"scenarios": [[0.1]]})"));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("probabilities"), std::string::npos);
  }
  EXPECT_THROW(distribution_from_json(json::parse(R"({"scenarios": "x", "probabilities": [1]})")),
               InputError);
  EXPECT_THROW(distribution_from_json(json::parse(R"({"scenarios": [[-1.0]], "probabilities": [1]})")),
               InputError);
  EXPECT_THROW(distribution_from_json(json::parse("[1, 2]")), InputError);
}

TEST(DistributionJson, LoadFixtureAndErrors) {
  const auto dist = load_distribution(std::string(KELLY_TEST_DATA_DIR) + "/stock_cash.json");
  EXPECT_EQ(dist.asset_names(), (std::vector<std::string>{"stock", "cash"}));
  EXPECT_THROW(load_distribution("/nonexistent/model.json"), InputError);

  const auto dir = scratch_dir("load");
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(load_distribution(dir / "broken.json"), InputError);
}

TEST(ResultJson, RoundTrips) {
  const OptimizationResult result{PortfolioWeights({2.0 / 3.0, 1.0 / 3.0}), 0.0322693, 17, 3e-10, true};
  const auto back = optimization_result_from_json(json::parse(to_json(result).dump()));
  EXPECT_EQ(back.weights, result.weights);
  EXPECT_EQ(back.optimal_value, result.optimal_value);
  EXPECT_EQ(back.iterations, 17);
  EXPECT_EQ(back.kkt_residual, 3e-10);
  EXPECT_TRUE(back.converged);

  const auto c = compound_exact(testing::stock_cash(), 2);
  const auto cert = kkt_certify(c, PortfolioWeights({0.9, 0.1}));
  EXPECT_EQ(certificate_from_json(json::parse(to_json(cert).dump())), cert);

  const auto report = find_dominant(testing::deterministic({0.0, 0.2, 0.1}));
  EXPECT_EQ(dominance_report_from_json(json::parse(to_json(report).dump())), report);
  const auto none = find_dominant(testing::stock_cash());
  const auto none_json = to_json(none);
  EXPECT_TRUE(none_json["dominant"].is_null());
  EXPECT_EQ(dominance_report_from_json(none_json), none);
}

TEST(EnsembleCsv, RoundTrip) {
  const auto ens = simulate_relative_paths(testing::stock_cash(), PortfolioWeights({1, 0}),
                                           PortfolioWeights({2.0 / 3.0, 1.0 / 3.0}), 200, 20, 5);
  const auto rows = summarize(ens);
  std::stringstream buf;
  write_ensemble_csv(buf, rows);
  EXPECT_EQ(buf.str().substr(0, 31), "n,mean,max,violation_fraction\n1");
  EXPECT_EQ(read_ensemble_csv(buf), rows);

  std::istringstream wrong("n,mean\n1,2\n");
  EXPECT_THROW(read_ensemble_csv(wrong), InputError);
}

TEST(BacktestCsv, RoundTrip) {
  const auto series = load_prices(std::string(KELLY_TEST_DATA_DIR) + "/synthetic_3asset.csv");
  BacktestConfig config;
  const auto result = run_backtest(series, config);
  std::stringstream buf;
  write_backtest_csv(buf, result);
  std::string header;
  std::getline(std::istringstream(buf.str()) >> std::ws, header);
  EXPECT_EQ(header, "date,V,K_1,K_2,K_3,BH_VT,BH_BND,BH_BNDX,BH_equal");
  EXPECT_EQ(read_backtest_csv(buf), to_table(result));

  const auto summary = to_json(result.summary);
  EXPECT_EQ(backtest_summary_from_json(json::parse(summary.dump())), result.summary);
  EXPECT_EQ(summary["fallback"], "hold-previous");
}

TEST(WriteFileAtomic, ReplacesAndLeavesNoTemporary) {
  const auto dir = scratch_dir("atomic");
  const auto target = dir / "out.json";
  write_file_atomic(target, "first");
  write_file_atomic(target, "second");
  std::ifstream in(target);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, "second");
  EXPECT_FALSE(fs::exists(dir / "out.json.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "out.json", "x"), InputError);
}

}  // namespace
}  // namespace kelly
