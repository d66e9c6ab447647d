#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kelly/asymptotics.hpp"
#include "kelly/backtest.hpp"
#include "kelly/certificates.hpp"
#include "kelly/returns_model.hpp"
#include "kelly/solver.hpp"

namespace kelly {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Comma-separated weights such as "0.5,0.5".
Vector parse_number_list(std::string_view text);

// Scenario model documents:
//   {"assets": [...], "scenarios": [[...], ...], "probabilities": [...]}
JointReturnDistribution distribution_from_json(const nlohmann::json& doc);
JointReturnDistribution load_distribution(const std::filesystem::path& path);
nlohmann::json to_json(const JointReturnDistribution& dist);

nlohmann::json to_json(const OptimizationResult& result);
OptimizationResult optimization_result_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const OptimalityCertificate& cert);
OptimalityCertificate certificate_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DominanceReport& report);
DominanceReport dominance_report_from_json(const nlohmann::json& doc);

// Ensemble summaries: CSV with header n,mean,max,violation_fraction.
void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleSummaryRow>& rows);
std::vector<EnsembleSummaryRow> read_ensemble_csv(std::istream& in);

/// Contents of a backtest result.csv: date, V, K_1..K_m, one column per baseline.
struct BacktestTable {
  std::vector<std::string> dates;
  Vector values;
  std::vector<Vector> weights;  // zeros while uninvested
  std::vector<Baseline> baselines;

  friend bool operator==(const BacktestTable&, const BacktestTable&) = default;
};

BacktestTable to_table(const BacktestResult& result);
void write_backtest_csv(std::ostream& out, const BacktestResult& result);
BacktestTable read_backtest_csv(std::istream& in);

nlohmann::json to_json(const BacktestSummary& summary);
BacktestSummary backtest_summary_from_json(const nlohmann::json& doc);

/// Writes to a temporary sibling file and renames it into place, so readers
/// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace kelly
