#include "kelly/serialization.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "csv.hpp"
#include "kelly/error.hpp"

namespace kelly {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* key) {
  if (!doc.is_object()) throw InputError("expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get_as(const json& doc, const char* key) {
  try {
    return field(doc, key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

std::string_view condition_name(Condition c) {
  return c == Condition::equality ? "equality" : "inequality";
}

Condition parse_condition(const std::string& s) {
  if (s == "equality") return Condition::equality;
  if (s == "inequality") return Condition::inequality;
  throw InputError("unknown condition '" + s + "'");
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) return line;
  }
  return {};
}

}  // namespace

std::string format_double(double value) { return fmt::format("{}", value); }

Vector parse_number_list(std::string_view text) {
  Vector out;
  for (const auto cell : detail::split_csv_line(text)) {
    out.push_back(detail::parse_number(cell, "number list"));
  }
  return out;
}

JointReturnDistribution distribution_from_json(const json& doc) {
  auto scenarios = get_as<std::vector<Vector>>(doc, "scenarios");
  auto probabilities = get_as<Vector>(doc, "probabilities");
  std::vector<std::string> assets;
  if (doc.contains("assets")) assets = get_as<std::vector<std::string>>(doc, "assets");
  return JointReturnDistribution(std::move(scenarios), std::move(probabilities), std::move(assets));
}

JointReturnDistribution load_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open distribution file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return distribution_from_json(doc);
}

json to_json(const JointReturnDistribution& dist) {
  json scenarios = json::array();
  for (std::size_t s = 0; s < dist.scenario_count(); ++s) {
    const auto row = dist.scenario(s);
    scenarios.push_back(Vector(row.begin(), row.end()));
  }
  return {{"assets", dist.asset_names()},
          {"scenarios", std::move(scenarios)},
          {"probabilities", dist.probabilities()}};
}

json to_json(const OptimizationResult& result) {
  return {{"weights", result.weights.vector()},
          {"optimal_value", result.optimal_value},
          {"iterations", result.iterations},
          {"kkt_residual", result.kkt_residual},
          {"converged", result.converged}};
}

OptimizationResult optimization_result_from_json(const json& doc) {
  return {PortfolioWeights(get_as<Vector>(doc, "weights")), get_as<double>(doc, "optimal_value"),
          get_as<int>(doc, "iterations"), get_as<double>(doc, "kkt_residual"),
          get_as<bool>(doc, "converged")};
}

json to_json(const OptimalityCertificate& cert) {
  json ratios = json::array();
  json conditions = json::array();
  json residuals = json::array();
  json satisfied = json::array();
  for (const auto& a : cert.assets) {
    ratios.push_back(a.ratio);
    conditions.push_back(condition_name(a.condition));
    residuals.push_back(a.residual);
    satisfied.push_back(a.satisfied);
  }
  return {{"ratios", std::move(ratios)},       {"conditions", std::move(conditions)},
          {"residuals", std::move(residuals)}, {"satisfied", std::move(satisfied)},
          {"max_residual", cert.max_residual}, {"pass", cert.pass},
          {"tolerance", cert.tolerance},       {"support_epsilon", cert.support_epsilon}};
}

OptimalityCertificate certificate_from_json(const json& doc) {
  const auto ratios = get_as<Vector>(doc, "ratios");
  const auto conditions = get_as<std::vector<std::string>>(doc, "conditions");
  const auto residuals = get_as<Vector>(doc, "residuals");
  const auto satisfied = get_as<std::vector<bool>>(doc, "satisfied");
  if (conditions.size() != ratios.size() || residuals.size() != ratios.size() ||
      satisfied.size() != ratios.size()) {
    throw InputError("certificate: per-asset arrays differ in length");
  }
  OptimalityCertificate cert;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    cert.assets.push_back({ratios[i], parse_condition(conditions[i]), residuals[i], satisfied[i]});
  }
  cert.max_residual = get_as<double>(doc, "max_residual");
  cert.pass = get_as<bool>(doc, "pass");
  cert.tolerance = get_as<double>(doc, "tolerance");
  cert.support_epsilon = get_as<double>(doc, "support_epsilon");
  return cert;
}

json to_json(const DominanceReport& report) {
  json dominant = nullptr;
  if (report.dominant) dominant = *report.dominant;
  return {{"ratios", report.ratios}, {"dominant", dominant}, {"tolerance", report.tolerance}};
}

DominanceReport dominance_report_from_json(const json& doc) {
  DominanceReport report;
  report.ratios = get_as<std::vector<Vector>>(doc, "ratios");
  const auto& dominant = field(doc, "dominant");
  if (!dominant.is_null()) report.dominant = get_as<std::size_t>(doc, "dominant");
  report.tolerance = get_as<double>(doc, "tolerance");
  return report;
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleSummaryRow>& rows) {
  out << "n,mean,max,violation_fraction\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.mean) << ',' << format_double(r.max) << ','
        << format_double(r.violation_fraction) << '\n';
  }
}

std::vector<EnsembleSummaryRow> read_ensemble_csv(std::istream& in) {
  const std::string header = next_data_line(in);
  if (detail::trim(header) != "n,mean,max,violation_fraction") {
    throw InputError("ensemble csv: unexpected header");
  }
  std::vector<EnsembleSummaryRow> rows;
  std::string line;
  while (!(line = next_data_line(in)).empty()) {
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4) throw InputError("ensemble csv: expected 4 columns");
    EnsembleSummaryRow row;
    row.n = static_cast<std::size_t>(detail::parse_number(cells[0], "ensemble csv n"));
    row.mean = detail::parse_number(cells[1], "ensemble csv mean");
    row.max = detail::parse_number(cells[2], "ensemble csv max");
    row.violation_fraction = detail::parse_number(cells[3], "ensemble csv violation_fraction");
    rows.push_back(row);
  }
  return rows;
}

BacktestTable to_table(const BacktestResult& result) {
  BacktestTable table;
  table.dates = result.dates;
  table.values = result.values;
  const std::size_t m = result.assets.size();
  for (const auto& signal : result.signals) {
    table.weights.push_back(signal ? signal->vector() : Vector(m, 0.0));
  }
  table.baselines = result.baselines;
  return table;
}

void write_backtest_csv(std::ostream& out, const BacktestResult& result) {
  const BacktestTable table = to_table(result);
  const std::size_t m = result.assets.size();
  out << "date,V";
  for (std::size_t i = 0; i < m; ++i) out << ",K_" << (i + 1);
  for (const auto& b : table.baselines) out << ',' << b.name;
  out << '\n';
  for (std::size_t k = 0; k < table.dates.size(); ++k) {
    out << table.dates[k] << ',' << format_double(table.values[k]);
    for (double w : table.weights[k]) out << ',' << format_double(w);
    for (const auto& b : table.baselines) out << ',' << format_double(b.values[k]);
    out << '\n';
  }
}

BacktestTable read_backtest_csv(std::istream& in) {
  const std::string header_line = next_data_line(in);
  const auto header = detail::split_csv_line(header_line);
  if (header.size() < 2 || header[0] != "date" || header[1] != "V") {
    throw InputError("result csv: header must start with date,V");
  }
  std::size_t m = 0;
  while (2 + m < header.size() && header[2 + m] == "K_" + std::to_string(m + 1)) ++m;

  BacktestTable table;
  for (std::size_t c = 2 + m; c < header.size(); ++c) table.baselines.push_back({std::string(header[c]), {}});

  std::string line;
  while (!(line = next_data_line(in)).empty()) {
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) throw InputError("result csv: ragged row");
    table.dates.emplace_back(cells[0]);
    table.values.push_back(detail::parse_number(cells[1], "result csv V"));
    Vector w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = detail::parse_number(cells[2 + i], "result csv K");
    table.weights.push_back(std::move(w));
    for (std::size_t b = 0; b < table.baselines.size(); ++b) {
      table.baselines[b].values.push_back(detail::parse_number(cells[2 + m + b], "result csv baseline"));
    }
  }
  return table;
}

json to_json(const BacktestSummary& summary) {
  return {{"initial_value", summary.initial_value},
          {"final_value", summary.final_value},
          {"total_return", summary.total_return},
          {"mean_log_growth", summary.mean_log_growth},
          {"window", summary.window},
          {"warmup", summary.warmup},
          {"trading_steps", summary.trading_steps},
          {"fallback", std::string(to_string(summary.fallback))}};
}

BacktestSummary backtest_summary_from_json(const json& doc) {
  BacktestSummary s;
  s.initial_value = get_as<double>(doc, "initial_value");
  s.final_value = get_as<double>(doc, "final_value");
  s.total_return = get_as<double>(doc, "total_return");
  s.mean_log_growth = get_as<double>(doc, "mean_log_growth");
  s.window = get_as<std::size_t>(doc, "window");
  s.warmup = get_as<std::size_t>(doc, "warmup");
  s.trading_steps = get_as<std::size_t>(doc, "trading_steps");
  s.fallback = parse_fallback(get_as<std::string>(doc, "fallback"));
  return s;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw InputError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at " + path.string());
  }
}

}  // namespace kelly
