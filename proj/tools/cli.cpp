#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>
#include <sstream>

#include "kelly/asymptotics.hpp"
#include "kelly/backtest.hpp"
#include "kelly/certificates.hpp"
#include "kelly/error.hpp"
#include "kelly/returns_model.hpp"
#include "kelly/serialization.hpp"
#include "kelly/solver.hpp"

namespace kelly::cli {

namespace {

using nlohmann::json;

PortfolioWeights weights_arg(const std::string& text, const char* flag,
                             const JointReturnDistribution& dist) {
  PortfolioWeights w = [&] {
    try {
      return PortfolioWeights(parse_number_list(text));
    } catch (const InputError& e) {
      throw InputError(std::string(flag) + ": " + e.what());
    }
  }();
  if (w.size() != dist.asset_count()) {
    throw InputError(std::string(flag) + ": expected " + std::to_string(dist.asset_count()) +
                     " weights, got " + std::to_string(w.size()));
  }
  return w;
}

void emit(const CommandConfig& config, std::ostream& out, const std::string& text) {
  if (config.out_path) {
    write_file_atomic(*config.out_path, text);
  } else {
    out << text;
  }
}

void emit_json(const CommandConfig& config, std::ostream& out, const json& doc) {
  emit(config, out, doc.dump(2) + "\n");
}

void run_solve(const CommandConfig& config, std::ostream& out) {
  const auto dist = load_distribution(config.dist_path);
  SolveOptions opts;
  opts.kkt_tolerance = config.kkt_tol;
  opts.max_iterations = config.max_iters;
  const auto compound = compound_exact(dist, config.n, opts.enumeration_cap);
  const auto result = solve(compound, opts);
  const auto cert = kkt_certify(compound, result.weights, config.tol);

  json doc = to_json(result);
  doc["assets"] = dist.asset_names();
  doc["n"] = config.n;
  doc["certificate"] = to_json(cert);
  emit_json(config, out, doc);
}

void run_certify(const CommandConfig& config, std::ostream& out) {
  const auto dist = load_distribution(config.dist_path);
  const auto weights = weights_arg(config.weights, "--weights", dist);
  const auto compound = compound_exact(dist, config.n);
  json doc = to_json(kkt_certify(compound, weights, config.tol));
  doc["assets"] = dist.asset_names();
  doc["n"] = config.n;
  doc["weights"] = weights.vector();
  emit_json(config, out, doc);
}

void run_dominance(const CommandConfig& config, std::ostream& out) {
  const auto dist = load_distribution(config.dist_path);
  const auto report = find_dominant(dist, config.tol);
  json doc = to_json(report);
  doc["assets"] = dist.asset_names();
  doc["dominant_asset"] = report.dominant ? json(dist.asset_names()[*report.dominant]) : json(nullptr);
  emit_json(config, out, doc);
}

void run_simulate(const CommandConfig& config, std::ostream& out) {
  const auto dist = load_distribution(config.dist_path);
  const auto k = weights_arg(config.k, "--k", dist);
  const auto k_star = weights_arg(config.k_star, "--kstar", dist);
  const auto ensemble =
      simulate_relative_paths(dist, k, k_star, config.horizon, config.paths, config.seed);
  std::ostringstream csv;
  write_ensemble_csv(csv, summarize(ensemble));
  emit(config, out, csv.str());
}

void run_backtest_command(const CommandConfig& config, std::ostream& out) {
  const auto series = load_prices(config.prices_path);
  BacktestConfig bt;
  bt.window = config.window;
  bt.initial_value = config.v0;
  bt.fallback = parse_fallback(config.fallback);
  bt.riskless_index = config.riskless_index;
  const auto result = run_backtest(series, bt);

  std::ostringstream csv;
  write_backtest_csv(csv, result);
  json summary = to_json(result.summary);
  summary["assets"] = result.assets;
  json baselines = json::object();
  for (const auto& b : result.baselines) baselines[b.name] = b.values.back();
  summary["baseline_final_values"] = std::move(baselines);

  const auto dir = config.out_path.value();
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "result.csv", csv.str());
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << "wrote " << (dir / "result.csv").string() << " and " << (dir / "summary.json").string()
      << "\n";
}

}  // namespace

ExitCode dispatch(const CommandConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == "solve") {
      run_solve(config, out);
    } else if (config.subcommand == "certify") {
      run_certify(config, out);
    } else if (config.subcommand == "dominance") {
      run_dominance(config, out);
    } else if (config.subcommand == "simulate") {
      run_simulate(config, out);
    } else if (config.subcommand == "backtest") {
      run_backtest_command(config, out);
    } else {
      err << "error: unknown subcommand '" << config.subcommand << "'\n";
      return ExitCode::input_error;
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return ExitCode::input_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::domain_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return ExitCode::input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::domain_error;
  }
  return ExitCode::ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommandConfig config;
  CLI::App app{"Frequency-based Kelly portfolio tools", "kelly"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "Kelly-optimal weights for a scenario model");
  solve_cmd->add_option("--dist", config.dist_path, "Scenario model JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--n", config.n, "Steps between rebalancings")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_option("--kkt-tol", config.kkt_tol, "Optimizer stopping residual")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", config.max_iters, "Iteration limit")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--tol", config.tol, "Certificate tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", config.out_path, "Output file (default stdout)");

  auto* certify_cmd = app.add_subcommand("certify", "Check optimality conditions at given weights");
  certify_cmd->add_option("--dist", config.dist_path)->required()->check(CLI::ExistingFile);
  certify_cmd->add_option("--weights", config.weights, "Comma-separated weights")->required();
  certify_cmd->add_option("--n", config.n)->required()->check(CLI::PositiveNumber);
  certify_cmd->add_option("--tol", config.tol)->check(CLI::PositiveNumber);
  certify_cmd->add_option("--out", config.out_path);

  auto* dominance_cmd = app.add_subcommand("dominance", "Pairwise dominant-asset test");
  dominance_cmd->add_option("--dist", config.dist_path)->required()->check(CLI::ExistingFile);
  dominance_cmd->add_option("--tol", config.tol)->check(CLI::NonNegativeNumber);
  dominance_cmd->add_option("--out", config.out_path);

  auto* simulate_cmd = app.add_subcommand("simulate", "Relative log-growth path ensemble");
  simulate_cmd->add_option("--dist", config.dist_path)->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--k", config.k, "Comparison weights")->required();
  simulate_cmd->add_option("--kstar", config.k_star, "Reference (optimal) weights")->required();
  simulate_cmd->add_option("--horizon", config.horizon)->required()->check(CLI::Range(2, 100'000'000));
  simulate_cmd->add_option("--paths", config.paths)->required()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", config.seed)->required();
  simulate_cmd->add_option("--out", config.out_path, "Output CSV (default stdout)");

  auto* backtest_cmd = app.add_subcommand("backtest", "Dominant-ratio trading backtest");
  backtest_cmd->add_option("--prices", config.prices_path)->required()->check(CLI::ExistingFile);
  backtest_cmd->add_option("--window", config.window)->required()->check(CLI::PositiveNumber);
  backtest_cmd->add_option("--fallback", config.fallback)
      ->check(CLI::IsMember({"hold", "riskless", "flat"}));
  backtest_cmd->add_option("--riskless-index", config.riskless_index, "0-based asset column");
  backtest_cmd->add_option("--v0", config.v0)->check(CLI::PositiveNumber);
  backtest_cmd->add_option("--out", config.out_path, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ExitCode::input_error);
  }

  for (auto* sub : app.get_subcommands()) config.subcommand = sub->get_name();
  return static_cast<int>(dispatch(config, out, err));
}

}  // namespace kelly::cli
