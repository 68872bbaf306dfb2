// rsel: command-line front end for the ranking-and-selection laboratory.
//
//   rsel run-curves   --config <path> --out <csv> [--workers N]
//   rsel run-table    --config <path> --targets 0.88,0.90 --out <csv> [--workers N]
//   rsel solve-optimal --means 1,2,3 --sds 2,2,2 [--counts 10,20,30]
//   rsel selftest
//
// Exit codes: 0 success, 2 configuration / usage error, 3 runtime error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "rsel/errors.hpp"
#include "rsel/harness.hpp"
#include "rsel/optimality.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr std::int64_t kCurveCheckpointSpacing = 50;

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void warn_small_n0(const rsel::ExperimentConfig& cfg) {
  if (cfg.run.n0 == 2)
    std::cerr << "warning: n0 = 2 gives Welch degrees of freedom near 1; the psi_loss clamp "
                 "(nu >= "
              << cfg.run.psi_nu_floor << ") will be active in early iterations\n";
}

int run_curves(const std::string& config_path, const std::string& out, unsigned workers) {
  auto cfg = rsel::load_config(config_path);
  if (!cfg.checkpoints_explicit) {
    const auto m = rsel::build_problem(cfg.problem).size();
    cfg.run.checkpoints =
        rsel::spaced_checkpoints(cfg.run.n0, kCurveCheckpointSpacing, cfg.run.budget, m);
  }
  warn_small_n0(cfg);
  const auto curves = rsel::estimate_curves(cfg, workers);
  const auto rows = rsel::curve_rows(curves);
  rsel::write_csv(rows, out);
  return 0;
}

int run_table(const std::string& config_path, const std::vector<double>& targets,
              const std::string& out, unsigned workers) {
  if (targets.empty()) throw rsel::ConfigError("--targets", "at least one target is required");
  const auto cfg = rsel::load_config(config_path);
  warn_small_n0(cfg);
  const auto rows = rsel::budget_to_target(cfg, targets, workers);
  rsel::write_csv(rows, out);
  return 0;
}

int solve_optimal(const std::vector<double>& means, const std::vector<double>& sds,
                  const std::vector<double>& counts) {
  if (means.size() != sds.size())
    throw rsel::ConfigError("--sds", "must have as many entries as --means");
  if (!counts.empty() && counts.size() != means.size())
    throw rsel::ConfigError("--counts", "must have as many entries as --means");
  const auto sol = rsel::solve_optimal_allocation(means, sds);
  const auto opt = rsel::residuals(sol.alpha, means, sds);
  std::cout << "design,alpha\n";
  for (std::size_t i = 0; i < sol.alpha.size(); ++i)
    std::cout << i + 1 << ',' << fmt10(sol.alpha[i]) << '\n';
  std::cout << '\n';
  if (counts.empty()) {
    std::cout << "residual,optimal\n"
              << "balance," << fmt10(opt.balance) << '\n'
              << "max_rate_gap," << fmt10(opt.max_rate_gap) << '\n';
  } else {
    const auto emp = rsel::residuals(counts, means, sds);
    std::cout << "residual,optimal,counts\n"
              << "balance," << fmt10(opt.balance) << ',' << fmt10(emp.balance) << '\n'
              << "max_rate_gap," << fmt10(opt.max_rate_gap) << ',' << fmt10(emp.max_rate_gap)
              << '\n';
  }
  return 0;
}

int selftest() {
  auto results = rsel::oracle::special_function_suite();
  for (auto& r : rsel::oracle::optimality_suite()) results.push_back(std::move(r));
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranking-and-selection sample allocation laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  unsigned workers = 0;
  std::vector<double> targets, means, sds, counts;

  auto* curves = app.add_subcommand("run-curves", "Estimate PCS / EOC / allocation curves");
  curves->add_option("--config", config_path, "Experiment config (JSON)")->required();
  curves->add_option("--out", out_path, "Output CSV")->required();
  curves->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* table = app.add_subcommand("run-table", "Budget needed to reach target PCS values");
  table->add_option("--config", config_path, "Experiment config (JSON)")->required();
  table->add_option("--targets", targets, "Comma-separated PCS targets")
      ->required()
      ->delimiter(',');
  table->add_option("--out", out_path, "Output CSV")->required();
  table->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* solve = app.add_subcommand("solve-optimal", "Optimal allocation and residuals");
  solve->add_option("--means", means, "Comma-separated true means")->required()->delimiter(',');
  solve->add_option("--sds", sds, "Comma-separated true standard deviations")
      ->required()
      ->delimiter(',');
  solve->add_option("--counts", counts, "Empirical counts to diagnose")->delimiter(',');

  auto* self = app.add_subcommand("selftest", "Run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*curves) return run_curves(config_path, out_path, workers);
    if (*table) return run_table(config_path, targets, out_path, workers);
    if (*solve) return solve_optimal(means, sds, counts);
    if (*self) return selftest();
  } catch (const rsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
