// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   acceptance_suite --cli <path to rsel> --scratch <dir> [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "rsel/harness.hpp"
#include "rsel/optimality.hpp"
#include "rsel/policies.hpp"
#include "rsel/problems.hpp"

namespace fs = std::filesystem;
using namespace rsel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr PolicyKind kMaps[] = {PolicyKind::APCS_B, PolicyKind::AEOC_B, PolicyKind::APCS_S};

Outcome from_suite(const std::vector<oracle::CheckResult>& results) {
  Outcome o{true, ""};
  for (const auto& r : results) {
    o.pass = o.pass && r.pass;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += r.name + ": " + r.detail;
  }
  return o;
}

Outcome special_functions() { return from_suite(oracle::special_function_suite()); }

Outcome optimality_solver() { return from_suite(oracle::optimality_suite(10)); }

// Residuals of the replication-averaged allocation at both checkpoints.
Outcome theorem2_convergence() {
  constexpr std::int64_t kEarly = 2000, kLate = 50000;
  ExperimentConfig cfg;
  cfg.problem = IncreasingMeans{};
  cfg.policies.assign(std::begin(kMaps), std::end(kMaps));
  cfg.run.budget = kLate;
  cfg.run.checkpoints = {kEarly, kLate};
  cfg.checkpoints_explicit = true;
  cfg.replications = 20;
  cfg.base_seed = 3;
  const auto problem = build_problem(cfg.problem);
  for (std::size_t i = 0; i < problem.size(); ++i) cfg.tracked_designs.push_back(i);

  Outcome o{true, ""};
  for (const auto& curve : estimate_curves(cfg)) {
    Residuals r[2];
    for (int k = 0; k < 2; ++k) {
      std::vector<double> frac;
      for (const auto& a : curve.points[k].alloc) frac.push_back(a.fraction);
      r[k] = residuals(frac, problem.true_means, problem.true_sds);
    }
    const double b0 = std::fabs(r[0].balance), b1 = std::fabs(r[1].balance);
    const double g0 = r[0].max_rate_gap, g1 = r[1].max_rate_gap;
    const bool ok = b1 < 0.05 && g1 < 0.05 && b1 < b0 / 5 && g1 < g0 / 5;
    o.pass = o.pass && ok;
    o.detail += fmt("%s balance %.4f->%.4f gap %.4f->%.4f; ", std::string(to_string(curve.policy)).c_str(),
                    b0, b1, g0, g1);
  }
  return o;
}

Outcome theorem1_consistency() {
  const auto problem = build_problem(IncreasingMeans{});
  RunConfig run;
  run.budget = 20000;
  run.checkpoints = {run.budget};
  Outcome o{true, ""};
  for (auto kind : kMaps) {
    std::int64_t smallest = run.budget;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto traj = run_procedure(problem, kind, run, mix_seed(11, seed));
      const auto& counts = traj.records.back().counts;
      smallest = std::min(smallest, *std::min_element(counts.begin(), counts.end()));
    }
    o.pass = o.pass && smallest >= 100;
    o.detail += fmt("%s min N_i %lld; ", std::string(to_string(kind)).c_str(),
                    static_cast<long long>(smallest));
  }
  return o;
}

Outcome table1_reproduction() {
  ExperimentConfig cfg;
  cfg.problem = RosenbrockGrid{};
  cfg.policies = {PolicyKind::APCS_B, PolicyKind::AEOC_B, PolicyKind::APCS_S, PolicyKind::OCBA};
  cfg.run.budget = 2500;
  cfg.run.checkpoints = iteration_checkpoints(cfg.run.n0, cfg.run.delta, cfg.run.budget, 25);
  cfg.replications = 500;
  cfg.base_seed = 1;
  const double target = 0.90;
  const auto rows = budget_to_target(cfg, std::span<const double>(&target, 1));

  auto budget_of = [&](PolicyKind k) -> std::int64_t {
    for (const auto& r : rows)
      if (r.policy == k) return r.budget.value_or(-1);
    return -1;
  };
  const auto ocba = budget_of(PolicyKind::OCBA);
  const auto apcs_b = budget_of(PolicyKind::APCS_B);
  bool ordering = ocba > 0;
  std::string detail;
  for (auto k : kMaps) {
    const auto b = budget_of(k);
    ordering = ordering && b > 0 && b < ocba;
    detail += fmt("%s %lld, ", std::string(to_string(k)).c_str(), static_cast<long long>(b));
  }
  detail += fmt("OCBA %lld (ranges APCS-B [420,710], OCBA [590,980])", static_cast<long long>(ocba));
  const bool magnitude = apcs_b >= 420 && apcs_b <= 710 && ocba >= 590 && ocba <= 980;
  return {ordering && magnitude, detail};
}

Outcome ocba_fixed_point() {
  const auto problem = build_problem(NormalDesigns{{1, 2, 3}, {2, 2, 2}});
  RunConfig run;
  run.budget = 100000;
  run.checkpoints = {run.budget};
  run.ocba_true_parameters = true;
  const auto traj = run_procedure(problem, PolicyKind::OCBA, run, 5);
  const double expected[] = {0.1096, 0.4384, 0.4520};
  const auto& counts = traj.records.back().counts;
  double worst = 0.0;
  std::string detail = "fractions";
  for (std::size_t i = 0; i < 3; ++i) {
    const double f = static_cast<double>(counts[i]) / run.budget;
    worst = std::max(worst, std::fabs(f - expected[i]));
    detail += fmt(" %.4f", f);
  }
  return {worst <= 0.01, detail + fmt(", max deviation %.4f (limit 0.01)", worst)};
}

Outcome analytic_pcs() {
  ExperimentConfig cfg;
  cfg.problem = NormalDesigns{{0, 3}, {1, 1}};
  cfg.policies = {PolicyKind::EQUAL};
  cfg.run.budget = 18;
  cfg.run.checkpoints = {18};
  cfg.replications = 500;
  cfg.base_seed = 7;
  const double pcs = estimate_curves(cfg).front().points.back().pcs;
  const double p = oracle::normal_cdf_mp(3.0 / std::sqrt(2.0 / 9.0));
  const double band = 3.0 * std::sqrt(p * (1 - p) / cfg.replications);
  const bool ok = std::fabs(pcs - p) <= band;
  return {ok, fmt("MC PCS %.4f, analytic %.12f, 3-sigma band %.2e", pcs, p, band)};
}

Outcome determinism(const fs::path& cli, const fs::path& scratch) {
  fs::create_directories(scratch);
  const auto cfg_path = scratch / "determinism.cfg";
  {
    std::ofstream out(cfg_path);
    out << R"({
  "problem": {"type": "goldstein_price_grid"},
  "policies": ["APCS-B", "AEOC-B", "APCS-S", "OCBA", "EA"],
  "run": {"budget": 300, "checkpoint_every": 25},
  "replications": 40,
  "base_seed": 17,
  "tracked_designs": [7, 12, 18]
})";
  }
  auto run = [&](unsigned workers) {
    const auto out = scratch / ("determinism_w" + std::to_string(workers) + ".csv");
    const std::string cmd = "\"" + cli.string() + "\" run-curves --config \"" + cfg_path.string() +
                            "\" --out \"" + out.string() + "\" --workers " +
                            std::to_string(workers) + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return std::make_pair(rc, s.str());
  };
  const auto [rc1, a] = run(1);
  const auto [rc4, b] = run(4);
  const bool ok = rc1 == 0 && rc4 == 0 && !a.empty() && a == b;
  return {ok, fmt("exit codes %d/%d, %zu vs %zu bytes, identical: %s", rc1, rc4, a.size(), b.size(),
                  a == b ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli, scratch = "acceptance_scratch";
  int only = 0;
  app.add_option("--cli", cli, "Path to the rsel executable")->required();
  app.add_option("--scratch", scratch, "Directory for temporary files");
  app.add_option("--only", only, "Run a single criterion (1-8)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"special-function oracle suite", special_functions},
      {"optimality solver vs brute force", optimality_solver},
      {"allocation converges to the optimality conditions", theorem2_convergence},
      {"every design sampled infinitely often (min N_i >= 100)", theorem1_consistency},
      {"Rosenbrock budget to PCS 0.90", table1_reproduction},
      {"OCBA fixed point with true parameters", ocba_fixed_point},
      {"analytic PCS of equal allocation", analytic_pcs},
      {"run-curves deterministic across worker counts",
       [&] { return determinism(cli, scratch); }},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first
              << " [" << fmt("%.1fs", secs) << "] -- " << o.detail << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
