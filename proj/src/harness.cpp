#include "rsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rsel/errors.hpp"

namespace rsel {
namespace {

// What one replication contributes to the curves, one entry per checkpoint.
struct ReplicationSummary {
  std::vector<char> correct;
  std::vector<double> opportunity_cost;
  std::vector<double> tracked_fraction;  // checkpoint-major
};

ReplicationSummary summarize(const Trajectory& t, const Problem& problem,
                             std::span<const std::size_t> tracked) {
  ReplicationSummary s;
  s.correct.reserve(t.records.size());
  s.opportunity_cost.reserve(t.records.size());
  s.tracked_fraction.reserve(t.records.size() * tracked.size());
  for (const auto& rec : t.records) {
    s.correct.push_back(rec.estimated_best == problem.best ? 1 : 0);
    s.opportunity_cost.push_back(problem.true_means[problem.best] -
                                 problem.true_means[rec.estimated_best]);
    for (std::size_t d : tracked)
      s.tracked_fraction.push_back(static_cast<double>(rec.counts[d]) /
                                   static_cast<double>(rec.total));
  }
  return s;
}

template <typename Job>
void run_parallel(std::size_t jobs, unsigned workers, Job job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        job(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("policies", "at least one policy is required");
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  Problem p;
  try {
    p = build_problem(problem);
  } catch (const DomainError& e) {
    throw ConfigError("problem", e.what());
  }
  const auto m = static_cast<std::int64_t>(p.size());
  if (run.n0 < 2) throw ConfigError("run.n0", "must be >= 2");
  if (run.delta < 1) throw ConfigError("run.delta", "must be >= 1");
  if (run.budget < run.n0 * m)
    throw ConfigError("run.budget", "must be >= n0 * M = " + std::to_string(run.n0 * m));
  if (!(run.psi_nu_floor > 1.0)) throw ConfigError("run.psi_nu_floor", "must be > 1");
  try {
    run.validate(p.size());
  } catch (const DomainError& e) {
    throw ConfigError("run.checkpoints", e.what());
  }
  for (std::size_t d : tracked_designs)
    if (d >= p.size())
      throw ConfigError("tracked_designs", "design " + std::to_string(d + 1) + " out of range");
}

std::uint64_t replication_seed(std::uint64_t base_seed, PolicyKind policy, std::int64_t r) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(policy) + 1,
                  static_cast<std::uint64_t>(r));
}

std::vector<PolicyCurve> estimate_curves(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Problem problem = build_problem(config.problem);
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t policies = config.policies.size();
  std::vector<ReplicationSummary> results(policies * reps);

  run_parallel(results.size(), workers, [&](std::size_t job) {
    const PolicyKind kind = config.policies[job / reps];
    const auto r = static_cast<std::int64_t>(job % reps);
    const auto t = run_procedure(problem, kind, config.run,
                                 replication_seed(config.base_seed, kind, r));
    results[job] = summarize(t, problem, config.tracked_designs);
  });

  // Reduce in replication order so sums are independent of scheduling.
  const auto& cps = config.run.checkpoints;
  const std::size_t tracked = config.tracked_designs.size();
  std::vector<PolicyCurve> curves;
  for (std::size_t p = 0; p < policies; ++p) {
    PolicyCurve curve{config.policies[p], {}};
    for (std::size_t c = 0; c < cps.size(); ++c) {
      std::int64_t hits = 0;
      double cost = 0.0;
      std::vector<double> frac(tracked, 0.0);
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& s = results[p * reps + r];
        hits += s.correct[c];
        cost += s.opportunity_cost[c];
        for (std::size_t k = 0; k < tracked; ++k) frac[k] += s.tracked_fraction[c * tracked + k];
      }
      CurvePoint pt;
      pt.budget = cps[c];
      pt.pcs = static_cast<double>(hits) / static_cast<double>(reps);
      pt.eoc = cost / static_cast<double>(reps);
      for (std::size_t k = 0; k < tracked; ++k)
        pt.alloc.push_back({config.tracked_designs[k], frac[k] / static_cast<double>(reps)});
      curve.points.push_back(std::move(pt));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<TargetBudgetRow> budget_to_target(std::span<const PolicyCurve> curves,
                                              std::span<const double> targets) {
  if (targets.empty()) throw DomainError("targets must not be empty");
  std::vector<TargetBudgetRow> rows;
  for (const auto& curve : curves) {
    for (double target : targets) {
      TargetBudgetRow row{curve.policy, target, std::nullopt};
      const auto it = std::find_if(curve.points.begin(), curve.points.end(),
                                   [target](const CurvePoint& p) { return p.pcs >= target; });
      if (it != curve.points.end()) row.budget = it->budget;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<TargetBudgetRow> budget_to_target(const ExperimentConfig& config,
                                              std::span<const double> targets, unsigned workers) {
  if (targets.empty()) throw DomainError("targets must not be empty");
  const auto curves = estimate_curves(config, workers);
  return budget_to_target(curves, targets);
}

std::vector<CurveRow> curve_rows(std::span<const PolicyCurve> curves) {
  std::vector<CurveRow> rows;
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      if (pt.alloc.empty()) {
        rows.push_back({curve.policy, pt.budget, pt.pcs, pt.eoc, std::nullopt, std::nullopt});
        continue;
      }
      for (const auto& a : pt.alloc)
        rows.push_back({curve.policy, pt.budget, pt.pcs, pt.eoc, a.design + 1, a.fraction});
    }
  }
  return rows;
}

}  // namespace rsel
