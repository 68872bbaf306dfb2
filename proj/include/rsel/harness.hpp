#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "rsel/policies.hpp"
#include "rsel/problems.hpp"

namespace rsel {

struct ExperimentConfig {
  ProblemSpec problem = RosenbrockGrid{};
  std::vector<PolicyKind> policies;
  RunConfig run;
  // False when the config file left checkpoints to the command's default.
  bool checkpoints_explicit = false;
  std::int64_t replications = 1;
  std::uint64_t base_seed = 0;
  // 0-based design indices whose mean sampling fraction is reported.
  std::vector<std::size_t> tracked_designs;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct TrackedAllocation {
  std::size_t design = 0;  // 0-based
  double fraction = 0.0;
};

struct CurvePoint {
  std::int64_t budget = 0;
  double pcs = 0.0;  // fraction of replications selecting the true best
  double eoc = 0.0;  // mean of mu_b - mu_{b-hat}
  std::vector<TrackedAllocation> alloc;
};

struct PolicyCurve {
  PolicyKind policy;
  std::vector<CurvePoint> points;
};

struct TargetBudgetRow {
  PolicyKind policy;
  double target_pcs = 0.0;
  std::optional<std::int64_t> budget;  // nullopt: not reached within the budget
};

// Seed of replication r of a policy; independent of which other policies run.
std::uint64_t replication_seed(std::uint64_t base_seed, PolicyKind policy, std::int64_t r);

// Runs config.replications trajectories per policy on `workers` threads
// (0 = hardware concurrency). Output does not depend on the worker count.
std::vector<PolicyCurve> estimate_curves(const ExperimentConfig& config, unsigned workers = 0);

// First checkpoint whose estimated PCS reaches each target; no smoothing.
std::vector<TargetBudgetRow> budget_to_target(std::span<const PolicyCurve> curves,
                                              std::span<const double> targets);
std::vector<TargetBudgetRow> budget_to_target(const ExperimentConfig& config,
                                              std::span<const double> targets,
                                              unsigned workers = 0);

// ---- CSV ------------------------------------------------------------------

// One line of a curve file. `design` is 1-based; design and alloc_frac are
// empty when no designs are tracked.
struct CurveRow {
  PolicyKind policy;
  std::int64_t budget = 0;
  double pcs = 0.0;
  double eoc = 0.0;
  std::optional<std::size_t> design;
  std::optional<double> alloc_frac;

  bool operator==(const CurveRow&) const = default;
};

std::vector<CurveRow> curve_rows(std::span<const PolicyCurve> curves);

// Headers: `policy,budget,pcs,eoc,design,alloc_frac` and
// `policy,target_pcs,budget`. Floats use 10 significant digits; rows are
// sorted by policy name, then budget (curves) or target (tables).
void write_csv(std::span<const CurveRow> rows, const std::filesystem::path& path);
void write_csv(std::span<const TargetBudgetRow> rows, const std::filesystem::path& path);

std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path);
std::vector<TargetBudgetRow> read_table_csv(const std::filesystem::path& path);

// ---- config ---------------------------------------------------------------

// Loads a JSON experiment config (schema in docs/config.md). Unknown keys,
// missing required keys, type mismatches and invariant violations raise
// ConfigError naming the field.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view text);

}  // namespace rsel
