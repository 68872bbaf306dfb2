#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsel/acquisition.hpp"
#include "rsel/core_state.hpp"
#include "rsel/problems.hpp"

namespace rsel {

// M_* are the oracle-mode procedures: the measures use true means and
// variances while the estimated best design still comes from sample means.
enum class PolicyKind { APCS_B, AEOC_B, APCS_S, M_APCS_B, M_AEOC_B, M_APCS_S, OCBA, EQUAL };

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::APCS_B,   PolicyKind::AEOC_B,   PolicyKind::APCS_S, PolicyKind::M_APCS_B,
    PolicyKind::M_AEOC_B, PolicyKind::M_APCS_S, PolicyKind::OCBA,   PolicyKind::EQUAL};

// Display names: APCS-B, AEOC-B, APCS-S, mAPCS-B, mAEOC-B, mAPCS-S, OCBA, EA.
std::string_view to_string(PolicyKind kind);
// Accepts display names and enum-style tags (APCS_B, M_APCS_B, EQUAL, ...).
std::optional<PolicyKind> parse_policy(std::string_view name);

bool is_myopic(PolicyKind kind);
bool is_oracle(PolicyKind kind);
// Measure driving a myopic policy (plain or oracle mode).
std::optional<MeasureKind> measure_of(PolicyKind kind);

struct TrueParams {
  std::span<const double> means;
  std::span<const double> sds;
};

struct RunConfig {
  std::int64_t n0 = 2;
  std::int64_t delta = 1;
  std::int64_t budget = 0;
  // Sorted, distinct totals in [n0 * M, budget] at which the state is recorded.
  std::vector<std::int64_t> checkpoints;
  // OCBA plugs in the true means / sds instead of sample estimates.
  bool ocba_true_parameters = false;
  double psi_nu_floor = kPsiNuFloor;

  // Throws DomainError naming the offending field.
  void validate(std::size_t designs) const;
};

// Checkpoints at the end of every iteration: n0*M, n0*M + delta, ..., budget.
std::vector<std::int64_t> iteration_checkpoints(std::int64_t n0, std::int64_t delta,
                                                std::int64_t budget, std::size_t designs);
// n0*M, then every multiple of `every` above it, then budget.
std::vector<std::int64_t> spaced_checkpoints(std::int64_t n0, std::int64_t every,
                                             std::int64_t budget, std::size_t designs);

struct CheckpointRecord {
  std::int64_t total = 0;
  std::int64_t iteration = 0;
  std::vector<std::int64_t> counts;
  std::size_t estimated_best = 0;
  // Value of the driving measure; NaN for OCBA and EA.
  double measure = 0.0;
};

struct Trajectory {
  std::vector<CheckpointRecord> records;
};

// OCBA budget targets T_i summing to `total`:
//   T_i / T_j = (sigma_i / gap_i)^2 / (sigma_j / gap_j)^2,  i, j != best
//   T_best   = sigma_best * sqrt(sum_{i != best} T_i^2 / sigma_i^2)
// Gaps are floored at 1e-9 (1 + |mu_best|).
std::vector<double> ocba_target(std::span<const double> means, std::span<const double> sds,
                                std::size_t best, double total);

// Designs receiving the next `increment` samples, in order.
std::vector<std::size_t> allocate_increment(PolicyKind kind, const AllocationState& state,
                                            std::optional<TrueParams> truth,
                                            std::int64_t increment, const RunConfig& config);

std::size_t choose_next(PolicyKind kind, const AllocationState& state,
                        std::optional<TrueParams> truth = std::nullopt,
                        double psi_nu_floor = kPsiNuFloor);

// Full procedure: n0 samples per design, then one policy decision per
// iteration, each worth `delta` samples (the last increment is truncated so
// the run ends exactly at `budget`). Deterministic in (problem, kind, config,
// seed).
Trajectory run_procedure(const Problem& problem, PolicyKind kind, const RunConfig& config,
                         std::uint64_t seed);

}  // namespace rsel
