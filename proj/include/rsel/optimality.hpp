#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rsel {

inline constexpr double kResidualTolerance = 1e-10;
inline constexpr double kSimplexTolerance = 1e-12;

// Asymptotically optimal sampling fractions for normal designs.
struct OptimalAllocation {
  std::vector<double> alpha;
  std::size_t best = 0;
};

// Distance of an allocation from the optimality conditions.
//   balance      = (alpha_b / sigma_b)^2 - sum_{i != b} (alpha_i / sigma_i)^2
//   max_rate_gap = max_{i,j != b} |tau_i - tau_j| / mean_{i != b} tau_i
struct Residuals {
  double balance = 0.0;
  double max_rate_gap = 0.0;
};

// tau_i = (mu_b - mu_i)^2 / (sigma_i^2 / alpha_i + sigma_b^2 / alpha_b); the
// large-deviations rate of the pair (i, b) is tau_i / 2.
double pair_rate(std::span<const double> means, std::span<const double> sds,
                 std::span<const double> alpha, std::size_t i, std::size_t b);

// min_{i != b} tau_i, the objective the optimal allocation maximizes.
double min_pair_rate(std::span<const double> means, std::span<const double> sds,
                     std::span<const double> alpha);

OptimalAllocation solve_optimal_allocation(std::span<const double> means,
                                           std::span<const double> sds);

// Accepts fractions or raw counts; normalized internally. Zero entries are
// rejected.
Residuals residuals(std::span<const double> allocation, std::span<const double> means,
                    std::span<const double> sds);

}  // namespace rsel
