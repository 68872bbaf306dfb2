#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsel/special_functions.hpp"

namespace rsel {

// Sample variances are raised to this floor before they enter s, d or nu, so
// that identical early observations cannot produce s = 0.
inline constexpr double kVarianceFloor = 1e-12;

// Streaming count / mean / sum of squared deviations (Welford).
struct DesignStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  // Unbiased sample variance; requires count >= 2.
  double variance() const;
};

DesignStats update_stats(DesignStats stats, double observation);

// Moments of one design as seen by the acquisition measures. Either the
// sample estimates (floored variance) or, in oracle mode, the true values.
struct DesignMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
};

class AllocationState {
 public:
  explicit AllocationState(std::size_t designs);

  std::size_t size() const noexcept { return designs_.size(); }
  const DesignStats& design(std::size_t i) const { return designs_.at(i); }
  std::span<const DesignStats> designs() const noexcept { return designs_; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t iteration() const noexcept { return iteration_; }

  void observe(std::size_t design, double observation);
  void advance_iteration() noexcept { ++iteration_; }

  std::vector<std::int64_t> counts() const;

 private:
  std::vector<DesignStats> designs_;
  std::int64_t total_ = 0;
  std::int64_t iteration_ = 0;
};

// Parameters of the approximate t distribution of a posterior mean
// difference: variance s, standardized gap d, Welch degrees of freedom nu.
struct PairwiseParams {
  double s;
  double d;
  double nu;
};

// Lowest index attaining the largest sample mean. Throws if a design has no
// observations.
std::size_t estimated_best(const AllocationState& state);

// Sample moments with the variance floor applied; requires count >= 2.
DesignMoments sample_moments(const DesignStats& stats);

// (s, d, nu) for the pair (i, b) with counts bumped by the given amounts and
// means / variances held fixed.
PairwiseParams pair_params(const DesignMoments& i, const DesignMoments& b, int bump_i = 0,
                           int bump_b = 0);

PairwiseParams pairwise_params(const AllocationState& state, std::size_t i, std::size_t b);

// One-step lookahead: design j receives one more (hypothetical) sample.
PairwiseParams lookahead_params(const AllocationState& state, std::size_t i, std::size_t b,
                                std::size_t j);

}  // namespace rsel
