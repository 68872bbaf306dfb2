#include "rsel/core_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsel/errors.hpp"

namespace rsel {

double DesignStats::variance() const {
  if (count < 2) throw DomainError("sample variance needs at least two observations");
  return m2 / static_cast<double>(count - 1);
}

DesignStats update_stats(DesignStats stats, double observation) {
  if (!std::isfinite(observation)) throw DomainError("observation must be finite");
  ++stats.count;
  const double delta = observation - stats.mean;
  stats.mean += delta / static_cast<double>(stats.count);
  stats.m2 += delta * (observation - stats.mean);
  return stats;
}

AllocationState::AllocationState(std::size_t designs) : designs_(designs) {
  if (designs < 2) throw DomainError("selection needs at least two designs");
}

void AllocationState::observe(std::size_t design, double observation) {
  designs_.at(design) = update_stats(designs_[design], observation);
  ++total_;
}

std::vector<std::int64_t> AllocationState::counts() const {
  std::vector<std::int64_t> out(designs_.size());
  std::transform(designs_.begin(), designs_.end(), out.begin(),
                 [](const DesignStats& d) { return d.count; });
  return out;
}

std::size_t estimated_best(const AllocationState& state) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& d = state.design(i);
    if (d.count == 0)
      throw DomainError("design " + std::to_string(i + 1) + " has no observations");
    if (d.mean > state.design(best).mean) best = i;
  }
  return best;
}

DesignMoments sample_moments(const DesignStats& stats) {
  return {stats.count, stats.mean, std::max(stats.variance(), kVarianceFloor)};
}

PairwiseParams pair_params(const DesignMoments& i, const DesignMoments& b, int bump_i, int bump_b) {
  const double ni = static_cast<double>(i.count + bump_i);
  const double nb = static_cast<double>(b.count + bump_b);
  if (ni < 2.0 || nb < 2.0) throw DomainError("pairwise parameters need counts >= 2");
  const double vi = i.variance / ni;
  const double vb = b.variance / nb;
  const double s = vi + vb;
  const double nu = s * s / (vi * vi / (ni - 1.0) + vb * vb / (nb - 1.0));
  return {s, (b.mean - i.mean) / std::sqrt(s), nu};
}

PairwiseParams pairwise_params(const AllocationState& state, std::size_t i, std::size_t b) {
  if (i == b) throw DomainError("pairwise parameters need two distinct designs");
  return pair_params(sample_moments(state.design(i)), sample_moments(state.design(b)));
}

PairwiseParams lookahead_params(const AllocationState& state, std::size_t i, std::size_t b,
                                std::size_t j) {
  if (i == b) throw DomainError("pairwise parameters need two distinct designs");
  if (j >= state.size()) throw DomainError("lookahead design out of range");
  return pair_params(sample_moments(state.design(i)), sample_moments(state.design(b)),
                     j == i ? 1 : 0, j == b ? 1 : 0);
}

}  // namespace rsel
