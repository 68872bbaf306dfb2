#include "rsel/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsel/errors.hpp"

namespace rsel {
namespace {

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (std::isnan(values[j])) throw DomainError("improvement is NaN");
    if (values[j] > values[best]) best = j;
  }
  return best;
}

std::size_t least_sampled(std::span<const std::int64_t> counts) {
  return static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
}

MeasureInputs inputs_for(PolicyKind kind, const AllocationState& state,
                         std::optional<TrueParams> truth) {
  if (!is_oracle(kind)) return sample_inputs(state);
  if (!truth) throw DomainError(std::string(to_string(kind)) + " needs true parameters");
  return oracle_inputs(state, truth->means, truth->sds);
}

std::vector<std::size_t> ocba_increment(const AllocationState& state,
                                        std::optional<TrueParams> truth, std::int64_t increment,
                                        bool use_truth) {
  const std::size_t m = state.size();
  std::vector<double> means(m), sds(m);
  std::size_t best;
  if (use_truth) {
    if (!truth) throw DomainError("OCBA with true parameters needs true parameters");
    std::copy(truth->means.begin(), truth->means.end(), means.begin());
    std::copy(truth->sds.begin(), truth->sds.end(), sds.begin());
    best = static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const auto mom = sample_moments(state.design(i));
      means[i] = mom.mean;
      sds[i] = std::sqrt(mom.variance);
    }
    best = estimated_best(state);
  }
  const auto target =
      ocba_target(means, sds, best, static_cast<double>(state.total() + increment));
  auto counts = state.counts();
  std::vector<std::size_t> picks;
  picks.reserve(static_cast<std::size_t>(increment));
  for (std::int64_t k = 0; k < increment; ++k) {
    std::size_t pick = 0;
    double deficit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = target[i] - static_cast<double>(counts[i]);
      if (d > deficit) {
        deficit = d;
        pick = i;
      }
    }
    ++counts[pick];
    picks.push_back(pick);
  }
  return picks;
}

double checkpoint_measure(PolicyKind kind, const AllocationState& state,
                          std::optional<TrueParams> truth, double nu_floor) {
  const auto measure = measure_of(kind);
  if (!measure) return std::numeric_limits<double>::quiet_NaN();
  return measure_value(*measure, inputs_for(kind, state, truth), nu_floor);
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::APCS_B: return "APCS-B";
    case PolicyKind::AEOC_B: return "AEOC-B";
    case PolicyKind::APCS_S: return "APCS-S";
    case PolicyKind::M_APCS_B: return "mAPCS-B";
    case PolicyKind::M_AEOC_B: return "mAEOC-B";
    case PolicyKind::M_APCS_S: return "mAPCS-S";
    case PolicyKind::OCBA: return "OCBA";
    case PolicyKind::EQUAL: return "EA";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  static constexpr std::pair<std::string_view, PolicyKind> kTags[] = {
      {"APCS_B", PolicyKind::APCS_B},     {"AEOC_B", PolicyKind::AEOC_B},
      {"APCS_S", PolicyKind::APCS_S},     {"M_APCS_B", PolicyKind::M_APCS_B},
      {"M_AEOC_B", PolicyKind::M_AEOC_B}, {"M_APCS_S", PolicyKind::M_APCS_S},
      {"EQUAL", PolicyKind::EQUAL}};
  for (PolicyKind k : kAllPolicies)
    if (to_string(k) == name) return k;
  for (const auto& [tag, k] : kTags)
    if (tag == name) return k;
  return std::nullopt;
}

bool is_myopic(PolicyKind kind) { return measure_of(kind).has_value(); }

bool is_oracle(PolicyKind kind) {
  return kind == PolicyKind::M_APCS_B || kind == PolicyKind::M_AEOC_B ||
         kind == PolicyKind::M_APCS_S;
}

std::optional<MeasureKind> measure_of(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::APCS_B:
    case PolicyKind::M_APCS_B: return MeasureKind::APCS_B;
    case PolicyKind::AEOC_B:
    case PolicyKind::M_AEOC_B: return MeasureKind::AEOC_B;
    case PolicyKind::APCS_S:
    case PolicyKind::M_APCS_S: return MeasureKind::APCS_S;
    default: return std::nullopt;
  }
}

void RunConfig::validate(std::size_t designs) const {
  if (designs < 2) throw DomainError("need at least two designs");
  if (n0 < 2) throw DomainError("n0 must be >= 2");
  if (delta < 1) throw DomainError("delta must be >= 1");
  const auto initial = n0 * static_cast<std::int64_t>(designs);
  if (budget < initial) throw DomainError("budget must be >= n0 * M = " + std::to_string(initial));
  if (!(psi_nu_floor > 1.0)) throw DomainError("psi_nu_floor must be > 1");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < initial || checkpoints[k] > budget)
      throw DomainError("checkpoints must lie in [n0 * M, budget]");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
      throw DomainError("checkpoints must be strictly increasing");
  }
}

std::vector<std::int64_t> iteration_checkpoints(std::int64_t n0, std::int64_t delta,
                                                std::int64_t budget, std::size_t designs) {
  std::vector<std::int64_t> out;
  const auto initial = n0 * static_cast<std::int64_t>(designs);
  for (std::int64_t c = initial; c < budget; c += delta) out.push_back(c);
  if (budget >= initial) out.push_back(budget);
  return out;
}

std::vector<std::int64_t> spaced_checkpoints(std::int64_t n0, std::int64_t every,
                                             std::int64_t budget, std::size_t designs) {
  if (every < 1) throw DomainError("checkpoint spacing must be >= 1");
  std::vector<std::int64_t> out;
  const auto initial = n0 * static_cast<std::int64_t>(designs);
  if (budget < initial) return out;
  out.push_back(initial);
  for (std::int64_t c = (initial / every + 1) * every; c < budget; c += every) out.push_back(c);
  if (budget > initial) out.push_back(budget);
  return out;
}

std::vector<double> ocba_target(std::span<const double> means, std::span<const double> sds,
                                std::size_t best, double total) {
  const std::size_t m = means.size();
  if (m < 2 || sds.size() != m) throw DomainError("ocba_target: bad lengths");
  if (best >= m) throw DomainError("ocba_target: best out of range");
  if (!(total > 0.0)) throw DomainError("ocba_target: total must be > 0");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sds[i] > 0.0)) throw DomainError("ocba_target: sds must be > 0");
    if (means[i] > means[best]) throw DomainError("ocba_target: best is not the largest mean");
  }
  const double floor = 1e-9 * (1.0 + std::fabs(means[best]));
  std::vector<double> weight(m, 0.0);
  double best_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == best) continue;
    const double gap = std::max(means[best] - means[i], floor);
    const double ratio = sds[i] / gap;
    weight[i] = ratio * ratio;
    best_sq += (weight[i] / sds[i]) * (weight[i] / sds[i]);
  }
  weight[best] = sds[best] * std::sqrt(best_sq);
  double sum = 0.0;
  for (double w : weight) sum += w;
  for (auto& w : weight) w *= total / sum;
  return weight;
}

std::vector<std::size_t> allocate_increment(PolicyKind kind, const AllocationState& state,
                                            std::optional<TrueParams> truth,
                                            std::int64_t increment, const RunConfig& config) {
  if (increment < 1) throw DomainError("increment must be >= 1");
  const auto n = static_cast<std::size_t>(increment);
  if (kind == PolicyKind::OCBA)
    return ocba_increment(state, truth, increment, config.ocba_true_parameters);
  if (kind == PolicyKind::EQUAL) {
    auto counts = state.counts();
    std::vector<std::size_t> picks;
    picks.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto pick = least_sampled(counts);
      ++counts[pick];
      picks.push_back(pick);
    }
    return picks;
  }
  const auto scaled =
      scaled_improvements(*measure_of(kind), inputs_for(kind, state, truth), config.psi_nu_floor);
  return std::vector<std::size_t>(n, argmax_lowest(scaled.values));
}

std::size_t choose_next(PolicyKind kind, const AllocationState& state,
                        std::optional<TrueParams> truth, double psi_nu_floor) {
  RunConfig config;
  config.psi_nu_floor = psi_nu_floor;
  return allocate_increment(kind, state, truth, 1, config).front();
}

Trajectory run_procedure(const Problem& problem, PolicyKind kind, const RunConfig& config,
                         std::uint64_t seed) {
  const std::size_t m = problem.size();
  config.validate(m);
  const TrueParams truth{problem.true_means, problem.true_sds};
  AllocationState state(m);
  Sampler sampler = problem.sampler(seed);
  Trajectory out;
  out.records.reserve(config.checkpoints.size());
  std::size_t next = 0;

  auto record_if_due = [&] {
    if (next < config.checkpoints.size() && state.total() == config.checkpoints[next]) {
      out.records.push_back({state.total(), state.iteration(), state.counts(),
                             estimated_best(state),
                             checkpoint_measure(kind, state, truth, config.psi_nu_floor)});
      ++next;
    }
  };

  for (std::size_t i = 0; i < m; ++i)
    for (std::int64_t k = 0; k < config.n0; ++k) state.observe(i, sampler.draw(i));
  record_if_due();

  while (state.total() < config.budget) {
    const auto increment = std::min(config.delta, config.budget - state.total());
    const auto picks = allocate_increment(kind, state, truth, increment, config);
    for (std::size_t k = 0; k < picks.size(); ++k) {
      state.observe(picks[k], sampler.draw(picks[k]));
      if (k + 1 == picks.size()) state.advance_iteration();
      record_if_due();
    }
  }
  return out;
}

}  // namespace rsel
