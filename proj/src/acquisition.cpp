#include "rsel/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsel/errors.hpp"

namespace rsel {
namespace {

// Below this log scale the APCS-S log-ratio is replaced by its first-order
// expansion, whose relative error is then under 1e-13.
constexpr double kFirstOrderLogScale = -30.0;

double log_lower_tail(const PairwiseParams& p) { return log_t_cdf(DegreesOfFreedom(p.nu), -p.d); }

double log_cdf_at_gap(const PairwiseParams& p) { return log_t_cdf(DegreesOfFreedom(p.nu), p.d); }

double log_eoc_term(const PairwiseParams& p, double nu_floor) {
  return 0.5 * std::log(p.s) + log_psi_loss(DegreesOfFreedom(p.nu), p.d, nu_floor);
}

// Current and one-step lookahead parameters of every competitor i != best:
// `own` bumps N_i, `best` bumps N_best.
struct Competitor {
  std::size_t index;
  PairwiseParams now;
  PairwiseParams own;
  PairwiseParams best;
};

std::vector<Competitor> competitors(const MeasureInputs& in) {
  if (in.designs.size() < 2) throw DomainError("selection needs at least two designs");
  if (in.best >= in.designs.size()) throw DomainError("best design out of range");
  std::vector<Competitor> out;
  out.reserve(in.designs.size() - 1);
  const auto& b = in.designs[in.best];
  for (std::size_t i = 0; i < in.designs.size(); ++i) {
    if (i == in.best) continue;
    const auto& di = in.designs[i];
    out.push_back({i, pair_params(di, b), pair_params(di, b, 1, 0), pair_params(di, b, 0, 1)});
  }
  return out;
}

// (a - a~) / exp(scale) for a = exp(la), a~ = exp(la_tilde).
double scaled_drop(double la, double la_tilde, double scale) {
  return std::exp(la - scale) * -std::expm1(la_tilde - la);
}

// Shared by APCS-B and AEOC-B: both gains are sums of per-competitor term
// decreases, with the term given in log form by `log_term`.
template <typename LogTerm>
ScaledImprovements summed_drops(const MeasureInputs& in, LogTerm log_term) {
  const auto comps = competitors(in);
  struct Logs {
    double now, own, best;
  };
  std::vector<Logs> logs;
  logs.reserve(comps.size());
  double scale = -std::numeric_limits<double>::infinity();
  for (const auto& c : comps) {
    logs.push_back({log_term(c.now), log_term(c.own), log_term(c.best)});
    scale = std::max(scale, logs.back().now);
  }
  ScaledImprovements out{std::vector<double>(in.designs.size(), 0.0), scale};
  double best_gain = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    out.values[comps[k].index] = scaled_drop(logs[k].now, logs[k].own, scale);
    best_gain += scaled_drop(logs[k].now, logs[k].best, scale);
  }
  out.values[in.best] = best_gain;
  return out;
}

ScaledImprovements apcs_s_gains(const MeasureInputs& in) {
  const auto comps = competitors(in);
  struct Logs {
    double tail_now, tail_own, tail_best;  // ln Phi(-d)
    double cdf_now, cdf_own, cdf_best;     // ln Phi(d)
  };
  std::vector<Logs> logs;
  logs.reserve(comps.size());
  double scale = -std::numeric_limits<double>::infinity();
  double log_product = 0.0;
  for (const auto& c : comps) {
    logs.push_back({log_lower_tail(c.now), log_lower_tail(c.own), log_lower_tail(c.best),
                    log_cdf_at_gap(c.now), log_cdf_at_gap(c.own), log_cdf_at_gap(c.best)});
    scale = std::max(scale, logs.back().tail_now);
    log_product += logs.back().cdf_now;
  }
  ScaledImprovements out{std::vector<double>(in.designs.size(), 0.0), scale + log_product};
  if (scale > kFirstOrderLogScale) {
    const double inv_scale = std::exp(-scale);
    double rho_best = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto& l = logs[k];
      out.values[comps[k].index] = std::expm1(l.cdf_own - l.cdf_now) * inv_scale;
      rho_best += l.cdf_best - l.cdf_now;
    }
    out.values[in.best] = std::expm1(rho_best) * inv_scale;
  } else {
    // ln(Phi(d~)/Phi(d)) = ln(1 + (q - q~)/(1 - q)) ~ (q - q~)/(1 - q) with q = Phi(-d) tiny.
    double best_gain = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto& l = logs[k];
      const double inv_cdf = std::exp(-l.cdf_now);
      out.values[comps[k].index] = scaled_drop(l.tail_now, l.tail_own, scale) * inv_cdf;
      best_gain += scaled_drop(l.tail_now, l.tail_best, scale) * inv_cdf;
    }
    out.values[in.best] = best_gain;
  }
  return out;
}

}  // namespace

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::APCS_B: return "APCS-B";
    case MeasureKind::AEOC_B: return "AEOC-B";
    case MeasureKind::APCS_S: return "APCS-S";
  }
  return "?";
}

MeasureInputs sample_inputs(const AllocationState& state) {
  MeasureInputs in;
  in.best = estimated_best(state);
  in.designs.reserve(state.size());
  for (const auto& d : state.designs()) in.designs.push_back(sample_moments(d));
  return in;
}

MeasureInputs oracle_inputs(const AllocationState& state, std::span<const double> true_means,
                            std::span<const double> true_sds) {
  if (true_means.size() != state.size() || true_sds.size() != state.size())
    throw DomainError("true parameters do not match the number of designs");
  MeasureInputs in;
  in.best = estimated_best(state);
  in.designs.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!(true_sds[i] > 0.0)) throw DomainError("true standard deviations must be > 0");
    in.designs.push_back({state.design(i).count, true_means[i], true_sds[i] * true_sds[i]});
  }
  return in;
}

double apcs_b(const MeasureInputs& in) {
  double total = 0.0;
  for (const auto& c : competitors(in)) total += t_cdf(DegreesOfFreedom(c.now.nu), -c.now.d);
  return 1.0 - total;
}

double aeoc_b(const MeasureInputs& in, double nu_floor) {
  double total = 0.0;
  for (const auto& c : competitors(in))
    total += std::sqrt(c.now.s) * psi_loss(DegreesOfFreedom(c.now.nu), c.now.d, nu_floor);
  return total;
}

double apcs_s(const MeasureInputs& in) {
  double log_product = 0.0;
  for (const auto& c : competitors(in)) log_product += log_cdf_at_gap(c.now);
  return std::exp(log_product);
}

double apcs_b(const AllocationState& state) { return apcs_b(sample_inputs(state)); }
double aeoc_b(const AllocationState& state, double nu_floor) {
  return aeoc_b(sample_inputs(state), nu_floor);
}
double apcs_s(const AllocationState& state) { return apcs_s(sample_inputs(state)); }

double measure_value(MeasureKind kind, const MeasureInputs& in, double nu_floor) {
  switch (kind) {
    case MeasureKind::APCS_B: return apcs_b(in);
    case MeasureKind::AEOC_B: return aeoc_b(in, nu_floor);
    case MeasureKind::APCS_S: return apcs_s(in);
  }
  throw DomainError("unknown measure");
}

ScaledImprovements scaled_improvements(MeasureKind kind, const MeasureInputs& in,
                                       double nu_floor) {
  switch (kind) {
    case MeasureKind::APCS_B:
      return summed_drops(in, [](const PairwiseParams& p) { return log_lower_tail(p); });
    case MeasureKind::AEOC_B:
      return summed_drops(in,
                          [nu_floor](const PairwiseParams& p) { return log_eoc_term(p, nu_floor); });
    case MeasureKind::APCS_S:
      return apcs_s_gains(in);
  }
  throw DomainError("unknown measure");
}

ImprovementVector improvements(MeasureKind kind, const MeasureInputs& in, double nu_floor) {
  auto scaled = scaled_improvements(kind, in, nu_floor);
  const double factor = std::exp(scaled.log_scale);
  for (auto& v : scaled.values) v *= factor;
  return {std::move(scaled.values)};
}

ImprovementVector improvements(MeasureKind kind, const AllocationState& state, double nu_floor) {
  return improvements(kind, sample_inputs(state), nu_floor);
}

}  // namespace rsel
