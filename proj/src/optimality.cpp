#include "rsel/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsel/errors.hpp"

namespace rsel {
namespace {

constexpr int kMaxBisections = 400;

void check_instance(std::span<const double> means, std::span<const double> sds) {
  if (means.size() < 2) throw DomainError("need at least two designs");
  if (means.size() != sds.size()) throw DomainError("means and sds differ in length");
  for (double m : means)
    if (!std::isfinite(m)) throw DomainError("means must be finite");
  for (double s : sds)
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sds must be finite and > 0");
}

std::size_t unique_best(std::span<const double> means) {
  const auto it = std::max_element(means.begin(), means.end());
  if (std::count(means.begin(), means.end(), *it) != 1)
    throw DomainError("optimality conditions need a unique best mean");
  return static_cast<std::size_t>(it - means.begin());
}

std::vector<double> normalized(std::span<const double> allocation) {
  std::vector<double> alpha(allocation.begin(), allocation.end());
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a))
      throw DomainError("allocation entries must be finite and > 0");
  const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  for (auto& a : alpha) a /= total;
  return alpha;
}

}  // namespace

double pair_rate(std::span<const double> means, std::span<const double> sds,
                 std::span<const double> alpha, std::size_t i, std::size_t b) {
  check_instance(means, sds);
  if (alpha.size() != means.size()) throw DomainError("allocation length mismatch");
  if (i == b || i >= means.size() || b >= means.size()) throw DomainError("invalid design pair");
  if (!(alpha[i] > 0.0) || !(alpha[b] > 0.0)) throw DomainError("pair rate needs alpha > 0");
  const double gap = means[b] - means[i];
  return gap * gap / (sds[i] * sds[i] / alpha[i] + sds[b] * sds[b] / alpha[b]);
}

double min_pair_rate(std::span<const double> means, std::span<const double> sds,
                     std::span<const double> alpha) {
  const std::size_t b = unique_best(means);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < means.size(); ++i)
    if (i != b) lowest = std::min(lowest, pair_rate(means, sds, alpha, i, b));
  return lowest;
}

// The conditions are homogeneous in alpha, so fix the best design's weight at
// 1 and search over the common rate t. For a given t each competitor's weight
// solves tau_i = t in closed form, x_i = sigma_i^2 / (gap_i^2 / t - sigma_b^2),
// and the balance term 1/sigma_b^2 - sum (x_i/sigma_i)^2 is strictly
// decreasing in t, from 1/sigma_b^2 at t = 0 to -inf as t -> min gap^2/sigma_b^2.
OptimalAllocation solve_optimal_allocation(std::span<const double> means,
                                           std::span<const double> sds) {
  check_instance(means, sds);
  const std::size_t b = unique_best(means);
  const std::size_t m = means.size();
  const double var_b = sds[b] * sds[b];

  std::vector<double> gap2(m, 0.0);
  double t_max = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    if (i == b) continue;
    const double g = means[b] - means[i];
    gap2[i] = g * g;
    t_max = std::min(t_max, gap2[i] / var_b);
  }

  auto weights = [&](double t) {
    std::vector<double> x(m, 1.0);
    for (std::size_t i = 0; i < m; ++i)
      if (i != b) x[i] = sds[i] * sds[i] / (gap2[i] / t - var_b);
    return x;
  };
  auto balance = [&](const std::vector<double>& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (i != b) sum += (x[i] / sds[i]) * (x[i] / sds[i]);
    return 1.0 / var_b - sum;
  };

  double lo = 0.0;
  double hi = t_max;
  for (int k = 0; k < kMaxBisections; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (balance(weights(mid)) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // lo keeps every denominator strictly positive.
  auto x = weights(lo > 0.0 ? lo : 0.5 * hi);
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (auto& v : x) v /= total;
  return {std::move(x), b};
}

Residuals residuals(std::span<const double> allocation, std::span<const double> means,
                    std::span<const double> sds) {
  check_instance(means, sds);
  if (allocation.size() != means.size()) throw DomainError("allocation length mismatch");
  const auto alpha = normalized(allocation);
  const std::size_t b = unique_best(means);

  Residuals r;
  r.balance = (alpha[b] / sds[b]) * (alpha[b] / sds[b]);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i == b) continue;
    r.balance -= (alpha[i] / sds[i]) * (alpha[i] / sds[i]);
    const double tau = pair_rate(means, sds, alpha, i, b);
    lo = std::min(lo, tau);
    hi = std::max(hi, tau);
    sum += tau;
  }
  const double mean_tau = sum / static_cast<double>(means.size() - 1);
  r.max_rate_gap = (hi - lo) / mean_tau;
  return r;
}

}  // namespace rsel
