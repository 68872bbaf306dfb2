#include "rsel/problems.hpp"

#include <algorithm>
#include <cmath>

#include "rsel/errors.hpp"

namespace rsel {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t unique_argmax(const std::vector<double>& means) {
  const auto it = std::max_element(means.begin(), means.end());
  if (std::count(means.begin(), means.end(), *it) != 1)
    throw DomainError("problem has no unique best mean");
  return static_cast<std::size_t>(it - means.begin());
}

template <typename F>
Problem grid_problem(std::string name, double noise_sd, F f) {
  if (!(noise_sd > 0.0)) throw DomainError("grid noise_sd must be > 0");
  Problem p;
  p.name = std::move(name);
  for (std::size_t d = 1; d <= 25; ++d) {
    const auto [x1, x2] = grid_point(d);
    p.true_means.push_back(-f(x1, x2));
    p.true_sds.push_back(noise_sd);
  }
  p.best = unique_argmax(p.true_means);
  return p;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(splitmix64(a) ^ b); }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

double uniform_open01(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

double rosenbrock(double x1, double x2) {
  const double a = x1 - 1.0;
  const double b = x2 - x1 * x1;
  return a * a + 100.0 * b * b;
}

double goldstein_price(double x1, double x2) {
  const double s = x1 + x2 + 1.0;
  const double t = 2.0 * x1 - 3.0 * x2;
  const double first =
      1.0 + s * s * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
  const double second = 30.0 + t * t *
                                   (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 -
                                    36.0 * x1 * x2 + 27.0 * x2 * x2);
  return first * second / 100.0;
}

std::size_t grid_design(int x1, int x2) {
  if (x1 < -2 || x1 > 2 || x2 < -2 || x2 > 2) throw DomainError("grid point out of range");
  return static_cast<std::size_t>(5 * (x1 + 2) + (x2 + 2) + 1);
}

std::pair<int, int> grid_point(std::size_t design) {
  if (design < 1 || design > 25) throw DomainError("grid design out of range");
  const int k = static_cast<int>(design) - 1;
  return {k / 5 - 2, k % 5 - 2};
}

Sampler::Sampler(const std::vector<double>& means, const std::vector<double>& sds,
                 std::uint64_t seed) {
  if (means.size() != sds.size()) throw DomainError("means and sds differ in length");
  streams_.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    streams_.push_back({std::mt19937_64(mix_seed(seed, i)), means[i], sds[i]});
}

double Sampler::draw(std::size_t design) {
  auto& s = streams_.at(design);
  double z;
  if (s.has_spare) {
    s.has_spare = false;
    z = s.spare;
  } else {
    double u, v, r2;
    do {
      u = 2.0 * uniform_open01(s.engine) - 1.0;
      v = 2.0 * uniform_open01(s.engine) - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    s.spare = v * f;
    s.has_spare = true;
    z = u * f;
  }
  return s.mean + s.sd * z;
}

Problem build_problem(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& v) -> Problem {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalDesigns>) {
          if (v.means.size() < 2) throw DomainError("need at least two designs");
          if (v.means.size() != v.sds.size()) throw DomainError("means and sds differ in length");
          for (double m : v.means)
            if (!std::isfinite(m)) throw DomainError("design means must be finite");
          for (double s : v.sds)
            if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("design sds must be > 0");
          Problem p{"normal", v.means, v.sds, 0};
          p.best = unique_argmax(p.true_means);
          return p;
        } else if constexpr (std::is_same_v<T, IncreasingMeans>) {
          if (v.designs < 2) throw DomainError("need at least two designs");
          if (!(v.sd_low >= 0.0) || !(v.sd_high > v.sd_low))
            throw DomainError("increasing means needs 0 <= sd_low < sd_high");
          Problem p;
          p.name = "increasing_means";
          std::mt19937_64 engine(v.sigma_seed);
          for (std::size_t i = 0; i < v.designs; ++i) {
            p.true_means.push_back(static_cast<double>(i + 1));
            const double sd = v.sd_low + (v.sd_high - v.sd_low) * uniform_open01(engine);
            p.true_sds.push_back(std::max(sd, kMinDrawnSd));
          }
          p.best = v.designs - 1;
          return p;
        } else if constexpr (std::is_same_v<T, RosenbrockGrid>) {
          return grid_problem("rosenbrock", v.noise_sd, rosenbrock);
        } else {
          return grid_problem("goldstein_price", v.noise_sd, goldstein_price);
        }
      },
      spec);
}

}  // namespace rsel
