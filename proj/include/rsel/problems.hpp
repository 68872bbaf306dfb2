#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace rsel {

// Designs with explicitly given normal means and standard deviations.
struct NormalDesigns {
  std::vector<double> means;
  std::vector<double> sds;
};

// mu_i = i (1-based); sigma_i ~ U(sd_low, sd_high) drawn once from sigma_seed.
struct IncreasingMeans {
  std::size_t designs = 10;
  double sd_low = 0.0;
  double sd_high = 6.0;
  std::uint64_t sigma_seed = 1;
};

// 5 x 5 grid x1, x2 in {-2..2}; observations are -f(x1, x2) + noise.
struct RosenbrockGrid {
  double noise_sd = 10.0;
};

struct GoldsteinPriceGrid {
  double noise_sd = 3.0;
};

using ProblemSpec = std::variant<NormalDesigns, IncreasingMeans, RosenbrockGrid, GoldsteinPriceGrid>;

// Lower bound applied to sigma_i drawn for IncreasingMeans.
inline constexpr double kMinDrawnSd = 0.05;

double rosenbrock(double x1, double x2);
// Goldstein-Price including the 1/100 prefactor.
double goldstein_price(double x1, double x2);

// Grid designs are numbered 5 (x1 + 2) + (x2 + 2) + 1.
std::size_t grid_design(int x1, int x2);
std::pair<int, int> grid_point(std::size_t design);

// Independent N(mean, sd^2) streams, one per design. Observation k of design
// i depends only on (seed, i, k), never on the order designs are sampled in.
class Sampler {
 public:
  Sampler(const std::vector<double>& means, const std::vector<double>& sds, std::uint64_t seed);

  double draw(std::size_t design);
  std::size_t size() const noexcept { return streams_.size(); }

 private:
  struct Stream {
    std::mt19937_64 engine;
    double mean;
    double sd;
    bool has_spare = false;
    double spare = 0.0;
  };
  std::vector<Stream> streams_;
};

// A benchmark with ground truth, oriented for maximization.
struct Problem {
  std::string name;
  std::vector<double> true_means;
  std::vector<double> true_sds;
  std::size_t best = 0;

  std::size_t size() const noexcept { return true_means.size(); }
  Sampler sampler(std::uint64_t seed) const { return Sampler(true_means, true_sds, seed); }
};

Problem build_problem(const ProblemSpec& spec);

// Deterministic 64-bit seed mixing (splitmix64 finalizer chained over parts).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Uniform on (0, 1) and standard normal variates from a 64-bit engine. The
// normal generator is the Marsaglia polar method; it is the only place
// variates are produced, so seeds reproduce across standard libraries.
double uniform_open01(std::mt19937_64& engine);

}  // namespace rsel
