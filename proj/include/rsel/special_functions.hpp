#pragma once

// Scalar special functions used by the allocation measures: log-gamma,
// log-beta, the regularized incomplete beta function, the standardized
// Student-t density and distribution function, the t expected-shortfall
// loss Psi, and the standard normal cdf.
//
// Every function is pure. Non-finite or out-of-domain arguments raise
// rsel::DomainError instead of returning NaN.

namespace rsel {

// Degrees of freedom of a Student-t distribution; always > 0.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(double nu);
  double value() const noexcept { return nu_; }

 private:
  double nu_;
};

// Psi is only finite for nu > 1, so every nu passed to psi_loss is raised to
// at least this value. Pass a floor <= 1 to disable the clamp.
inline constexpr double kPsiNuFloor = 1.01;

// Continued-fraction controls for the incomplete beta function.
inline constexpr int kIncompleteBetaMaxIterations = 300;
inline constexpr double kIncompleteBetaTolerance = 1e-15;

double log_gamma(double x);
double log_beta(double a, double b);

// I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// ln I_x(a, b) where y = 1 - x is supplied separately so that x close to 1
// keeps full precision in the complementary term.
double log_regularized_incomplete_beta(double a, double b, double x, double y);

double t_pdf(DegreesOfFreedom nu, double x);
double log_t_pdf(DegreesOfFreedom nu, double x);
double t_cdf(DegreesOfFreedom nu, double x);
// ln Phi_nu(x); accurate deep into both tails (no underflow to -inf for
// moderate |x|).
double log_t_cdf(DegreesOfFreedom nu, double x);

// Psi_nu(x) = ((nu + x^2) / (nu - 1)) phi_nu(x) - x Phi_nu(-x), the expected
// positive part E[(T - x)^+] of a standardized t variable.
double psi_loss(DegreesOfFreedom nu, double x, double nu_floor = kPsiNuFloor);
double log_psi_loss(DegreesOfFreedom nu, double x, double nu_floor = kPsiNuFloor);

double std_normal_cdf(double x);

// ln(1 - exp(l)) for l <= 0.
double log1mexp(double l);

}  // namespace rsel
