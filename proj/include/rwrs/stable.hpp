#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rwrs/rng.hpp"

namespace rwrs {

// Strictly stable law S_beta with characteristic function
//   phi(u) = exp(-|u|^beta * (a1 + i*a2*sgn(u))).
// Constraints: 0 < beta <= 2, a1 > 0, |a2/a1| <= |tan(pi*beta/2)| for
// beta not in {1,2}; a2 = 0 at beta = 2; at beta = 1 a2 acts as a pure
// location shift of a Cauchy of scale a1.
struct StableParams {
  double beta = 2.0;
  double a1 = 0.5;
  double a2 = 0.0;
};

// Throws std::domain_error naming the violated constraint.
void validate(const StableParams& p);

std::complex<double> cf_eval(const StableParams& p, double u);

// One draw via Chambers-Mallows-Stuck (exact, rejection-free). beta = 2 is
// Gaussian with variance 2*a1; beta = 1 is a shifted Cauchy.
double sample(const StableParams& p, Rng& rng);

// Density by characteristic-function inversion:
//   f(x) = (1/pi) * Int_0^inf exp(-a1 u^beta) cos(x u + a2 u^beta) du,
// adaptive quadrature with absolute error <= tol. May return tiny negative
// values (quadrature noise); callers that report densities clamp at zero.
// Throws std::runtime_error if the truncation bound cannot meet tol.
double density(const StableParams& p, double x, double tol);

// Distribution function at a single point (Gil-Pelaez inversion), absolute
// error <= tol.
double cdf_point(const StableParams& p, double x, double tol);

// Tabulated CDF on a tangent-spaced grid with power-law (or Gaussian) tail
// extensions; cheap to evaluate many times, e.g. for KS statistics.
class StableCdf {
 public:
  StableCdf(const StableParams& p, std::size_t grid_size = 4096, double tol = 1e-7);
  double operator()(double x) const;
  double grid_lo() const { return xs_.front(); }
  double grid_hi() const { return xs_.back(); }

 private:
  StableParams params_;
  std::vector<double> xs_;
  std::vector<double> fs_;
};

// The constant (Gamma(beta+1) / (pi*A)^(beta-1))^(1/beta) multiplying the
// stable process in the critical-case limit. Exactly 1 at beta = 1.
double limit_constant(double beta, double A);

// Law of the limit variable: scale_c * S_beta with scale_c = limit_constant.
struct LimitLaw {
  StableParams base;
  double scale_c = 1.0;
};

LimitLaw make_limit_law(const StableParams& base, double A);

// Density C(x) of the limit variable: (1/c) f(x/c).
double limit_density(const LimitLaw& law, double x, double tol);

}  // namespace rwrs
