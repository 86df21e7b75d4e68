#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rwrs/local_time.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

// V_n(beta) = sum_y N_n(y)^beta over occupied sites.
double v_beta(const LocalTimeField& field, double beta);

// The functionals
//   L_n(gamma)  = (n (ln n)^(gamma-1))^-1 sum_x |sum_i theta_i b_i(x)|^gamma
//   L'_n(gamma) = same with the sign of the inner sum as an extra factor,
// where b_i(x) are the per-interval local-time increments recorded in the
// field. Requires n >= 2 and as many thetas as intervals.
struct FunctionalReport {
  double gamma = 1.0;
  std::vector<double> thetas;
  std::vector<double> times;
  double l_value = 0.0;
  double l_signed_value = 0.0;
  double v_value = 0.0;  // sum_y N^gamma over the full horizon
};

FunctionalReport l_stat(const LocalTimeField& field, std::span<const double> thetas,
                        double gamma);

// Omega_n event of the proof's section on high-probability bounds:
// R_n <= n/(lnln n)^(1/4) and N*_n <= n^gamma. When the event holds, the
// witness also evaluates its consequences (lnln n)^(1/4) <= N*_n and
// V_n >= n^(1 - gamma (1-beta)_+).
struct OmegaWitness {
  bool holds = false;
  std::int64_t r_n = 0;
  double r_bound = 0.0;
  std::int64_t n_star = 0;
  double n_star_bound = 0.0;
  bool n_star_lower_ok = true;  // meaningful only when holds
  bool v_n_lower_ok = true;
  double v_n = 0.0;
  double v_n_bound = 0.0;
};

OmegaWitness omega_indicator(const LocalTimeField& field, double gamma, double beta);

// Same check from precomputed statistics (n, R_n, N*_n, V_n(beta)); the
// field overload delegates here.
OmegaWitness omega_check(std::int64_t n, std::int64_t r_n, std::int64_t n_star,
                         double v_n, double gamma, double beta);

// (1/M) sum_j exp(i u Z_j) on a grid of u values.
std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_grid);

// Kolmogorov-Smirnov sup distance between the empirical CDF of the samples
// and a (monotone) model CDF.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

// Lattice LLT estimator at x: targets the point z* in the admissible residue
// class (z = residue mod d0) nearest floor(b_n x). `residue` is n*s0 mod d0
// for a support point s0 of the scenery. The estimate (b_n/d0) * freq(Z = z*)
// is consistent for C(x); when floor(b_n x) itself is inadmissible, the
// vanishing branch of the theorem applies and freq_at_target must be 0.
struct LatticeMassReport {
  std::int64_t target_point = 0;   // floor(b_n x)
  bool target_admissible = true;
  double freq_at_target = 0.0;
  std::int64_t z_star = 0;
  std::int64_t hits = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

LatticeMassReport lattice_point_mass(std::span<const std::int64_t> z_samples,
                                     std::int64_t n, double beta, double x,
                                     std::int64_t d0, std::int64_t residue);

// Interval LLT estimator (strongly non-lattice sceneries):
// b_n * freq(Z_n in [b_n x + a, b_n x + b]) / (b - a).
struct IntervalMassReport {
  std::int64_t hits = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

IntervalMassReport interval_mass(std::span<const double> z_samples, std::int64_t n,
                                 double beta, double x, double a, double b);

// Exact pmf of Z_n by exhausting step sequences and scenery assignments on
// visited sites (integer-valued sceneries, finite supports, n <= 12).
// Throws when the enumeration guard |steps|^n * |scenery|^n > 1e8 trips.
struct SceneryAtom {
  std::int64_t value;
  double p;
};

std::map<std::int64_t, double> exact_small_oracle(const WalkModel& walk,
                                                  const std::vector<SceneryAtom>& scenery,
                                                  int n);

}  // namespace rwrs
