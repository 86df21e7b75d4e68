#include "rwrs/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rwrs {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail_domain(const std::string& what) {
  throw std::domain_error("stable params: " + what);
}

// ---------------------------------------------------------------------------
// Inversion quadrature.
//
// Both the density and the CDF are integrals of the form
//   Int_0^inf exp(-a1 u^beta) * trig(x u + a2 u^beta) * w(u) du
// with w(u) = 1 (density, cos) or 1/u (CDF, sin). The substitution u = s^q,
// q = max(1, 1/beta), removes the u^(beta-1) endpoint singularity that a2
// contributes when beta < 1. The truncation point U uses the bound
//   Int_U^inf exp(-a1 u^beta) du <= 2 U^(1-beta) exp(-a1 U^beta)/(beta a1)
// valid once a1 U^beta >= 2 max(1, 1/beta).
// ---------------------------------------------------------------------------

struct Integrand {
  double beta, a1, a2, x, q;
  bool cdf;  // false: density (cos), true: Gil-Pelaez (sin, weight 1/u)

  double operator()(double s) const {
    if (s <= 0.0) {
      if (!cdf) return q > 1.0 ? 0.0 : 1.0;  // cos(0) * q * s^(q-1)
      // sin(x s^q + a2 s^(q*beta)) * q / s has a finite limit at 0.
      if (q > 1.0) return q * a2;            // q*beta == 1 here
      return x + (beta == 1.0 ? a2 : 0.0);   // q == 1
    }
    const double u = q == 1.0 ? s : std::pow(s, q);
    const double ub = std::pow(u, beta);
    const double damp = std::exp(-a1 * ub);
    const double phase = x * u + a2 * ub;
    if (!cdf) {
      const double jac = q == 1.0 ? 1.0 : q * std::pow(s, q - 1.0);
      return damp * std::cos(phase) * jac;
    }
    return damp * std::sin(phase) * q / s;
  }
};

double tail_bound(double beta, double a1, double U) {
  const double t0 = a1 * std::pow(U, beta);
  if (t0 < 2.0 * std::max(1.0, 1.0 / beta)) return HUGE_VAL;
  return 2.0 * std::pow(U, 1.0 - beta) * std::exp(-t0) / (beta * a1);
}

double pick_truncation(double beta, double a1, double tol) {
  double U = std::pow(std::log(std::max(4.0, 1.0 / tol)) / a1, 1.0 / beta);
  U = std::max(U, 1.0);
  for (int i = 0; i < 200; ++i) {
    if (tail_bound(beta, a1, U) <= tol) return U;
    U *= 1.5;
  }
  throw std::runtime_error("stable inversion: truncation bound cannot meet tolerance");
}

struct SimpsonState {
  const Integrand* g;
  double tol_total;
  double err_accum = 0.0;
};

double adaptive_simpson(SimpsonState& st, double a, double fa, double b, double fb,
                        double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = (*st.g)(lm), frm = (*st.g)(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    if (depth <= 0) st.err_accum += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const Integrand& g, double s_hi, double u_hi, double tol) {
  // Pre-split so each segment holds only a few oscillations of the phase.
  const double cycles = (std::abs(g.x) * u_hi + std::abs(g.a2) * std::pow(u_hi, g.beta)) / (2.0 * kPi);
  const std::size_t nseg =
      static_cast<std::size_t>(std::clamp(8.0 + cycles, 8.0, 400000.0));
  SimpsonState st{&g, tol};
  double total = 0.0;
  double s0 = 0.0, f0 = g(0.0);
  for (std::size_t k = 1; k <= nseg; ++k) {
    const double s1 = s_hi * static_cast<double>(k) / static_cast<double>(nseg);
    const double f1 = g(s1);
    const double m = 0.5 * (s0 + s1), fmid = g(m);
    const double whole = (s1 - s0) / 6.0 * (f0 + 4.0 * fmid + f1);
    total += adaptive_simpson(st, s0, f0, s1, f1, m, fmid, whole,
                              tol / static_cast<double>(nseg), 28);
    s0 = s1;
    f0 = f1;
  }
  if (st.err_accum > tol)
    throw std::runtime_error("stable inversion: quadrature failed to converge");
  return total;
}

}  // namespace

void validate(const StableParams& p) {
  if (!(p.beta > 0.0) || !(p.beta <= 2.0)) fail_domain("beta must lie in (0, 2]");
  if (!(p.a1 > 0.0) || !std::isfinite(p.a1)) fail_domain("a1 must be positive and finite");
  if (!std::isfinite(p.a2)) fail_domain("a2 must be finite");
  if (p.beta == 2.0) {
    if (p.a2 != 0.0) fail_domain("a2 must vanish at beta = 2");
    return;
  }
  if (p.beta == 1.0) return;  // a2 is a location shift
  const double cap = std::abs(std::tan(kPi * p.beta / 2.0));
  if (std::abs(p.a2 / p.a1) > cap) {
    std::ostringstream os;
    os << "skew bound violated: |a2/a1| = " << std::abs(p.a2 / p.a1)
       << " exceeds |tan(pi*beta/2)| = " << cap;
    fail_domain(os.str());
  }
}

std::complex<double> cf_eval(const StableParams& p, double u) {
  if (u == 0.0) return {1.0, 0.0};
  const double sgn = u > 0.0 ? 1.0 : -1.0;
  const double mag = std::pow(std::abs(u), p.beta);
  return std::exp(std::complex<double>(-mag * p.a1, -mag * p.a2 * sgn));
}

double sample(const StableParams& p, Rng& rng) {
  if (p.beta == 2.0) {
    return std::sqrt(2.0 * p.a1) * inverse_normal_cdf(rng.next_unit());
  }
  if (p.beta == 1.0) {
    return p.a1 * std::tan(kPi * (rng.next_unit() - 0.5)) - p.a2;
  }
  // Chambers-Mallows-Stuck with the identification sigma^beta = a1 and
  // kappa*tan(pi*beta/2) = -a2/a1, written directly in terms of a2/a1.
  const double alpha = p.beta;
  const double ratio = p.a2 / p.a1;
  const double theta0 = std::atan(-ratio) / alpha;
  const double s_fac = std::pow(1.0 + ratio * ratio, 0.5 / alpha);
  const double v = kPi * (rng.next_unit() - 0.5);
  const double w = -std::log(rng.next_unit());
  const double t = alpha * (v + theta0);
  const double x = s_fac * std::sin(t) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - t) / w, (1.0 - alpha) / alpha);
  return std::pow(p.a1, 1.0 / alpha) * x;
}

double density(const StableParams& p, double x, double tol) {
  validate(p);
  if (!(tol > 0.0)) throw std::domain_error("density: tol must be positive");
  const double u_hi = pick_truncation(p.beta, p.a1, tol * kPi / 2.0);
  const double q = std::max(1.0, 1.0 / p.beta);
  Integrand g{p.beta, p.a1, p.a2, x, q, false};
  const double s_hi = std::pow(u_hi, 1.0 / q);
  return integrate(g, s_hi, u_hi, tol * kPi / 2.0) / kPi;
}

double cdf_point(const StableParams& p, double x, double tol) {
  validate(p);
  if (!(tol > 0.0)) throw std::domain_error("cdf_point: tol must be positive");
  const double u_hi = pick_truncation(p.beta, p.a1, tol * kPi / 2.0);
  const double q = std::max(1.0, 1.0 / p.beta);
  Integrand g{p.beta, p.a1, p.a2, x, q, true};
  const double s_hi = std::pow(u_hi, 1.0 / q);
  const double v = 0.5 + integrate(g, s_hi, u_hi, tol * kPi / 2.0) / kPi;
  return std::clamp(v, 0.0, 1.0);
}

StableCdf::StableCdf(const StableParams& p, std::size_t grid_size, double tol)
    : params_(p) {
  validate(p);
  const double scale = std::pow(p.a1, 1.0 / p.beta);
  xs_.reserve(grid_size - 1);
  fs_.reserve(grid_size - 1);
  for (std::size_t j = 1; j < grid_size; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(grid_size);
    xs_.push_back(scale * std::tan(kPi * (frac - 0.5)));
  }
  for (double x : xs_) fs_.push_back(cdf_point(p, x, tol));
  // Quadrature noise can break monotonicity by O(tol); restore it.
  for (std::size_t j = 1; j < fs_.size(); ++j) fs_[j] = std::max(fs_[j], fs_[j - 1]);
}

double StableCdf::operator()(double x) const {
  if (x <= xs_.front()) {
    if (params_.beta == 2.0)
      return 0.5 * std::erfc(-x / (2.0 * std::sqrt(params_.a1)));
    const double f0 = std::max(fs_.front(), 1e-300);
    return f0 * std::pow(xs_.front() / std::min(x, xs_.front()), params_.beta);
  }
  if (x >= xs_.back()) {
    if (params_.beta == 2.0)
      return 1.0 - 0.5 * std::erfc(x / (2.0 * std::sqrt(params_.a1)));
    const double f1 = std::max(1.0 - fs_.back(), 1e-300);
    return 1.0 - f1 * std::pow(xs_.back() / std::max(x, xs_.back()), params_.beta);
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return fs_[j - 1] + t * (fs_[j] - fs_[j - 1]);
}

double limit_constant(double beta, double A) {
  if (!(beta > 0.0) || !(beta <= 2.0)) throw std::domain_error("limit_constant: beta in (0,2]");
  if (!(A > 0.0)) throw std::domain_error("limit_constant: A must be positive");
  if (beta == 1.0) return 1.0;  // Gamma(2) = 1 and the exponent vanishes
  return std::exp((std::lgamma(beta + 1.0) - (beta - 1.0) * std::log(kPi * A)) / beta);
}

LimitLaw make_limit_law(const StableParams& base, double A) {
  validate(base);
  return LimitLaw{base, limit_constant(base.beta, A)};
}

double limit_density(const LimitLaw& law, double x, double tol) {
  const double c = law.scale_c;
  return density(law.base, x / c, tol * c) / c;
}

}  // namespace rwrs
