#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rwrs/stable.hpp"

using namespace rwrs;

namespace {
constexpr double kPi = std::numbers::pi;

double normal_cdf(double x, double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); }
}  // namespace

TEST_CASE("validate accepts and rejects per the skew constraint") {
  CHECK_NOTHROW(validate({2.0, 0.5, 0.0}));
  CHECK_THROWS_AS(validate({2.0, 0.5, 0.1}), std::domain_error);
  // tan(pi/4) = 1, so a2 = 1.01 is just outside for beta = 1/2
  CHECK_THROWS_AS(validate({0.5, 1.0, 1.01 * std::tan(kPi / 4.0)}), std::domain_error);
  CHECK_NOTHROW(validate({0.5, 1.0, 0.99 * std::tan(kPi / 4.0)}));
  CHECK_NOTHROW(validate({1.5, 1.0, 0.3}));
  CHECK_THROWS_AS(validate({0.0, 1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(validate({2.0, -1.0, 0.0}), std::domain_error);
  CHECK_NOTHROW(validate({1.0, 1.0, 5.0}));  // location shift at beta = 1
}

TEST_CASE("cf_eval pinned values") {
  CHECK(cf_eval({2.0, 0.5, 0.0}, 0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(cf_eval({2.0, 0.5, 0.0}, 1.0) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(cf_eval({1.0, 1.0, 0.0}, -2.0) - std::exp(-2.0)) < 1e-15);
}

TEST_CASE("cf_eval symmetry and modulus over random parameters") {
  Rng rng(2024, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    StableParams p;
    p.beta = 0.2 + 1.8 * rng.next_unit();
    p.a1 = 0.1 + 3.0 * rng.next_unit();
    if (std::abs(p.beta - 1.0) < 0.05) p.beta = 1.0;
    if (std::abs(p.beta - 2.0) < 0.05) p.beta = 2.0;
    if (p.beta == 2.0)
      p.a2 = 0.0;
    else if (p.beta == 1.0)
      p.a2 = 2.0 * rng.next_unit() - 1.0;
    else
      p.a2 = (2.0 * rng.next_unit() - 1.0) * 0.999 * p.a1 * std::abs(std::tan(kPi * p.beta / 2));
    validate(p);
    const double u = 8.0 * (rng.next_unit() - 0.5);
    const auto f = cf_eval(p, u);
    const auto g = cf_eval(p, -u);
    CHECK(std::abs(f - std::conj(g)) < 1e-14);
    CHECK(std::abs(std::abs(f) - std::exp(-p.a1 * std::pow(std::abs(u), p.beta))) < 1e-14);
    CHECK(std::abs(f) <= 1.0 + 1e-15);
  }
}

TEST_CASE("sampler matches Gaussian and Cauchy closed forms") {
  Rng rng(7, 7, 7);
  const int m = 1000000;

  SUBCASE("beta=2 variance is 2*a1") {
    const StableParams p{2.0, 0.5, 0.0};
    double s2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = sample(p, rng);
      s2 += v * v;
    }
    CHECK(s2 / m == doctest::Approx(1.0).epsilon(0.01));
  }

  SUBCASE("beta=1 three-quarter quantile is 1") {
    const StableParams p{1.0, 1.0, 0.0};
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = sample(p, rng);
    std::nth_element(v.begin(), v.begin() + (3 * m / 4), v.end());
    CHECK(v[3 * m / 4] == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("empirical cf of samples tracks cf_eval for all three reference laws") {
  const std::vector<StableParams> sets = {{2.0, 0.5, 0.0}, {1.0, 1.0, 0.0}, {1.5, 1.0, 0.3}};
  const double us[3] = {0.5, 1.0, 2.0};
  const int m = 200000;
  for (const auto& p : sets) {
    Rng rng(11, p.beta * 100, 0);
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = sample(p, rng);
    for (double u : us) {
      std::complex<double> acc{0, 0};
      for (double x : xs) acc += std::complex<double>(std::cos(u * x), std::sin(u * x));
      acc /= static_cast<double>(m);
      CHECK(std::abs(acc - cf_eval(p, u)) < 4.0 / std::sqrt(static_cast<double>(m)));
    }
  }
}

TEST_CASE("density pinned closed-form values") {
  CHECK(density({2.0, 0.5, 0.0}, 0.0, 1e-7) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-5));
  CHECK(density({1.0, 1.0, 0.0}, 0.0, 1e-7) == doctest::Approx(1.0 / kPi).epsilon(1e-5));
  CHECK(density({1.0, 1.0, 0.0}, 1.0, 1e-7) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-5));
  // beta=2 at x=1: N(0,1) density
  CHECK(density({2.0, 0.5, 0.0}, 1.0, 1e-8) ==
        doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * kPi)).epsilon(1e-5));
}

TEST_CASE("density never dips below -tol and integrates to one") {
  struct Case {
    StableParams p;
    double x_cut;
  };
  // x_cut chosen so the true tail mass is below 1e-3
  const std::vector<Case> cases = {
      {{2.0, 0.5, 0.0}, 8.0}, {{1.0, 1.0, 0.0}, 700.0}, {{1.5, 1.0, 0.3}, 400.0}};
  for (const auto& c : cases) {
    const double tol = 1e-6;
    // integrate with the substitution x = tan(v): the integrand stays bounded
    const double scale = std::pow(c.p.a1, 1.0 / c.p.beta);
    const double v_hi = std::atan(c.x_cut / scale);
    const int nodes = 2001;
    double mass = 0.0;
    double prev_g = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double v = -v_hi + 2.0 * v_hi * i / (nodes - 1);
      const double x = scale * std::tan(v);
      const double sec2 = 1.0 + std::tan(v) * std::tan(v);
      const double f = density(c.p, x, tol);
      CHECK(f >= -tol);
      const double g = f * scale * sec2;
      if (i > 0) mass += 0.5 * (g + prev_g) * (2.0 * v_hi / (nodes - 1));
      prev_g = g;
    }
    CHECK(mass > 1.0 - 5e-3);
    CHECK(mass < 1.0 + 5e-4);
  }
}

TEST_CASE("cdf_point matches Gaussian and Cauchy distribution functions") {
  for (double x : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.7, 4.0}) {
    CHECK(cdf_point({2.0, 0.5, 0.0}, x, 1e-8) ==
          doctest::Approx(normal_cdf(x, 1.0)).epsilon(1e-6));
    CHECK(cdf_point({1.0, 1.0, 0.0}, x, 1e-8) ==
          doctest::Approx(0.5 + std::atan(x) / kPi).epsilon(1e-6));
  }
}

TEST_CASE("tabulated cdf agrees with pointwise inversion off-grid") {
  const StableParams p{1.5, 1.0, 0.3};
  StableCdf cdf(p, 2048, 1e-7);
  for (double x : {-7.3, -2.1, -0.33, 0.0, 0.8, 3.9, 11.0}) {
    CHECK(cdf(x) == doctest::Approx(cdf_point(p, x, 1e-8)).epsilon(5e-5));
  }
  // monotone
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    const double f = cdf(x);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("ks distance between sampler and integrated cdf stays below 0.01") {
  const std::vector<StableParams> sets = {{2.0, 0.5, 0.0}, {1.0, 1.0, 0.0}, {1.5, 1.0, 0.3}};
  const int m = 100000;
  for (const auto& p : sets) {
    Rng rng(3, static_cast<std::uint64_t>(p.beta * 10), 5);
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = sample(p, rng);
    std::sort(xs.begin(), xs.end());
    StableCdf cdf(p, 2048, 1e-7);
    double d = 0.0;
    for (int i = 0; i < m; ++i) {
      const double f = cdf(xs[i]);
      d = std::max(d, std::abs(f - static_cast<double>(i) / m));
      d = std::max(d, std::abs(static_cast<double>(i + 1) / m - f));
    }
    CHECK(d < 0.01);
  }
}

TEST_CASE("limit constant closed forms") {
  for (double A : {0.25, 0.5, 1.0, 2.0, 7.7}) CHECK(limit_constant(1.0, A) == 1.0);
  CHECK(limit_constant(2.0, 1.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));
  CHECK(limit_constant(2.0, 2.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("limit density pinned values") {
  // beta=2, a1=1/2, A=1: limit is N(0, 2/pi)
  const LimitLaw l2 = make_limit_law({2.0, 0.5, 0.0}, 1.0);
  CHECK(limit_density(l2, 0.0, 1e-7) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(limit_density(l2, 1.0, 1e-7) ==
        doctest::Approx(0.5 * std::exp(-kPi / 4.0)).epsilon(1e-5));
  // beta=1: scale_c = 1, standard Cauchy
  const LimitLaw l1 = make_limit_law({1.0, 1.0, 0.0}, 1.0);
  CHECK(l1.scale_c == 1.0);
  CHECK(limit_density(l1, 0.0, 1e-7) == doctest::Approx(1.0 / kPi).epsilon(1e-5));
}

TEST_CASE("limit law density integrates to one") {
  const LimitLaw law = make_limit_law({1.5, 1.0, 0.3}, 0.5);
  const double c = law.scale_c;
  double mass = 0.0;
  const double v_hi = std::atan(300.0);
  const int nodes = 1501;
  double prev_g = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double v = -v_hi + 2.0 * v_hi * i / (nodes - 1);
    const double x = c * std::tan(v);
    const double sec2 = 1.0 + std::tan(v) * std::tan(v);
    const double g = limit_density(law, x, 1e-6) * c * sec2;
    if (i > 0) mass += 0.5 * (g + prev_g) * (2.0 * v_hi / (nodes - 1));
    prev_g = g;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(5e-3));
}
