#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "rwrs/scenery.hpp"

using namespace rwrs;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent span oracle for a finite integer support: the largest h such
// that the support fits in r + hZ, found as the gcd of differences.
std::int64_t span_of(const std::vector<std::int64_t>& support) {
  std::int64_t g = 0;
  for (std::size_t i = 1; i < support.size(); ++i)
    g = std::gcd(g, std::llabs(support[i] - support[0]));
  return g;
}
}  // namespace

TEST_CASE("builtin lattice spans") {
  CHECK(builtin_scenery("rademacher").d0 == 2);
  CHECK(builtin_scenery("rademacher").d0 == span_of({-1, 1}));
  CHECK(builtin_scenery("zeta-lattice(1.5)").d0 == 1);
  // the {-3,3} example: span 6, and |cos(3u)| = 1 exactly on (pi/3) Z
  CHECK(span_of({-3, 3}) == 6);
  for (int k = -6; k <= 6; ++k)
    CHECK(std::abs(std::cos(3.0 * (2.0 * kPi / 6.0) * k)) == doctest::Approx(1.0));
  for (double u : {0.3, 0.7, 1.0, 1.3})
    CHECK(std::abs(std::cos(3.0 * u)) < 1.0);
}

TEST_CASE("gaussian scenery is strongly non-lattice on a cf grid") {
  auto m = builtin_scenery("gaussian");
  double worst = 0.0;
  for (double u = 5.0; u <= 50.0; u += 0.5)
    worst = std::max(worst, std::abs(scenery_cf(m, u)));
  CHECK(worst == doctest::Approx(std::exp(-12.5)).epsilon(1e-12));
  CHECK(worst < 1.0);
}

TEST_CASE("xi_at memoizes and is order independent") {
  auto model = builtin_scenery("gaussian");
  SceneryField f1(model, 99, 0);
  SceneryField f2(model, 99, 0);
  const std::uint64_t s = 123456789ull;
  const double v = f1.xi_at(s);
  CHECK(f1.xi_at(s) == v);

  std::vector<std::uint64_t> sites;
  for (int i = 0; i < 10000; ++i) sites.push_back(static_cast<std::uint64_t>(i * 2654435761u));
  std::vector<double> forward, backward;
  for (auto it = sites.begin(); it != sites.end(); ++it) forward.push_back(f1.xi_at(*it));
  for (auto it = sites.rbegin(); it != sites.rend(); ++it) backward.push_back(f2.xi_at(*it));
  for (std::size_t i = 0; i < sites.size(); ++i)
    CHECK(forward[i] == backward[sites.size() - 1 - i]);
}

TEST_CASE("distinct seeds give distinct fields") {
  auto model = builtin_scenery("rademacher");
  SceneryField f1(model, 1, 0), f2(model, 2, 0);
  int diff = 0;
  for (int i = 0; i < 1000; ++i)
    diff += f1.xi_at(static_cast<std::uint64_t>(i)) != f2.xi_at(static_cast<std::uint64_t>(i));
  CHECK(diff > 300);
}

TEST_CASE("rademacher site mean over 1e6 distinct sites") {
  auto model = builtin_scenery("rademacher");
  SceneryField f(model, 31337, 0);
  double acc = 0.0;
  for (int i = 0; i < 1000000; ++i) acc += f.xi_at(static_cast<std::uint64_t>(i));
  const double mean = acc / 1e6;
  CHECK(mean > -0.004);
  CHECK(mean < 0.004);
}

TEST_CASE("empirical cf of draws matches the law cf") {
  const std::vector<std::string> names = {"rademacher", "gaussian", "cauchy-cont",
                                          "zeta-lattice(1.5)"};
  const double us[3] = {0.3, 1.0, 3.0};
  const int m = 100000;
  for (const auto& name : names) {
    auto model = builtin_scenery(name);
    const StreamId st = trial_stream(555, StreamRole::scenery, 0);
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = xi_value(model, st, static_cast<std::uint64_t>(i));
    for (double u : us) {
      std::complex<double> acc{0, 0};
      for (double x : xs) acc += std::complex<double>(std::cos(u * x), std::sin(u * x));
      acc /= static_cast<double>(m);
      CHECK(std::abs(acc - scenery_cf(model, u)) < 4.0 / std::sqrt(static_cast<double>(m)));
    }
  }
}

TEST_CASE("tail check against exact tails") {
  SUBCASE("rademacher at t=2: bounded support, zero exceedances") {
    auto rep = tail_check(builtin_scenery("rademacher"), 100000, {2.0});
    CHECK(rep.rows[0].frequency == 0.0);
    CHECK_FALSE(rep.rows[0].flagged);
  }
  SUBCASE("cauchy at t=10 matches the closed-form tail") {
    auto rep = tail_check(builtin_scenery("cauchy-cont"), 1000000, {10.0});
    const double exact = 2.0 * (0.5 - std::atan(10.0) / kPi);
    CHECK(exact == doctest::Approx(0.06345).epsilon(1e-3));
    CHECK(std::abs(rep.rows[0].frequency - exact) < 3.0 * rep.rows[0].stderr_ + 1e-4);
    CHECK_FALSE(rep.rows[0].flagged);
  }
  SUBCASE("gaussian at t=5 is tiny and passes") {
    auto rep = tail_check(builtin_scenery("gaussian"), 1000000, {5.0});
    CHECK(rep.rows[0].frequency <= 1e-5);
    CHECK_FALSE(rep.rows[0].flagged);
  }
  SUBCASE("zeta law respects its computed tail constant") {
    auto model = builtin_scenery("zeta-lattice(0.75)");
    auto rep = tail_check(model, 200000, {1.0, 2.0, 5.0, 20.0, 100.0});
    CHECK_FALSE(rep.any_flagged);
  }
}

TEST_CASE("beta=1 truncated-mean symmetry condition") {
  auto model = builtin_scenery("cauchy-cont");
  const StreamId st = trial_stream(777, StreamRole::scenery, 1);
  for (double t : {1.0, 10.0, 100.0}) {
    double acc = 0.0;
    const int m = 1000000;
    for (int i = 0; i < m; ++i) {
      const double v = xi_value(model, st, static_cast<std::uint64_t>(i));
      if (std::abs(v) <= t) acc += v;
    }
    CHECK(std::abs(acc / m) < 0.01);
  }
}

TEST_CASE("zeta sampler matches its pmf at small magnitudes") {
  auto model = builtin_scenery("zeta-lattice(1.5)");
  const StreamId st = trial_stream(4242, StreamRole::scenery, 2);
  const int m = 200000;
  int ones = 0, twos = 0;
  for (int i = 0; i < m; ++i) {
    const double v = std::abs(xi_value(model, st, static_cast<std::uint64_t>(i)));
    ones += v == 1.0;
    twos += v == 2.0;
  }
  const double p1 = 1.0 / model.zeta_norm;           // k^(-2.5)/zeta(2.5) at k=1
  const double p2 = std::pow(2.0, -2.5) / model.zeta_norm;
  CHECK(std::abs(static_cast<double>(ones) / m - p1) < 4.0 * std::sqrt(p1 / m));
  CHECK(std::abs(static_cast<double>(twos) / m - p2) < 4.0 * std::sqrt(p2 / m));
}

TEST_CASE("scenery preset overrides the draw (test instrument)") {
  auto model = builtin_scenery("gaussian");
  SceneryField f(model, 5, 5);
  f.preset(77, 42.0);
  CHECK(f.xi_at(77) == 42.0);
}
