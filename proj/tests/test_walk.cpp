#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "rwrs/walk.hpp"

using namespace rwrs;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("builtin models carry the exact normalization constants") {
  CHECK(builtin_model("srw2d").A == 1.0);
  CHECK(builtin_model("lazy2d").A == 0.5);
  CHECK(builtin_model("cauchy1d").A == doctest::Approx(std::tanh(kPi)).epsilon(1e-12));
  CHECK(builtin_model("cauchy1d").A == doctest::Approx(0.996272).epsilon(1e-5));
  CHECK_FALSE(builtin_model("srw1d").a_known);
  CHECK_THROWS_AS(builtin_model("hexagonal"), std::invalid_argument);
}

TEST_CASE("cauchy1d A cross-checked by an independent cf oracle") {
  // a = lim n (1 - Re cf_X(t/n)) / |t|, evaluated by direct series summation
  // of the normalized 1/(1+k^2) law with no use of the closed form.
  const double s = 0.01;  // plays the role of t/n
  const std::size_t K = 2000000;
  double norm_half = 0.0, num = 0.0;
  for (std::size_t k = K; k >= 1; --k) {
    const double w = 1.0 / (1.0 + static_cast<double>(k) * static_cast<double>(k));
    norm_half += w;
    num += (1.0 - std::cos(static_cast<double>(k) * s)) * w;
  }
  norm_half += std::atan(1.0 / static_cast<double>(K));  // integral tail
  const double c = 1.0 / (1.0 + 2.0 * norm_half);
  const double g = 2.0 * c * num / s;
  const double a_est = g + s / 2.0;  // first-order endpoint correction
  CHECK(std::abs(a_est - builtin_model("cauchy1d").A) < 1e-3);
}

TEST_CASE("step frequencies match the tables") {
  const int m = 1000000;

  SUBCASE("srw2d e1 frequency") {
    auto model = builtin_model("srw2d");
    Rng rng(1, 2, 3);
    int e1 = 0;
    for (int i = 0; i < m; ++i) {
      const Site d = sample_step(model, rng);
      e1 += (d.x == 1 && d.y == 0);
    }
    const double f = static_cast<double>(e1) / m;
    CHECK(f > 0.248);
    CHECK(f < 0.252);
  }

  SUBCASE("lazy2d stay frequency") {
    auto model = builtin_model("lazy2d");
    Rng rng(4, 5, 6);
    int stay = 0;
    for (int i = 0; i < m; ++i) {
      const Site d = sample_step(model, rng);
      stay += (d.x == 0 && d.y == 0);
    }
    const double f = static_cast<double>(stay) / m;
    CHECK(f > 0.497);
    CHECK(f < 0.503);
  }

  SUBCASE("cauchy1d mass at zero matches the normalization") {
    auto model = builtin_model("cauchy1d");
    Rng rng(7, 8, 9);
    int zero = 0;
    for (int i = 0; i < m; ++i) zero += (sample_step(model, rng).x == 0);
    const double f = static_cast<double>(zero) / m;
    const double p0 = std::tanh(kPi) / kPi;  // 1 / sum_k 1/(1+k^2)
    CHECK(std::abs(f - p0) < 0.002);
  }

  SUBCASE("cauchy1d single-step empirical cf against the series") {
    auto model = builtin_model("cauchy1d");
    Rng rng(17, 0, 0);
    const double u = 0.7;
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      acc += std::cos(u * static_cast<double>(sample_step(model, rng).x));
    // closed form cosh(pi - |u|)/cosh(pi) for |u| <= pi
    const double cf = std::cosh(kPi - u) / std::cosh(kPi);
    CHECK(std::abs(acc / m - cf) < 0.004);
  }
}

TEST_CASE("simulate counts S_0..S_{n-1} and conserves mass") {
  SUBCASE("frozen walk") {
    auto frozen = builtin_model("frozen");
    Rng rng(1, 1, 1);
    Path p = simulate(frozen, 5, {}, rng);
    CHECK(p.local_time.n() == 5);
    CHECK(p.local_time.range() == 1);
    CHECK(p.local_time.max_count() == 5);
    const auto* slot = p.local_time.counts().find(pack_site(2, {0, 0}));
    REQUIRE(slot != nullptr);
    CHECK(slot->count == 5);
  }

  SUBCASE("one step: only the origin is counted") {
    auto model = builtin_model("srw2d");
    Rng rng(2, 2, 2);
    Path p = simulate(model, 1, {}, rng);
    CHECK(p.local_time.n() == 1);
    CHECK(p.local_time.range() == 1);
    CHECK(p.local_time.counts().find(pack_site(2, {0, 0})) != nullptr);
  }

  SUBCASE("conservation at n = 1e6") {
    auto model = builtin_model("srw2d");
    Rng rng(3, 3, 3);
    Path p = simulate(model, 1000000, {}, rng);
    std::int64_t total = 0;
    std::int64_t max_c = 0;
    p.local_time.counts().for_each([&](const SiteMap::Slot& s) {
      total += s.count;
      max_c = std::max<std::int64_t>(max_c, s.count);
    });
    CHECK(total == 1000000);
    CHECK(p.local_time.range() <= 1000000);
    CHECK(p.local_time.max_count() == max_c);
    CHECK(p.local_time.max_count() >= 1);
  }
}

TEST_CASE("checkpoint increments reconstruct monotone prefix counts") {
  auto model = builtin_model("srw2d");
  Rng rng(11, 0, 5);
  const std::vector<std::int64_t> cps = {2500, 5000, 10000};
  Path p = simulate(model, 10000, cps, rng, /*track_increments=*/true);
  REQUIRE(p.local_time.interval_count() == 3);

  // prefix counts from increments must be nondecreasing in t and sum to the
  // final counts
  std::unordered_map<std::uint64_t, std::int64_t> prefix;
  for (std::size_t i = 0; i < 3; ++i) {
    p.local_time.increments(i).for_each(
        [&](const SiteMap::Slot& s) { prefix[s.key] += s.count; });
    std::int64_t mass = 0;
    for (const auto& [k, v] : prefix) {
      mass += v;
      const auto* fin = p.local_time.counts().find(k);
      REQUIRE(fin != nullptr);
      CHECK(v <= static_cast<std::int64_t>(fin->count));
    }
    CHECK(mass == p.local_time.checkpoints()[i].step);
  }
  for (const auto& [k, v] : prefix) {
    const auto* fin = p.local_time.counts().find(k);
    CHECK(v == static_cast<std::int64_t>(fin->count));
  }
}

TEST_CASE("max local time declines relative to n^rho across decades") {
  // The o(n^rho) law: the ratio N*_n / n^0.25 should trend down in n.
  auto model = builtin_model("srw2d");
  double mean_small = 0.0, mean_big = 0.0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    Rng r1(100 + t, 0, 0), r2(200 + t, 0, 0);
    Path a = simulate(model, 10000, {}, r1);
    Path b = simulate(model, 1000000, {}, r2);
    mean_small += static_cast<double>(a.local_time.max_count()) / std::pow(1e4, 0.25);
    mean_big += static_cast<double>(b.local_time.max_count()) / std::pow(1e6, 0.25);
  }
  CHECK(mean_big / trials < mean_small / trials);
}
