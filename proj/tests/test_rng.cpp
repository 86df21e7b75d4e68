#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rwrs/rng.hpp"

using namespace rwrs;

TEST_CASE("philox is a pure function of counter and key") {
  const auto a = philox2x64(12, 34, 56);
  const auto b = philox2x64(12, 34, 56);
  CHECK(a == b);
  CHECK(philox2x64(12, 34, 57) != a);
  CHECK(philox2x64(13, 34, 56) != a);
}

TEST_CASE("streams with distinct roles and trials differ") {
  const auto s1 = trial_stream(1, StreamRole::walk, 0);
  const auto s2 = trial_stream(1, StreamRole::scenery, 0);
  const auto s3 = trial_stream(1, StreamRole::walk, 1);
  CHECK((s1.key != s2.key || s1.lane != s2.lane));
  CHECK((s1.key != s3.key || s1.lane != s3.lane));
}

TEST_CASE("rng replay is exact") {
  Rng a(7, 1, 2), b(7, 1, 2);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("unit draws live strictly inside (0,1) with sane moments") {
  Rng r(42, 0, 0);
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    s1 += u;
    s2 += u * u;
  }
  CHECK(std::abs(s1 / n - 0.5) < 0.005);
  CHECK(std::abs(s2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("bit buffer uniformity") {
  Rng r(9, 9, 9);
  int counts[4] = {0, 0, 0, 0};
  const int n = 400000;
  for (int i = 0; i < n; ++i) ++counts[r.next_bits(2)];
  for (int c : counts) CHECK(std::abs(c - n / 4) < 4 * std::sqrt(n * 0.25 * 0.75));
}

TEST_CASE("inverse normal cdf matches known quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.3613409024040557).epsilon(1e-6));
}

TEST_CASE("site draws do not depend on query order") {
  const StreamId st = trial_stream(5, StreamRole::scenery, 3);
  std::vector<std::uint64_t> sites = {0, 1, 42, 1000000007ull, static_cast<std::uint64_t>(-5)};
  std::vector<std::array<std::uint64_t, 2>> forward, backward;
  for (auto s : sites) forward.push_back(site_words(st, s, 0));
  for (auto it = sites.rbegin(); it != sites.rend(); ++it)
    backward.push_back(site_words(st, *it, 0));
  for (std::size_t i = 0; i < sites.size(); ++i)
    CHECK(forward[i] == backward[sites.size() - 1 - i]);
}
