#include <doctest.h>

#include <cmath>
#include <vector>

#include "rwrs/rwrs_process.hpp"
#include "rwrs/statistics.hpp"
#include "rwrs/trial.hpp"

using namespace rwrs;

TEST_CASE("fused kernel equals modular simulate + accumulate") {
  const std::uint64_t seed = 314159, trial = 7;
  const std::int64_t n = 10000;
  const std::vector<std::int64_t> cps = {2500, 10000};

  for (const char* scenery_name : {"rademacher", "gaussian", "cauchy-cont"}) {
    CAPTURE(scenery_name);
    auto walk = builtin_model("srw2d");
    auto scenery = builtin_scenery(scenery_name);

    // fused pass on the hash engine (export the field for comparison)
    TrialSetup setup;
    setup.walk = &walk;
    setup.scenery = &scenery;
    setup.n = n;
    setup.boundaries = cps;
    setup.export_field = true;
    LocalTimeField field(64);
    TrialResult out;
    run_trial(setup, seed, trial, field, out);

    // modular pass on the same streams
    Rng walk_rng(trial_stream(seed, StreamRole::walk, trial));
    Path p = simulate(walk, n, cps, walk_rng, /*track_increments=*/true);
    SceneryField sf(scenery, trial_stream(seed, StreamRole::scenery, trial));
    const auto traj = accumulate(p, sf);

    // identical occupation measure
    REQUIRE(p.local_time.range() == field.range());
    p.local_time.counts().for_each([&](const SiteMap::Slot& s) {
      const auto* other = field.counts().find(s.key);
      REQUIRE(other != nullptr);
      CHECK(other->count == s.count);
    });

    // streaming Z equals the site-sum form at every checkpoint
    REQUIRE(out.z.size() == traj.z_values.size());
    for (std::size_t i = 0; i < out.z.size(); ++i) {
      if (scenery.integer_valued)
        CHECK(static_cast<double>(out.z_int[i]) == traj.z_values[i]);
      else
        CHECK(out.z[i] == doctest::Approx(traj.z_values[i]).epsilon(1e-9));
    }
    CHECK(out.max_abs_xi.back() == doctest::Approx(traj.max_abs_scenery).epsilon(1e-12));
  }
}

TEST_CASE("tiled and hash engines are bit-identical") {
  const std::vector<std::int64_t> cps = {7000, 20000};
  for (const char* walk_name : {"srw2d", "lazy2d", "srw1d"}) {
    for (const char* scenery_name :
         {"", "rademacher", "gaussian", "cauchy-cont", "zeta-lattice(1.5)"}) {
      CAPTURE(walk_name);
      CAPTURE(scenery_name);
      auto walk = builtin_model(walk_name);
      SceneryModel scenery;
      const bool has_scenery = scenery_name[0] != '\0';
      if (has_scenery) scenery = builtin_scenery(scenery_name);

      TrialSetup setup;
      setup.walk = &walk;
      setup.scenery = has_scenery ? &scenery : nullptr;
      setup.n = cps.back();
      setup.boundaries = cps;
      setup.v_betas = {0.5, 1.0, 1.5, 2.0};

      LocalTimeField field(64);
      TrialResult tiled, hashed;
      run_trial(setup, 42, 11, field, tiled);     // tiled engine
      setup.export_field = true;                  // forces the hash engine
      run_trial(setup, 42, 11, field, hashed);

      CHECK(tiled.z == hashed.z);  // bitwise: same stream, same add order
      CHECK(tiled.z_int == hashed.z_int);
      CHECK(tiled.max_abs_xi == hashed.max_abs_xi);
      CHECK(tiled.range == hashed.range);
      CHECK(tiled.max_count == hashed.max_count);
      CHECK(tiled.sum_sq == hashed.sum_sq);
      REQUIRE(tiled.v.size() == hashed.v.size());
      for (std::size_t i = 0; i < tiled.v.size(); ++i)
        CHECK(tiled.v[i] == doctest::Approx(hashed.v[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-boundary v values match v_beta on the exported field") {
  auto walk = builtin_model("srw2d");
  TrialSetup setup;
  setup.walk = &walk;
  setup.n = 5000;
  setup.boundaries = {5000};
  setup.v_betas = {0.5, 1.0, 1.7, 2.0};
  setup.export_field = true;
  LocalTimeField field(64);
  TrialResult out;
  run_trial(setup, 5, 0, field, out);
  for (std::size_t j = 0; j < setup.v_betas.size(); ++j)
    CHECK(out.v[j] == doctest::Approx(v_beta(field, setup.v_betas[j])).epsilon(1e-12));
  // consistency with the omega witness path
  const auto w = omega_check(5000, out.range[0], out.max_count[0], out.v[1], 0.5, 1.0);
  CHECK(w.v_n == 5000.0);
}

TEST_CASE("trials are reproducible and distinct across indices") {
  auto walk = builtin_model("srw2d");
  auto scenery = builtin_scenery("gaussian");
  TrialSetup setup;
  setup.walk = &walk;
  setup.scenery = &scenery;
  setup.n = 1000;
  setup.boundaries = {1000};

  LocalTimeField f1(64), f2(64);
  TrialResult a, b, c;
  run_trial(setup, 1, 0, f1, a);
  run_trial(setup, 1, 0, f2, b);
  CHECK(a.z == b.z);
  run_trial(setup, 1, 1, f2, c);
  CHECK(a.z != c.z);
}

TEST_CASE("walk-only trials leave z buffers empty but fill boundary stats") {
  auto walk = builtin_model("lazy2d");
  TrialSetup setup;
  setup.walk = &walk;
  setup.n = 5000;
  setup.boundaries = {1000, 5000};
  LocalTimeField field(64);
  TrialResult out;
  run_trial(setup, 3, 3, field, out);
  CHECK(out.z.empty());
  REQUIRE(out.range.size() == 2);
  CHECK(out.range[0] <= out.range[1]);
  CHECK(out.sum_sq[0] <= out.sum_sq[1]);
  CHECK(out.max_count[0] >= 1);
}

TEST_CASE("cauchy1d trial runs and conserves mass") {
  auto walk = builtin_model("cauchy1d");
  auto scenery = builtin_scenery("rademacher");
  TrialSetup setup;
  setup.walk = &walk;
  setup.scenery = &scenery;
  setup.n = 50000;
  setup.boundaries = {50000};
  setup.export_field = true;
  LocalTimeField field(64);
  TrialResult out;
  run_trial(setup, 99, 0, field, out);
  CHECK(field.n() == 50000);
  std::int64_t total = 0;
  field.counts().for_each([&](const SiteMap::Slot& s) { total += s.count; });
  CHECK(total == 50000);
  CHECK(std::llabs(out.z_int[0]) <= 50000);
  CHECK((out.z_int[0] % 2 + 2) % 2 == 0);  // Z_n = n mod 2 with rademacher
}
