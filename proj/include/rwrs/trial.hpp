#pragma once

#include <cstdint>
#include <vector>

#include "rwrs/local_time.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

// One Monte Carlo trial: walk simulation with the scenery folded into the
// same site probe (the slot caches the realized xi), streaming Z and the
// running max |xi| along the path. Boundaries are absolute step counts; Z
// and the walk statistics are recorded at each. Randomness comes from
// streams keyed by (seed, role, trial), so results are independent of
// scheduling.
//
// Two engines sit behind run_trial: a tiled-grid engine for the local walks
// (srw2d, lazy2d, srw1d) and a hash-map engine for everything else and for
// runs that need the occupation map afterwards (track_increments or
// export_field). Both consume the random streams identically and produce
// bit-identical results.
struct TrialSetup {
  const WalkModel* walk = nullptr;
  const SceneryModel* scenery = nullptr;  // null: walk-only statistics
  std::int64_t n = 0;                     // horizon; boundaries.back() == n
  std::vector<std::int64_t> boundaries;
  bool track_increments = false;          // per-interval increment maps (hash engine)
  bool export_field = false;              // leave the occupation map in `field`
  std::vector<double> v_betas;            // report V_beta at each boundary
};

struct TrialResult {
  std::vector<double> z;                // Z at each boundary (compensated sum)
  std::vector<std::int64_t> z_int;      // exact accumulation, integer sceneries
  std::vector<double> max_abs_xi;       // running max |xi_{S_k}| per boundary
  std::vector<std::int64_t> range;      // R at each boundary
  std::vector<std::int64_t> max_count;  // N* at each boundary
  std::vector<std::uint64_t> sum_sq;    // sum N^2 at each boundary
  std::vector<double> v;                // V_beta, boundary-major over v_betas
};

void run_trial(const TrialSetup& setup, std::uint64_t seed, std::uint64_t trial,
               LocalTimeField& field, TrialResult& out);

}  // namespace rwrs
