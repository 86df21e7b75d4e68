#pragma once

#include <cstdint>
#include <vector>

#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

// One realized RWRS trajectory observed at checkpoints: Z_{[n t_i]}, the
// largest scenery magnitude met along the path, and the sampling times.
struct TrajectorySample {
  std::int64_t n = 0;
  std::vector<double> checkpoint_times;       // t_i = step_i / n
  std::vector<std::int64_t> checkpoint_steps;
  std::vector<double> z_values;               // Z at each checkpoint
  double max_abs_scenery = 0.0;
};

// Z accumulation in site-sum form: Z_{[nt_i]} = sum_y xi_y N_{[nt_i]}(y),
// evaluated from the path's per-interval increment maps with compensated
// summation. A path with a single checkpoint (the horizon) needs no
// increment tracking; intermediate checkpoints require it.
TrajectorySample accumulate(const Path& path, const SceneryField& field);

// Critical-case scaling b_n = n^(1/beta) (ln n)^((beta-1)/beta), n >= 2.
double bn(std::int64_t n, double beta);

// Z values divided by bn.
std::vector<double> normalize(const TrajectorySample& sample, double beta);

// max_{k<n} |xi_{S_k}| / b_n: the heavy-jump diagnostic behind the failure
// of tightness for beta < 2.
double max_jump_stat(const TrajectorySample& sample, double beta);

}  // namespace rwrs
