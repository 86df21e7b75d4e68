#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rwrs/lattice.hpp"
#include "rwrs/local_time.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

enum class WalkKind { srw2d, lazy2d, cauchy1d, srw1d, table };

struct StepEntry {
  Site d;
  double p;
};

// A lattice walk on Z^d (d in {1,2}) in the critical case alpha = d, plus
// the normalization constant A of the limit theorem:
//   d=2: A = 2 sqrt(det Sigma); d=1 (Cauchy-type): S_n/n -> CF exp(-a|t|), A = a.
// Models without a valid A (test walks like srw1d) carry a_known = false.
struct WalkModel {
  std::string label;
  WalkKind kind = WalkKind::table;
  int dimension = 2;
  std::vector<StepEntry> steps;  // finite table (empty for cauchy1d)
  std::vector<double> cum;       // cumulative probabilities for table sampling
  double A = 0.0;
  bool a_known = false;
};

// Builtin models: srw2d, lazy2d, cauchy1d (the canonical Theorem-1 instances)
// plus srw1d and frozen (oracle/test walks, no A). Throws std::invalid_argument
// for unknown names.
WalkModel builtin_model(const std::string& name);

// Walk model from an explicit step table (probabilities must sum to 1 within
// 1e-12). Used for test walks; A unknown.
WalkModel table_model(std::string label, int dimension, std::vector<StepEntry> steps);

// One step draw distributed per the model.
Site sample_step(const WalkModel& m, Rng& rng);

// Discrete Cauchy step: P(X=k) proportional to 1/(1+k^2) on Z, sampled
// exactly by rejection from the rounded continuous Cauchy (whose cell
// probabilities are the arctan differences). No support truncation.
std::int64_t cauchy1d_step(Rng& rng);

struct Path {
  std::int64_t n = 0;
  std::vector<std::int64_t> checkpoint_steps;
  std::vector<Site> checkpoint_positions;
  LocalTimeField local_time;
};

// Runs the walk for n steps counting positions S_0..S_{n-1} (S_n itself is
// not counted). `checkpoint_steps` must be sorted, within [0, n]; a final
// checkpoint at n is appended if missing. With track_increments the field
// records per-site increments between consecutive checkpoints.
Path simulate(const WalkModel& m, std::int64_t n,
              const std::vector<std::int64_t>& checkpoint_steps, Rng& rng,
              bool track_increments = false);

// Rough expected range, used to presize hash tables.
inline std::size_t expected_range(const WalkModel& m, std::int64_t n) {
  if (n <= 64) return static_cast<std::size_t>(n) + 8;
  const double ln = std::log(static_cast<double>(n));
  double guess;
  switch (m.kind) {
    case WalkKind::srw1d:
      guess = 3.0 * std::sqrt(static_cast<double>(n));
      break;
    case WalkKind::table:
      guess = static_cast<double>(n) / 2;
      break;
    default:
      guess = 4.5 * static_cast<double>(n) / ln;
  }
  return static_cast<std::size_t>(std::min(guess, static_cast<double>(n))) + 16;
}

}  // namespace rwrs
