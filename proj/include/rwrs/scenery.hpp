#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/stable.hpp"

namespace rwrs {

enum class SceneryKind { rademacher, gaussian, cauchy_cont, zeta_lattice };

// An i.i.d. scenery law in the normal domain of attraction of S_beta.
// Lattice laws carry the span d0 ({u : |cf(u)|=1} = (2 pi / d0) Z) and a
// support point for residue bookkeeping; all laws carry the tail constant
// C_xi with P(|xi| >= t) <= C_xi t^-beta.
struct SceneryModel {
  std::string label;
  SceneryKind kind = SceneryKind::rademacher;
  StableParams attraction;
  bool lattice = true;
  std::int64_t d0 = 2;
  std::int64_t support_point = 1;  // some support value (lattice only)
  double c_xi = 1.0;
  bool integer_valued = true;
  // zeta-lattice internals
  double zeta_beta = 0.0;
  double zeta_norm = 0.0;              // one-sided normalization sum_{k>=1} k^(-1-beta)
  std::vector<double> zeta_cum;        // cumulative one-sided pmf over k = 1..K
};

// Builtins: "rademacher", "gaussian", "cauchy-cont", "zeta-lattice" (with
// beta parameter, also accepted inline as "zeta-lattice(1.5)").
SceneryModel builtin_scenery(const std::string& name, double zeta_beta = 1.5);

// The scenery value at a site: a pure function of (stream, site). Repeated
// evaluation returns the identical value regardless of query order.
double xi_value(const SceneryModel& m, StreamId stream, std::uint64_t site_key);

// Memoizing per-trial view of a scenery realization. Values may be preset
// (test instrument); otherwise the first query draws via xi_value.
class SceneryField {
 public:
  SceneryField(const SceneryModel& model, StreamId stream)
      : model_(&model), stream_(stream) {}
  SceneryField(const SceneryModel& model, std::uint64_t master, std::uint64_t trial)
      : model_(&model), stream_(trial_stream(master, StreamRole::scenery, trial)) {}

  double xi_at(std::uint64_t site_key) const {
    auto it = memo_.find(site_key);
    if (it != memo_.end()) return it->second;
    const double v = xi_value(*model_, stream_, site_key);
    memo_.emplace(site_key, v);
    return v;
  }

  void preset(std::uint64_t site_key, double value) { memo_[site_key] = value; }

  const SceneryModel& model() const { return *model_; }
  StreamId stream() const { return stream_; }

 private:
  const SceneryModel* model_;
  StreamId stream_;
  mutable std::unordered_map<std::uint64_t, double> memo_;
};

struct TailCheckRow {
  double t = 0.0;
  double frequency = 0.0;
  double bound = 0.0;      // C_xi * t^-beta
  double stderr_ = 0.0;    // binomial standard error of the frequency
  bool flagged = false;    // frequency exceeds bound by more than 3 s.e.
};

struct TailCheckReport {
  std::vector<TailCheckRow> rows;
  bool any_flagged = false;
};

// Empirical check of the tail bound P(|xi| >= t) <= C_xi t^-beta.
TailCheckReport tail_check(const SceneryModel& m, std::int64_t sample_count,
                           const std::vector<double>& t_grid, std::uint64_t seed = 1);

// Characteristic function of the scenery law (series evaluation for the
// zeta law); used by tests and the span diagnostics.
std::complex<double> scenery_cf(const SceneryModel& m, double u);

}  // namespace rwrs
