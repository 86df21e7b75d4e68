#include "rwrs/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rwrs {

namespace {

constexpr double kPi = std::numbers::pi;
const double kAtan43 = std::atan(4.0 / 3.0);  // 2*atan(1/2), the k=0 cell mass

std::vector<double> cumulative(const std::vector<StepEntry>& steps) {
  std::vector<double> cum;
  cum.reserve(steps.size());
  double acc = 0.0;
  for (const auto& e : steps) {
    if (e.p < 0.0) throw std::invalid_argument("walk model: negative step probability");
    acc += e.p;
    cum.push_back(acc);
  }
  if (std::abs(acc - 1.0) > 1e-12)
    throw std::invalid_argument("walk model: step probabilities must sum to 1");
  cum.back() = 1.0;
  return cum;
}

}  // namespace

WalkModel builtin_model(const std::string& name) {
  WalkModel m;
  m.label = name;
  if (name == "srw2d") {
    m.kind = WalkKind::srw2d;
    m.dimension = 2;
    m.steps = {{{1, 0}, 0.25}, {{-1, 0}, 0.25}, {{0, 1}, 0.25}, {{0, -1}, 0.25}};
    m.A = 1.0;  // Sigma = diag(1/2, 1/2), A = 2 sqrt(det) = 1
    m.a_known = true;
  } else if (name == "lazy2d") {
    m.kind = WalkKind::lazy2d;
    m.dimension = 2;
    m.steps = {{{0, 0}, 0.5},
               {{1, 0}, 0.125},
               {{-1, 0}, 0.125},
               {{0, 1}, 0.125},
               {{0, -1}, 0.125}};
    m.A = 0.5;  // Sigma = diag(1/4, 1/4)
    m.a_known = true;
  } else if (name == "cauchy1d") {
    m.kind = WalkKind::cauchy1d;
    m.dimension = 1;
    m.A = std::tanh(kPi);  // S_n/n -> CF exp(-a|t|) with a = pi * c, c = tanh(pi)/pi
    m.a_known = true;
  } else if (name == "srw1d") {
    m.kind = WalkKind::srw1d;
    m.dimension = 1;
    m.steps = {{{1, 0}, 0.5}, {{-1, 0}, 0.5}};
    m.a_known = false;  // alpha = 2 > d = 1: outside the critical case, oracle walk only
  } else if (name == "frozen") {
    return table_model("frozen", 2, {{{0, 0}, 1.0}});
  } else {
    throw std::invalid_argument("unknown walk model: " + name);
  }
  if (!m.steps.empty()) m.cum = cumulative(m.steps);
  return m;
}

WalkModel table_model(std::string label, int dimension, std::vector<StepEntry> steps) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("walk model: dimension must be 1 or 2");
  WalkModel m;
  m.label = std::move(label);
  m.kind = WalkKind::table;
  m.dimension = dimension;
  m.steps = std::move(steps);
  m.cum = cumulative(m.steps);
  return m;
}

std::int64_t cauchy1d_step(Rng& rng) {
  for (;;) {
    const double t = std::tan(kPi * (rng.next_unit() - 0.5));
    const double kd = std::nearbyint(t);
    // accept with prob p(k) / (M q(k)) = atan(4/3) / ((1+k^2) atan(1/(k^2+3/4)))
    const double accept = kAtan43 / ((1.0 + kd * kd) * std::atan(1.0 / (kd * kd + 0.75)));
    if (rng.next_unit() < accept) return static_cast<std::int64_t>(kd);
  }
}

Site sample_step(const WalkModel& m, Rng& rng) {
  switch (m.kind) {
    case WalkKind::srw2d: {
      static constexpr std::int64_t dx[4] = {1, -1, 0, 0};
      static constexpr std::int64_t dy[4] = {0, 0, 1, -1};
      const auto b = rng.next_bits(2);
      return {dx[b], dy[b]};
    }
    case WalkKind::lazy2d: {
      static constexpr std::int64_t dx[4] = {1, -1, 0, 0};
      static constexpr std::int64_t dy[4] = {0, 0, 1, -1};
      const auto b = rng.next_bits(3);
      if (b >= 4) return {0, 0};
      return {dx[b], dy[b]};
    }
    case WalkKind::srw1d:
      return {rng.next_bits(1) ? 1 : -1, 0};
    case WalkKind::cauchy1d:
      return {cauchy1d_step(rng), 0};
    case WalkKind::table: {
      const double u = rng.next_unit();
      const auto it = std::lower_bound(m.cum.begin(), m.cum.end(), u);
      const std::size_t i = std::min(static_cast<std::size_t>(it - m.cum.begin()),
                                     m.steps.size() - 1);
      return m.steps[i].d;
    }
  }
  throw std::logic_error("unreachable");
}

Path simulate(const WalkModel& m, std::int64_t n,
              const std::vector<std::int64_t>& checkpoint_steps, Rng& rng,
              bool track_increments) {
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  std::vector<std::int64_t> cps = checkpoint_steps;
  if (!std::is_sorted(cps.begin(), cps.end()))
    throw std::invalid_argument("simulate: checkpoints must be sorted");
  if (!cps.empty() && (cps.front() < 0 || cps.back() > n))
    throw std::invalid_argument("simulate: checkpoints must lie in [0, n]");
  if (cps.empty() || cps.back() != n) cps.push_back(n);

  Path path;
  path.n = n;
  path.checkpoint_steps = cps;
  path.local_time.begin(expected_range(m, n), track_increments);

  Site pos{0, 0};
  std::int64_t k = 0;
  for (std::int64_t cp : cps) {
    while (k < cp) {
      path.local_time.visit(pack_site(m.dimension, pos));
      const Site d = sample_step(m, rng);
      pos.x += d.x;
      pos.y += d.y;
      ++k;
    }
    path.local_time.mark_checkpoint();
    path.checkpoint_positions.push_back(pos);
  }
  return path;
}

}  // namespace rwrs
