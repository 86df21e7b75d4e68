#include "rwrs/rwrs_process.hpp"

#include <cmath>
#include <stdexcept>

namespace rwrs {

namespace {

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

TrajectorySample accumulate(const Path& path, const SceneryField& field) {
  TrajectorySample out;
  out.n = path.n;
  out.checkpoint_steps = path.checkpoint_steps;
  for (std::int64_t s : path.checkpoint_steps)
    out.checkpoint_times.push_back(static_cast<double>(s) / static_cast<double>(path.n));

  const auto& lt = path.local_time;
  if (path.checkpoint_steps.size() > 1 && !lt.has_increments())
    throw std::invalid_argument(
        "accumulate: intermediate checkpoints require increment tracking");

  Kahan z;
  if (lt.has_increments()) {
    for (std::size_t i = 0; i < lt.interval_count(); ++i) {
      lt.increments(i).for_each([&](const SiteMap::Slot& s) {
        z.add(field.xi_at(s.key) * static_cast<double>(s.count));
      });
      out.z_values.push_back(z.sum);
    }
  } else {
    lt.counts().for_each([&](const SiteMap::Slot& s) {
      z.add(field.xi_at(s.key) * static_cast<double>(s.count));
    });
    out.z_values.push_back(z.sum);
  }

  double mx = 0.0;
  lt.counts().for_each([&](const SiteMap::Slot& s) {
    mx = std::max(mx, std::abs(field.xi_at(s.key)));
  });
  out.max_abs_scenery = mx;
  return out;
}

double bn(std::int64_t n, double beta) {
  if (n < 2) throw std::domain_error("bn: n must be >= 2");
  if (!(beta > 0.0) || !(beta > 0.0 && beta <= 2.0))
    throw std::domain_error("bn: beta must lie in (0, 2]");
  const double nd = static_cast<double>(n);
  return std::pow(nd, 1.0 / beta) * std::pow(std::log(nd), (beta - 1.0) / beta);
}

std::vector<double> normalize(const TrajectorySample& sample, double beta) {
  const double b = bn(sample.n, beta);
  std::vector<double> out;
  out.reserve(sample.z_values.size());
  for (double z : sample.z_values) out.push_back(z / b);
  return out;
}

double max_jump_stat(const TrajectorySample& sample, double beta) {
  return sample.max_abs_scenery / bn(sample.n, beta);
}

}  // namespace rwrs
