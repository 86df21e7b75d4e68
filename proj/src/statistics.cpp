#include "rwrs/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "rwrs/lattice.hpp"
#include "rwrs/rwrs_process.hpp"

namespace rwrs {

double v_beta(const LocalTimeField& field, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("v_beta: beta must be positive");
  double acc = 0.0;
  if (beta == 1.0) return static_cast<double>(field.n());
  if (beta == 2.0) return static_cast<double>(field.sum_sq());
  field.counts().for_each([&](const SiteMap::Slot& s) {
    acc += std::pow(static_cast<double>(s.count), beta);
  });
  return acc;
}

FunctionalReport l_stat(const LocalTimeField& field, std::span<const double> thetas,
                        double gamma) {
  const std::int64_t n = field.n();
  if (n < 2) throw std::domain_error("l_stat: n must be >= 2 (log normalizer)");
  if (!(gamma > 0.0)) throw std::domain_error("l_stat: gamma must be positive");
  if (!field.has_increments() || thetas.size() != field.interval_count())
    throw std::invalid_argument("l_stat: need one theta per checkpoint interval");

  std::unordered_map<std::uint64_t, double> weighted;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double th = thetas[i];
    if (th == 0.0) continue;
    field.increments(i).for_each([&](const SiteMap::Slot& s) {
      weighted[s.key] += th * static_cast<double>(s.count);
    });
  }

  double l = 0.0, ls = 0.0;
  for (const auto& [key, v] : weighted) {
    if (v == 0.0) continue;
    const double mag = gamma == 1.0 ? std::abs(v) : std::pow(std::abs(v), gamma);
    l += mag;
    ls += v > 0.0 ? mag : -mag;
  }
  const double norm =
      static_cast<double>(n) * std::pow(std::log(static_cast<double>(n)), gamma - 1.0);

  FunctionalReport rep;
  rep.gamma = gamma;
  rep.thetas.assign(thetas.begin(), thetas.end());
  for (const auto& cp : field.checkpoints())
    rep.times.push_back(static_cast<double>(cp.step) / static_cast<double>(n));
  rep.l_value = l / norm;
  rep.l_signed_value = ls / norm;
  rep.v_value = v_beta(field, gamma);
  return rep;
}

OmegaWitness omega_check(std::int64_t n, std::int64_t r_n, std::int64_t n_star,
                         double v_n, double gamma, double beta) {
  if (n < 16) throw std::domain_error("omega_indicator: n must be >= 16");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::domain_error("omega_indicator: gamma must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  const double llq = std::pow(std::log(std::log(nd)), 0.25);

  OmegaWitness w;
  w.r_n = r_n;
  w.r_bound = nd / llq;
  w.n_star = n_star;
  w.n_star_bound = std::pow(nd, gamma);
  w.holds = static_cast<double>(w.r_n) <= w.r_bound &&
            static_cast<double>(w.n_star) <= w.n_star_bound;
  if (w.holds) {
    w.n_star_lower_ok = static_cast<double>(w.n_star) >= llq;
    w.v_n = v_n;
    w.v_n_bound = std::pow(nd, 1.0 - gamma * std::max(0.0, 1.0 - beta));
    w.v_n_lower_ok = w.v_n >= w.v_n_bound * (1.0 - 1e-12);
  }
  return w;
}

OmegaWitness omega_indicator(const LocalTimeField& field, double gamma, double beta) {
  const std::int64_t n = field.n();
  if (n < 16) throw std::domain_error("omega_indicator: n must be >= 16");
  return omega_check(n, field.range(), field.max_count(),
                     (gamma > 0.0 && gamma < 1.0) ? v_beta(field, beta) : 0.0, gamma,
                     beta);
}

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: empty sample");
  std::vector<std::complex<double>> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    double re = 0.0, im = 0.0;
    for (double z : samples) {
      re += std::cos(u * z);
      im += std::sin(u * z);
    }
    const double m = static_cast<double>(samples.size());
    out.emplace_back(re / m, im / m);
  }
  return out;
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / m));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / m - f));
  }
  return d;
}

namespace {

std::int64_t mod_floor(std::int64_t a, std::int64_t d) {
  std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

}  // namespace

LatticeMassReport lattice_point_mass(std::span<const std::int64_t> z_samples,
                                     std::int64_t n, double beta, double x,
                                     std::int64_t d0, std::int64_t residue) {
  if (d0 < 1) throw std::domain_error("lattice_point_mass: d0 must be >= 1");
  if (z_samples.empty()) throw std::invalid_argument("lattice_point_mass: empty sample");
  const double b = bn(n, beta);
  LatticeMassReport rep;
  rep.target_point = static_cast<std::int64_t>(std::floor(b * x));
  const std::int64_t res = mod_floor(residue, d0);
  rep.target_admissible = mod_floor(rep.target_point, d0) == res;

  // Nearest admissible point; ties broken toward the smaller value.
  const std::int64_t up = mod_floor(res - rep.target_point, d0);
  const std::int64_t cand_hi = rep.target_point + up;
  const std::int64_t cand_lo = cand_hi - d0;
  if (up == 0)
    rep.z_star = rep.target_point;
  else
    rep.z_star = (up < d0 - up) ? cand_hi : cand_lo;

  std::int64_t hits = 0, target_hits = 0;
  for (std::int64_t z : z_samples) {
    hits += (z == rep.z_star);
    target_hits += (z == rep.target_point);
  }
  const double m = static_cast<double>(z_samples.size());
  const double freq = static_cast<double>(hits) / m;
  rep.freq_at_target = static_cast<double>(target_hits) / m;
  rep.hits = hits;
  rep.estimate = b / static_cast<double>(d0) * freq;
  rep.stderr_ = b / static_cast<double>(d0) * std::sqrt(freq * (1.0 - freq) / m);
  return rep;
}

IntervalMassReport interval_mass(std::span<const double> z_samples, std::int64_t n,
                                 double beta, double x, double a, double b) {
  if (!(a < b)) throw std::domain_error("interval_mass: need a < b");
  if (z_samples.empty()) throw std::invalid_argument("interval_mass: empty sample");
  const double bnv = bn(n, beta);
  const double lo = bnv * x + a, hi = bnv * x + b;
  std::int64_t hits = 0;
  for (double z : z_samples) hits += (z >= lo && z <= hi);
  const double m = static_cast<double>(z_samples.size());
  const double freq = static_cast<double>(hits) / m;
  IntervalMassReport rep;
  rep.hits = hits;
  rep.estimate = bnv * freq / (b - a);
  rep.stderr_ = bnv * std::sqrt(freq * (1.0 - freq) / m) / (b - a);
  return rep;
}

namespace {

struct OracleEnum {
  const WalkModel* walk;
  int n;
  // multiset of local times -> accumulated path probability
  std::map<std::vector<std::uint32_t>, double> profiles;
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  std::vector<Site> trace;

  void dfs(int depth, Site pos, double prob) {
    std::uint64_t key = pack_site(walk->dimension, pos);
    auto& c = counts[key];
    ++c;
    if (depth == n) {
      std::vector<std::uint32_t> profile;
      profile.reserve(counts.size());
      for (const auto& [k, v] : counts)
        if (v > 0) profile.push_back(v);
      std::sort(profile.begin(), profile.end());
      profiles[profile] += prob;
    } else {
      for (const auto& e : walk->steps) {
        if (e.p == 0.0) continue;
        dfs(depth + 1, Site{pos.x + e.d.x, pos.y + e.d.y}, prob * e.p);
      }
    }
    --c;
  }
};

}  // namespace

std::map<std::int64_t, double> exact_small_oracle(const WalkModel& walk,
                                                  const std::vector<SceneryAtom>& scenery,
                                                  int n) {
  if (n < 1 || n > 12) throw std::domain_error("exact_small_oracle: n must lie in [1, 12]");
  if (walk.steps.empty())
    throw std::invalid_argument("exact_small_oracle: walk needs a finite step table");
  if (scenery.empty()) throw std::invalid_argument("exact_small_oracle: empty scenery");
  double work = 1.0;
  for (int i = 0; i < n; ++i) work *= static_cast<double>(walk.steps.size());
  work *= std::pow(static_cast<double>(scenery.size()), n);
  if (work > 1e8)
    throw std::runtime_error("exact_small_oracle: enumeration guard exceeded");

  OracleEnum en;
  en.walk = &walk;
  en.n = n - 1;  // counts S_0..S_{n-1}: n visits, n-1 steps
  en.dfs(0, Site{0, 0}, 1.0);

  std::map<std::int64_t, double> pmf;
  for (const auto& [profile, pprob] : en.profiles) {
    // Z | profile is the convolution over sites of (count * scenery value).
    std::map<std::int64_t, double> conv{{0, 1.0}};
    for (std::uint32_t c : profile) {
      std::map<std::int64_t, double> next;
      for (const auto& [z, q] : conv)
        for (const auto& atom : scenery)
          next[z + static_cast<std::int64_t>(c) * atom.value] += q * atom.p;
      conv.swap(next);
    }
    for (const auto& [z, q] : conv) pmf[z] += pprob * q;
  }
  return pmf;
}

}  // namespace rwrs
