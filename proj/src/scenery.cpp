#include "rwrs/scenery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rwrs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kZetaTable = 1 << 16;

// sum_{k>=1} k^(-s) to relative error ~1e-15: direct sum plus an
// Euler-Maclaurin tail correction at K.
double zeta_sum(double s, std::size_t K = 200000) {
  double acc = 0.0;
  for (std::size_t k = K; k >= 1; --k) acc += std::pow(static_cast<double>(k), -s);
  const double Kd = static_cast<double>(K);
  acc += std::pow(Kd, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(Kd, -s) +
         s / 12.0 * std::pow(Kd, -s - 1.0);
  return acc;
}

// A1 of the attraction law for the symmetric zeta scenery:
// 1 - cf(u) ~ A1 |u|^beta with A1 = I_beta / zeta(1+beta),
// I_beta = Int_0^inf (1-cos v) v^(-1-beta) dv.
double zeta_attraction_a1(double beta, double norm) {
  double i_beta;
  if (std::abs(beta - 1.0) < 1e-9) {
    i_beta = kPi / 2.0;
  } else {
    i_beta = std::tgamma(2.0 - beta) * std::cos(kPi * beta / 2.0) / (beta * (1.0 - beta));
  }
  return i_beta / norm;
}

double zeta_tail_constant(double beta, const SceneryModel& m) {
  // sup over t of t^beta P(|xi| >= t); the sup over (0,1] is 1, attained at
  // t = 1, and elsewhere integer points dominate.
  double best = 1.0;
  double tail = 1.0;  // P(|xi| >= 1)
  for (std::size_t k = 1; k < 4000; ++k) {
    tail -= (k <= m.zeta_cum.size()
                 ? (k == 1 ? m.zeta_cum[0] : m.zeta_cum[k - 1] - m.zeta_cum[k - 2])
                 : std::pow(static_cast<double>(k), -1.0 - beta) / m.zeta_norm);
    const double t = static_cast<double>(k + 1);
    best = std::max(best, std::pow(t, beta) * std::max(tail, 0.0));
  }
  return best;
}

}  // namespace

SceneryModel builtin_scenery(const std::string& name, double zeta_beta) {
  std::string base = name;
  const auto lp = name.find('(');
  if (lp != std::string::npos && name.back() == ')') {
    base = name.substr(0, lp);
    zeta_beta = std::stod(name.substr(lp + 1, name.size() - lp - 2));
  }
  SceneryModel m;
  m.label = base;
  if (base == "rademacher") {
    m.kind = SceneryKind::rademacher;
    m.attraction = {2.0, 0.5, 0.0};
    m.lattice = true;
    m.d0 = 2;  // cf(u) = cos u, |cos u| = 1 iff u in pi Z
    m.support_point = 1;
    m.c_xi = 1.0;
    m.integer_valued = true;
  } else if (base == "gaussian") {
    m.kind = SceneryKind::gaussian;
    m.attraction = {2.0, 0.5, 0.0};
    m.lattice = false;
    m.d0 = 0;
    m.c_xi = 0.332;  // sup_t t^2 P(|xi|>=t), attained near t = 1.22
    m.integer_valued = false;
  } else if (base == "cauchy-cont") {
    m.kind = SceneryKind::cauchy_cont;
    m.attraction = {1.0, 1.0, 0.0};
    m.lattice = false;
    m.d0 = 0;
    m.c_xi = 1.0;
    m.integer_valued = false;
  } else if (base == "zeta-lattice") {
    if (!(zeta_beta > 0.0) || !(zeta_beta < 2.0))
      throw std::invalid_argument("zeta-lattice: beta must lie in (0, 2)");
    m.kind = SceneryKind::zeta_lattice;
    m.label = "zeta-lattice(" + std::to_string(zeta_beta) + ")";
    m.zeta_beta = zeta_beta;
    m.zeta_norm = zeta_sum(1.0 + zeta_beta);
    m.zeta_cum.resize(kZetaTable);
    double acc = 0.0;
    for (std::size_t k = 1; k <= kZetaTable; ++k) {
      acc += std::pow(static_cast<double>(k), -1.0 - zeta_beta) / m.zeta_norm;
      m.zeta_cum[k - 1] = acc;
    }
    m.attraction = {zeta_beta, zeta_attraction_a1(zeta_beta, m.zeta_norm), 0.0};
    m.lattice = true;
    m.d0 = 1;  // support {+-1, +-2, ...}: differences have gcd 1
    m.support_point = 1;
    m.c_xi = zeta_tail_constant(zeta_beta, m);
    m.integer_valued = true;
  } else {
    throw std::invalid_argument("unknown scenery model: " + name);
  }
  return m;
}

double xi_value(const SceneryModel& m, StreamId stream, std::uint64_t site_key) {
  const auto words = site_words(stream, site_key, 0);
  switch (m.kind) {
    case SceneryKind::rademacher:
      return (words[0] & 1ull) ? 1.0 : -1.0;
    case SceneryKind::gaussian:
      return inverse_normal_cdf(word_to_unit(words[0]));
    case SceneryKind::cauchy_cont:
      return std::tan(kPi * (word_to_unit(words[0]) - 0.5));
    case SceneryKind::zeta_lattice: {
      const double u = word_to_unit(words[0]);
      std::int64_t mag;
      if (u < m.zeta_cum.back()) {
        const auto it = std::lower_bound(m.zeta_cum.begin(), m.zeta_cum.end(), u);
        mag = static_cast<std::int64_t>(it - m.zeta_cum.begin()) + 1;
      } else {
        // Walk the exact pmf beyond the table; no truncation of support.
        double acc = m.zeta_cum.back();
        std::int64_t k = static_cast<std::int64_t>(m.zeta_cum.size());
        do {
          ++k;
          acc += std::pow(static_cast<double>(k), -1.0 - m.zeta_beta) / m.zeta_norm;
        } while (u >= acc && acc < 1.0);
        mag = k;
      }
      return (words[1] & 1ull) ? static_cast<double>(mag) : -static_cast<double>(mag);
    }
  }
  throw std::logic_error("unreachable");
}

TailCheckReport tail_check(const SceneryModel& m, std::int64_t sample_count,
                           const std::vector<double>& t_grid, std::uint64_t seed) {
  if (sample_count < 10000)
    throw std::invalid_argument("tail_check: sample_count must be >= 1e4");
  const StreamId stream = trial_stream(seed, StreamRole::scenery, 0);
  std::vector<std::int64_t> hits(t_grid.size(), 0);
  for (std::int64_t i = 0; i < sample_count; ++i) {
    const double v = std::abs(xi_value(m, stream, static_cast<std::uint64_t>(i)));
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      if (v >= t_grid[j]) ++hits[j];
  }
  TailCheckReport rep;
  const double beta = m.kind == SceneryKind::zeta_lattice ? m.zeta_beta : m.attraction.beta;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    TailCheckRow row;
    row.t = t_grid[j];
    row.frequency = static_cast<double>(hits[j]) / static_cast<double>(sample_count);
    row.bound = m.c_xi * std::pow(t_grid[j], -beta);
    row.stderr_ = std::sqrt(std::max(row.frequency * (1.0 - row.frequency), 1e-12) /
                            static_cast<double>(sample_count));
    row.flagged = row.frequency > row.bound + 3.0 * row.stderr_;
    rep.any_flagged = rep.any_flagged || row.flagged;
    rep.rows.push_back(row);
  }
  return rep;
}

std::complex<double> scenery_cf(const SceneryModel& m, double u) {
  switch (m.kind) {
    case SceneryKind::rademacher:
      return {std::cos(u), 0.0};
    case SceneryKind::gaussian:
      return {std::exp(-0.5 * u * u), 0.0};
    case SceneryKind::cauchy_cont:
      return {std::exp(-std::abs(u)), 0.0};
    case SceneryKind::zeta_lattice: {
      // sum_k cos(ku) k^(-1-beta) / norm over both signs; direct partial sum
      // with a crude tail bound (|cos| <= 1).
      double acc = 0.0;
      const std::size_t K = 2000000;
      for (std::size_t k = 1; k <= K; ++k)
        acc += std::cos(static_cast<double>(k) * u) *
               std::pow(static_cast<double>(k), -1.0 - m.zeta_beta);
      return {acc / m.zeta_norm, 0.0};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace rwrs
