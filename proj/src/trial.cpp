#include "rwrs/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "rwrs/lattice.hpp"

namespace rwrs {

namespace {

constexpr std::int32_t kDx[4] = {1, -1, 0, 0};
constexpr std::int32_t kDy[4] = {0, 0, 1, -1};

// Four-lane compensated summation: the lane rotation breaks the serial
// dependency chain in the hot loop. Both engines use the identical structure
// so their outputs stay bit-identical.
struct Kahan4 {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double c[4] = {0.0, 0.0, 0.0, 0.0};
  void add(unsigned lane, double v) {
    const double y = v - c[lane];
    const double t = s[lane] + y;
    c[lane] = (t - s[lane]) - y;
    s[lane] = t;
  }
  double total() const {
    return ((s[0] - c[0]) + (s[1] - c[1])) + ((s[2] - c[2]) + (s[3] - c[3]));
  }
};

// ---------------------------------------------------------------------------
// Tiled occupation grids. The walk spends hundreds of steps inside one tile,
// so the hot path is a tile-pointer compare plus an array access; the
// directory is touched only on tile changes.
// ---------------------------------------------------------------------------

constexpr int kTileBits2d = 5;  // 32 x 32 sites
constexpr int kTileCells2d = 1 << (2 * kTileBits2d);
constexpr std::int32_t kTileMask2d = (1 << kTileBits2d) - 1;

constexpr int kTileBits1d = 10;  // 1024 sites
constexpr int kTileCells1d = 1 << kTileBits1d;
constexpr std::int64_t kTileMask1d = (1 << kTileBits1d) - 1;

// One cell = one cache-line-friendly record: the count and the cached
// scenery value are read together in the hot loop.
struct Cell {
  double xi;
  std::uint32_t count;
  std::uint32_t pad;
};

template <int kCells>
struct Tile {
  Cell cells[kCells];
  std::uint64_t coord;  // packed tile coordinate
};

template <int kCells>
class TileGrid {
 public:
  Tile<kCells>* acquire(std::uint64_t coord) {
    // directory: linear probing, capacity kept at least 2x the tile count
    if ((used_ + 1) * 2 > dir_.size()) grow_dir();
    std::size_t i = SiteMap::hash(coord) & (dir_.size() - 1);
    for (;;) {
      if (dir_[i] == nullptr) {
        Tile<kCells>* t = take_from_pool(coord);
        dir_[i] = t;
        return t;
      }
      if (dir_[i]->coord == coord) return dir_[i];
      i = (i + 1) & (dir_.size() - 1);
    }
  }

  void clear() {
    std::fill(dir_.begin(), dir_.end(), nullptr);
    used_ = 0;
  }

  template <class F>
  void for_each_tile(F&& f) const {
    for (std::size_t i = 0; i < used_; ++i) f(*pool_[i]);
  }

  std::size_t tiles_used() const { return used_; }

 private:
  Tile<kCells>* take_from_pool(std::uint64_t coord) {
    if (used_ == pool_.size()) pool_.push_back(std::make_unique<Tile<kCells>>());
    Tile<kCells>* t = pool_[used_++].get();
    for (int i = 0; i < kCells; ++i) t->cells[i].count = 0;
    t->coord = coord;
    return t;
  }

  void grow_dir() {
    std::size_t cap = std::max<std::size_t>(1024, dir_.size() * 2);
    dir_.assign(cap, nullptr);
    for (std::size_t k = 0; k < used_; ++k) {
      std::size_t i = SiteMap::hash(pool_[k]->coord) & (cap - 1);
      while (dir_[i] != nullptr) i = (i + 1) & (cap - 1);
      dir_[i] = pool_[k].get();
    }
  }

  std::vector<std::unique_ptr<Tile<kCells>>> pool_;
  std::vector<Tile<kCells>*> dir_;
  std::size_t used_ = 0;
};

thread_local TileGrid<kTileCells2d> tl_grid2d;
thread_local TileGrid<kTileCells1d> tl_grid1d;

// Scenery cases for loop monomorphization.
enum class Xi { none, integer, real };

// ---------------------------------------------------------------------------
// Tiled engines
// ---------------------------------------------------------------------------

template <WalkKind kWalk, Xi kXi>
void run_tiled_2d(const TrialSetup& setup, Rng rng, StreamId scen, TrialResult& out) {
  TileGrid<kTileCells2d>& grid = tl_grid2d;
  grid.clear();
  const SceneryModel* scenery = setup.scenery;

  std::int32_t x = 0, y = 0;
  std::int32_t ltx = INT32_MIN, lty = INT32_MIN;
  Tile<kTileCells2d>* tile = nullptr;
  Kahan4 kz;
  std::int64_t zi = 0;
  double mx = 0.0;
  std::int64_t r = 0;
  std::uint32_t nstar = 0;
  std::uint64_t sumsq = 0;
  std::int64_t k = 0;

  for (std::int64_t cp : setup.boundaries) {
    for (; k < cp; ++k) {
      const std::int32_t tx = x >> kTileBits2d, ty = y >> kTileBits2d;
      if (tx != ltx || ty != lty) {
        tile = grid.acquire(pack_site_2d(tx, ty));
        ltx = tx;
        lty = ty;
      }
      const std::uint32_t idx = static_cast<std::uint32_t>(
          ((y & kTileMask2d) << kTileBits2d) | (x & kTileMask2d));
      Cell& cell = tile->cells[idx];
      const std::uint32_t c = ++cell.count;
      sumsq += 2ull * c - 1ull;
      if (c > nstar) nstar = c;
      if constexpr (kXi != Xi::none) {
        if (c == 1) {
          ++r;
          cell.xi = xi_value(*scenery, scen, pack_site_2d(x, y));
          const double a = std::abs(cell.xi);
          if (a > mx) mx = a;
        }
        if constexpr (kXi == Xi::integer)
          zi += static_cast<std::int64_t>(cell.xi);
        else
          kz.add(static_cast<unsigned>(k) & 3u, cell.xi);
      } else {
        r += (c == 1);
      }
      // step
      if constexpr (kWalk == WalkKind::srw2d) {
        const auto b = rng.next_bits(2);
        x += kDx[b];
        y += kDy[b];
      } else {
        const auto b = rng.next_bits(3);
        if (b < 4) {
          x += kDx[b];
          y += kDy[b];
        }
      }
    }
    if constexpr (kXi == Xi::integer) {
      out.z.push_back(static_cast<double>(zi));
      out.z_int.push_back(zi);
      out.max_abs_xi.push_back(mx);
    } else if constexpr (kXi == Xi::real) {
      out.z.push_back(kz.total());
      out.max_abs_xi.push_back(mx);
    }
    out.range.push_back(r);
    out.max_count.push_back(nstar);
    out.sum_sq.push_back(sumsq);
    for (double beta : setup.v_betas) {
      double acc = 0.0;
      if (beta == 1.0) {
        acc = static_cast<double>(k);
      } else if (beta == 2.0) {
        acc = static_cast<double>(sumsq);
      } else {
        grid.for_each_tile([&](const Tile<kTileCells2d>& t) {
          for (int i = 0; i < kTileCells2d; ++i)
            if (t.cells[i].count > 0)
              acc += std::pow(static_cast<double>(t.cells[i].count), beta);
        });
      }
      out.v.push_back(acc);
    }
  }
}

template <Xi kXi>
void run_tiled_1d(const TrialSetup& setup, Rng rng, StreamId scen, TrialResult& out) {
  TileGrid<kTileCells1d>& grid = tl_grid1d;
  grid.clear();
  const SceneryModel* scenery = setup.scenery;

  std::int64_t x = 0;
  std::int64_t ltx = INT64_MIN;
  Tile<kTileCells1d>* tile = nullptr;
  Kahan4 kz;
  std::int64_t zi = 0;
  double mx = 0.0;
  std::int64_t r = 0;
  std::uint32_t nstar = 0;
  std::uint64_t sumsq = 0;
  std::int64_t k = 0;

  for (std::int64_t cp : setup.boundaries) {
    for (; k < cp; ++k) {
      const std::int64_t tx = x >> kTileBits1d;
      if (tx != ltx) {
        tile = grid.acquire(static_cast<std::uint64_t>(tx));
        ltx = tx;
      }
      const std::uint32_t idx = static_cast<std::uint32_t>(x & kTileMask1d);
      Cell& cell = tile->cells[idx];
      const std::uint32_t c = ++cell.count;
      sumsq += 2ull * c - 1ull;
      if (c > nstar) nstar = c;
      if constexpr (kXi != Xi::none) {
        if (c == 1) {
          ++r;
          cell.xi = xi_value(*scenery, scen, pack_site_1d(x));
          const double a = std::abs(cell.xi);
          if (a > mx) mx = a;
        }
        if constexpr (kXi == Xi::integer)
          zi += static_cast<std::int64_t>(cell.xi);
        else
          kz.add(static_cast<unsigned>(k) & 3u, cell.xi);
      } else {
        r += (c == 1);
      }
      x += rng.next_bits(1) ? 1 : -1;
    }
    if constexpr (kXi == Xi::integer) {
      out.z.push_back(static_cast<double>(zi));
      out.z_int.push_back(zi);
      out.max_abs_xi.push_back(mx);
    } else if constexpr (kXi == Xi::real) {
      out.z.push_back(kz.total());
      out.max_abs_xi.push_back(mx);
    }
    out.range.push_back(r);
    out.max_count.push_back(nstar);
    out.sum_sq.push_back(sumsq);
    for (double beta : setup.v_betas) {
      double acc = 0.0;
      if (beta == 1.0) {
        acc = static_cast<double>(k);
      } else if (beta == 2.0) {
        acc = static_cast<double>(sumsq);
      } else {
        grid.for_each_tile([&](const Tile<kTileCells1d>& t) {
          for (int i = 0; i < kTileCells1d; ++i)
            if (t.cells[i].count > 0)
              acc += std::pow(static_cast<double>(t.cells[i].count), beta);
        });
      }
      out.v.push_back(acc);
    }
  }
}

// ---------------------------------------------------------------------------
// Hash-map engine (general walks; increment tracking; field export)
// ---------------------------------------------------------------------------

struct StepSrw2d {
  std::int32_t x = 0, y = 0;
  std::uint64_t key() const { return pack_site_2d(x, y); }
  void advance(Rng& r) {
    const auto b = r.next_bits(2);
    x += kDx[b];
    y += kDy[b];
  }
};

struct StepLazy2d {
  std::int32_t x = 0, y = 0;
  std::uint64_t key() const { return pack_site_2d(x, y); }
  void advance(Rng& r) {
    const auto b = r.next_bits(3);
    if (b < 4) {
      x += kDx[b];
      y += kDy[b];
    }
  }
};

struct StepSrw1d {
  std::int64_t x = 0;
  std::uint64_t key() const { return pack_site_1d(x); }
  void advance(Rng& r) { x += r.next_bits(1) ? 1 : -1; }
};

struct StepCauchy1d {
  std::int64_t x = 0;
  std::uint64_t key() const { return pack_site_1d(x); }
  void advance(Rng& r) { x += cauchy1d_step(r); }
};

struct StepTable {
  const WalkModel* m;
  Site pos{0, 0};
  std::uint64_t key() const { return pack_site(m->dimension, pos); }
  void advance(Rng& r) {
    const Site d = sample_step(*m, r);
    pos.x += d.x;
    pos.y += d.y;
  }
};

template <class Stepper, Xi kXi>
void run_hash(const TrialSetup& setup, Stepper st, Rng rng, StreamId scen,
              LocalTimeField& field, TrialResult& out) {
  const SceneryModel* scenery = setup.scenery;
  Kahan4 kz;
  std::int64_t zi = 0;
  double mx = 0.0;
  std::int64_t k = 0;
  for (std::int64_t cp : setup.boundaries) {
    for (; k < cp; ++k) {
      SiteMap::Slot& slot = field.visit(st.key());
      if constexpr (kXi != Xi::none) {
        if (slot.count == 1) {
          slot.xi = xi_value(*scenery, scen, slot.key);
          const double a = std::abs(slot.xi);
          if (a > mx) mx = a;
        }
        if constexpr (kXi == Xi::integer)
          zi += static_cast<std::int64_t>(slot.xi);
        else
          kz.add(static_cast<unsigned>(k) & 3u, slot.xi);
      }
      st.advance(rng);
    }
    field.mark_checkpoint();
    if constexpr (kXi == Xi::integer) {
      out.z.push_back(static_cast<double>(zi));
      out.z_int.push_back(zi);
      out.max_abs_xi.push_back(mx);
    } else if constexpr (kXi == Xi::real) {
      out.z.push_back(kz.total());
      out.max_abs_xi.push_back(mx);
    }
    out.range.push_back(field.range());
    out.max_count.push_back(field.max_count());
    out.sum_sq.push_back(field.sum_sq());
    for (double beta : setup.v_betas) {
      double acc = 0.0;
      if (beta == 1.0) {
        acc = static_cast<double>(k);
      } else if (beta == 2.0) {
        acc = static_cast<double>(field.sum_sq());
      } else {
        field.counts().for_each([&](const SiteMap::Slot& s) {
          acc += std::pow(static_cast<double>(s.count), beta);
        });
      }
      out.v.push_back(acc);
    }
  }
}

template <class Stepper>
void dispatch_hash(const TrialSetup& setup, Stepper st, Rng rng, StreamId scen,
                   LocalTimeField& field, TrialResult& out) {
  if (!setup.scenery)
    run_hash<Stepper, Xi::none>(setup, st, rng, scen, field, out);
  else if (setup.scenery->integer_valued)
    run_hash<Stepper, Xi::integer>(setup, st, rng, scen, field, out);
  else
    run_hash<Stepper, Xi::real>(setup, st, rng, scen, field, out);
}

template <WalkKind kWalk>
void dispatch_tiled_2d(const TrialSetup& setup, Rng rng, StreamId scen, TrialResult& out) {
  if (!setup.scenery)
    run_tiled_2d<kWalk, Xi::none>(setup, rng, scen, out);
  else if (setup.scenery->integer_valued)
    run_tiled_2d<kWalk, Xi::integer>(setup, rng, scen, out);
  else
    run_tiled_2d<kWalk, Xi::real>(setup, rng, scen, out);
}

void dispatch_tiled_1d(const TrialSetup& setup, Rng rng, StreamId scen, TrialResult& out) {
  if (!setup.scenery)
    run_tiled_1d<Xi::none>(setup, rng, scen, out);
  else if (setup.scenery->integer_valued)
    run_tiled_1d<Xi::integer>(setup, rng, scen, out);
  else
    run_tiled_1d<Xi::real>(setup, rng, scen, out);
}

}  // namespace

void run_trial(const TrialSetup& setup, std::uint64_t seed, std::uint64_t trial,
               LocalTimeField& field, TrialResult& out) {
  if (!setup.walk) throw std::invalid_argument("run_trial: missing walk model");
  if (setup.boundaries.empty() || setup.boundaries.back() != setup.n)
    throw std::invalid_argument("run_trial: boundaries must end at the horizon");
  if (!std::is_sorted(setup.boundaries.begin(), setup.boundaries.end()))
    throw std::invalid_argument("run_trial: boundaries must be sorted");
  if (setup.boundaries.front() < 0)
    throw std::invalid_argument("run_trial: boundaries must be nonnegative");

  Rng walk_rng(trial_stream(seed, StreamRole::walk, trial));
  const StreamId scen = trial_stream(seed, StreamRole::scenery, trial);
  out.z.clear();
  out.z_int.clear();
  out.max_abs_xi.clear();
  out.range.clear();
  out.max_count.clear();
  out.sum_sq.clear();
  out.v.clear();

  const bool need_field = setup.track_increments || setup.export_field;
  if (!need_field) {
    switch (setup.walk->kind) {
      case WalkKind::srw2d:
        dispatch_tiled_2d<WalkKind::srw2d>(setup, walk_rng, scen, out);
        return;
      case WalkKind::lazy2d:
        dispatch_tiled_2d<WalkKind::lazy2d>(setup, walk_rng, scen, out);
        return;
      case WalkKind::srw1d:
        dispatch_tiled_1d(setup, walk_rng, scen, out);
        return;
      default:
        break;  // cauchy1d and table walks use the hash engine
    }
  }

  field.begin(expected_range(*setup.walk, setup.n), setup.track_increments);
  switch (setup.walk->kind) {
    case WalkKind::srw2d:
      dispatch_hash(setup, StepSrw2d{}, walk_rng, scen, field, out);
      break;
    case WalkKind::lazy2d:
      dispatch_hash(setup, StepLazy2d{}, walk_rng, scen, field, out);
      break;
    case WalkKind::srw1d:
      dispatch_hash(setup, StepSrw1d{}, walk_rng, scen, field, out);
      break;
    case WalkKind::cauchy1d:
      dispatch_hash(setup, StepCauchy1d{}, walk_rng, scen, field, out);
      break;
    case WalkKind::table:
      dispatch_hash(setup, StepTable{setup.walk}, walk_rng, scen, field, out);
      break;
  }
}

}  // namespace rwrs
