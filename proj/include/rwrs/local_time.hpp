#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwrs/sitemap.hpp"

namespace rwrs {

// Occupation counts N_n(y) of a walk, with running aggregates and optional
// per-interval increment maps between consecutive checkpoints. The map slots
// also carry a cached scenery value so a fused simulation pass can memoize
// site draws in the same probe.
class LocalTimeField {
 public:
  struct CheckpointStat {
    std::int64_t step = 0;
    std::int64_t range = 0;        // R at this step
    std::int64_t max_count = 0;    // N* at this step
    std::uint64_t sum_sq = 0;      // sum of N^2 at this step
  };

  explicit LocalTimeField(std::size_t expected_sites = 64)
      : counts_(expected_sites) {}

  void begin(std::size_t expected_sites, bool track_increments) {
    counts_.clear();
    if (counts_.capacity() * 5 < expected_sites * 8) counts_.reset_capacity(expected_sites);
    track_increments_ = track_increments;
    increments_.clear();
    if (track_increments_) increments_.emplace_back(expected_sites / 4 + 64);
    checkpoints_.clear();
    n_ = 0;
    max_count_ = 0;
    sum_sq_ = 0;
  }

  // Registers one visit; returns the slot so callers can use the cached xi.
  SiteMap::Slot& visit(std::uint64_t key) {
    SiteMap::Slot& s = counts_.find_or_insert(key);
    sum_sq_ += 2ull * s.count + 1ull;
    ++s.count;
    if (s.count > max_count_) max_count_ = s.count;
    ++n_;
    if (track_increments_) ++increments_.back().find_or_insert(key).count;
    return s;
  }

  void mark_checkpoint() {
    checkpoints_.push_back(CheckpointStat{n_, static_cast<std::int64_t>(counts_.size()),
                                          static_cast<std::int64_t>(max_count_), sum_sq_});
    if (track_increments_) increments_.emplace_back(64);
  }

  std::int64_t n() const { return n_; }
  std::int64_t range() const { return static_cast<std::int64_t>(counts_.size()); }
  std::int64_t max_count() const { return static_cast<std::int64_t>(max_count_); }
  std::uint64_t sum_sq() const { return sum_sq_; }

  const SiteMap& counts() const { return counts_; }
  SiteMap& counts() { return counts_; }

  bool has_increments() const { return track_increments_; }
  std::size_t interval_count() const {
    return track_increments_ ? checkpoints_.size() : 0;
  }
  // Increment map for the interval (checkpoint i-1, checkpoint i].
  const SiteMap& increments(std::size_t i) const {
    if (!track_increments_ || i >= checkpoints_.size())
      throw std::out_of_range("LocalTimeField: no such increment interval");
    return increments_[i];
  }

  const std::vector<CheckpointStat>& checkpoints() const { return checkpoints_; }

 private:
  SiteMap counts_;
  std::vector<SiteMap> increments_;
  std::vector<CheckpointStat> checkpoints_;
  std::int64_t n_ = 0;
  std::uint32_t max_count_ = 0;
  std::uint64_t sum_sq_ = 0;
  bool track_increments_ = false;
};

}  // namespace rwrs
