#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rwrs {

// Open-addressing map from packed lattice site to (visit count, cached
// scenery value). Linear probing over a power-of-two table; slots are
// invalidated in O(1) by bumping an epoch stamp, so a map can be reused
// across trials without touching memory.
class SiteMap {
 public:
  struct Slot {
    std::uint64_t key;
    std::uint32_t epoch;
    std::uint32_t count;
    double xi;
  };

  explicit SiteMap(std::size_t expected_sites = 64) { reset_capacity(expected_sites); }

  void clear() {
    ++epoch_;
    size_ = 0;
    if (epoch_ == 0) {  // stamp wrapped; wipe for real
      for (auto& s : slots_) s.epoch = 0;
      epoch_ = 1;
    }
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }

  // Returns the slot for `key`, inserting it with count 0 if absent. The
  // returned reference is invalidated by the next insertion.
  Slot& find_or_insert(std::uint64_t key) {
    if (size_ + 1 > limit_) grow();
    std::size_t i = hash(key) & mask_;
    for (;;) {
      Slot& s = slots_[i];
      if (s.epoch != epoch_) {
        s.key = key;
        s.epoch = epoch_;
        s.count = 0;
        s.xi = 0.0;
        ++size_;
        return s;
      }
      if (s.key == key) return s;
      i = (i + 1) & mask_;
    }
  }

  // Lookup without insertion; nullptr if absent.
  const Slot* find(std::uint64_t key) const {
    std::size_t i = hash(key) & mask_;
    for (;;) {
      const Slot& s = slots_[i];
      if (s.epoch != epoch_) return nullptr;
      if (s.key == key) return &s;
      i = (i + 1) & mask_;
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    for (const Slot& s : slots_) {
      if (s.epoch == epoch_ && s.count > 0) f(s);
    }
  }

  static std::uint64_t hash(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  void reset_capacity(std::size_t expected_sites) {
    std::size_t cap = 64;
    while (cap * 5 < expected_sites * 8) cap <<= 1;  // load factor <= 0.625
    slots_.assign(cap, Slot{0, 0, 0, 0.0});
    mask_ = cap - 1;
    limit_ = cap * 5 / 8;
    epoch_ = 1;
    size_ = 0;
  }

 private:
  void grow() {
    std::vector<Slot> old;
    old.swap(slots_);
    std::uint32_t old_epoch = epoch_;
    slots_.assign(old.size() * 2, Slot{0, 0, 0, 0.0});
    mask_ = slots_.size() - 1;
    limit_ = slots_.size() * 5 / 8;
    epoch_ = 1;
    size_ = 0;
    for (const Slot& s : old) {
      if (s.epoch != old_epoch) continue;
      Slot& dst = find_or_insert(s.key);
      dst.count = s.count;
      dst.xi = s.xi;
    }
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t limit_ = 0;
  std::size_t size_ = 0;
  std::uint32_t epoch_ = 1;
};

}  // namespace rwrs
