#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace stsg {

// Seeded RNG with self-owned bounded draws. std::uniform_int_distribution is
// implementation-defined, so golden outputs would not survive a stdlib change;
// everything here is pinned to the mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform draw in [0, n). n must be > 0. Modulo bias is < 2^-52 for the
  // small ranges used here.
  std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[next_below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stsg
