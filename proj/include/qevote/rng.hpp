#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qevote {

uint64_t splitmix64(uint64_t& state);

// Seed for stream `index` under `base`; stable across platforms.
uint64_t derive_seed(uint64_t base, uint64_t index);

// mt19937_64 output is fixed by the standard; the conversions below are
// written out because std distributions differ between library vendors.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t draws() const { return draws_; }

  uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}; n must be positive.
  uint64_t below(uint64_t n);

  bool coin() { return (next_u64() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  Rng fork(uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  uint64_t seed_;
  uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace qevote
