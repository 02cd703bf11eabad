#include "qevote/rng.hpp"

#include "qevote/errors.hpp"

namespace qevote {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t index) {
  uint64_t s = base ^ (index * 0xd1342543de82ef95ULL);
  splitmix64(s);
  return splitmix64(s);
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw ParameterError("Rng::below: empty range");
  const uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

}  // namespace qevote
