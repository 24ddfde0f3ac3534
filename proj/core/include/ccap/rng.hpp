#pragma once

#include <cstdint>
#include <string_view>

namespace ccap {

// splitmix64 step; the output sequence is fully defined by the seed, with no
// dependence on the platform's <random> distributions.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Mixes two 64-bit values into one; used to derive child seeds
/// (per-episode streams, per-stage streams) from a master seed.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2));
  splitmix64(s);
  return s;
}

/// Hashes a label (FNV-1a) so named pipeline stages can fan out of one
/// master seed: stage_seed = mix_seed(master, hash(stage_name)).
inline uint64_t hash_label(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view stage) {
  return mix_seed(master, hash_label(stage));
}

/// Small deterministic random stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Multiply-shift; bias is < 2^-32 for any n
  /// that fits in 32 bits, which is all we ever pass.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  int next_int(int n) { return static_cast<int>(next_below(static_cast<uint64_t>(n))); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Child stream keyed by an index; independent of how many draws the
  /// parent has made, so per-episode streams merge deterministically.
  Rng child(uint64_t index) const { return Rng(mix_seed(state_, index)); }

 private:
  uint64_t state_;
};

}  // namespace ccap
