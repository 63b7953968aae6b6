#pragma once

#include <cstdint>
#include <random>

namespace ipdb {

// Seeded random stream. Two streams built from the same seed produce the same
// draws; substreams are derived deterministically from (seed, key).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent stream for a numbered component or replicate.
  Rng substream(std::uint64_t key) const { return Rng(mix(seed_ ^ mix(key + 0x9e3779b97f4a7c15ULL))); }

  // Fresh key drawn from this stream, for fan-out inside one draw.
  std::uint64_t next_key() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ipdb
