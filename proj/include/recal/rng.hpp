#ifndef RECAL_RNG_HPP
#define RECAL_RNG_HPP

#include <cstdint>
#include <random>

namespace recal {

// Seeded random stream. Every stochastic draw in a run goes through this
// wrapper so traces are reproducible bit-for-bit: the mapping from raw
// mt19937_64 output to uniforms is spelled out here instead of relying on
// std::distribution internals, which vary across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace recal

#endif
