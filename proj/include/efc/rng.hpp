#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "efc/errors.hpp"

namespace efc {

// Deterministic random stream.  Ensembles seed one stream per path as
// (master_seed, path_index) so that results do not depend on scheduling.
// Uniform draws are mapped into the open interval (0,1) so exponential
// inversion never produces a zero holding time.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    // 53-bit mantissa, shifted into (0,1) strictly.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) {
    if (!(rate > 0)) throw NumericalError("exponential clock needs a positive rate");
    return -std::log(uniform01()) / rate;
  }

  std::size_t uniform_index(std::size_t n) {
    // unbiased rejection sampling
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % n);
  }

  // Index drawn with probability weights[i] / total.
  std::size_t categorical(const std::vector<double>& weights, double total) {
    double target = uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (target <= acc) return i;
    }
    return weights.size() - 1;  // guard against accumulated rounding
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace efc
