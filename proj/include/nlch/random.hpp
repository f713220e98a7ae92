#pragma once

#include <cstdint>
#include <random>

#include "nlch/field.hpp"

namespace nlch {

/// Seeded generator with a portable uniform mapping (bit-identical across
/// standard libraries, unlike std::uniform_real_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

/// Cellwise uniform noise in [lo, hi].
ScalarField random_field(const Grid& grid, std::uint64_t seed, double lo, double hi);

/// Smooth random field: a few low cosine modes, mean `mean`, max deviation `amplitude`.
ScalarField smooth_random_field(const Grid& grid, std::uint64_t seed, double mean, double amplitude);

}  // namespace nlch
