#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nlch/control.hpp"
#include "nlch/field.hpp"
#include "nlch/grid.hpp"
#include "nlch/random.hpp"

namespace nlch::test {

inline Grid square(int n, double length = 1.0) { return make_grid(2, {n, n}, {length, length}); }

inline VectorField random_vector(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  VectorField v(g);
  for (int a = 0; a < g.dim; ++a) v[a] = random_field(g, seed * 31 + static_cast<std::uint64_t>(a), lo, hi);
  return v;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

/// log2 of successive error ratios under halving.
inline std::vector<double> orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

/// Time-dependent control: `base` scaled by a random factor in [0.5, 1.5] per slice.
inline ControlField varying_control(const VectorField& base, int n_steps, double dt, std::uint64_t seed) {
  ControlField v = ControlField::constant(base, n_steps, dt);
  Rng rng(seed);
  for (auto& s : v.slices) s *= rng.uniform(0.5, 1.5);
  return v;
}

}  // namespace nlch::test
