#include "nlch/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlch {

ScalarField random_field(const Grid& grid, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  ScalarField f(grid);
  for (double& d : f.values()) d = rng.uniform(lo, hi);
  return f;
}

ScalarField smooth_random_field(const Grid& grid, std::uint64_t seed, double mean, double amplitude) {
  Rng rng(seed);
  constexpr int kModes = 3;
  struct Mode {
    std::array<int, 3> k;
    double c;
  };
  std::vector<Mode> modes;
  const int kz = grid.dim == 3 ? kModes : 0;
  for (int a = 0; a <= kModes; ++a)
    for (int b = 0; b <= kModes; ++b)
      for (int c = 0; c <= kz; ++c) {
        if (a + b + c == 0) continue;
        const double k2 = a * a + b * b + c * c;
        modes.push_back({{a, b, c}, rng.uniform(-1.0, 1.0) / k2});
      }
  // Cosine modes have zero normal derivative, so the field is Neumann compatible.
  ScalarField f = ScalarField::sample(grid, [&](double x, double y, double z) {
    const std::array<double, 3> p{x, y, z};
    double s = 0.0;
    for (const auto& m : modes) {
      double term = m.c;
      for (int a = 0; a < grid.dim; ++a) term *= std::cos(std::numbers::pi * m.k[a] * p[a] / grid.length[a]);
      s += term;
    }
    return s;
  });
  double avg = 0.0;
  for (double d : f.values()) avg += d;
  avg /= static_cast<double>(f.size());
  double peak = 0.0;
  for (double& d : f.values()) {
    d -= avg;
    peak = std::max(peak, std::abs(d));
  }
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  for (double& d : f.values()) d = mean + scale * d;
  return f;
}

}  // namespace nlch
