#include "nlch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlch/error.hpp"

namespace nlch {

double Grid::min_spacing() const {
  double m = h[0];
  for (int a = 1; a < dim; ++a) m = std::min(m, h[a]);
  return m;
}

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 2; a > axis; --a) s *= static_cast<std::size_t>(n[a]);
  return s;
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
  std::array<int, 3> c{0, 0, 0};
  for (int a = 2; a >= 0; --a) {
    c[a] = static_cast<int>(idx % static_cast<std::size_t>(n[a]));
    idx /= static_cast<std::size_t>(n[a]);
  }
  return c;
}

Grid make_grid(int dim, const std::vector<int>& n, const std::vector<double>& length) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (static_cast<int>(n.size()) != dim || static_cast<int>(length.size()) != dim)
    throw ConfigError("grid: expected " + std::to_string(dim) + " entries for n and length");
  Grid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 4) throw ConfigError("grid too small: need at least 4 cells per axis");
    if (!(length[a] > 0.0) || !std::isfinite(length[a])) throw ConfigError("grid length must be positive");
    g.n[a] = n[a];
    g.length[a] = length[a];
    g.h[a] = length[a] / n[a];
  }
  return g;
}

}  // namespace nlch
