#include "nlch/reference.hpp"

#include <array>

namespace nlch::reference {

namespace {

std::array<double, 3> offset(const Grid& g, std::size_t i, std::size_t j) {
  const auto a = g.unflatten(i);
  const auto b = g.unflatten(j);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int ax = 0; ax < g.dim; ++ax) x[ax] = (a[ax] - b[ax]) * g.h[ax];
  return x;
}

}  // namespace

ScalarField direct_convolve(const KernelSpec& spec, const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) acc += spec.value(offset(g, i, j), g.dim) * f[j];
    out[i] = acc * g.cell_volume();
  }
  return out;
}

VectorField direct_grad_convolve(const KernelSpec& spec, const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto dk = spec.gradient(offset(g, i, j), g.dim);
      for (int ax = 0; ax < g.dim; ++ax) acc[ax] += dk[ax] * f[j];
    }
    for (int ax = 0; ax < g.dim; ++ax) out[ax][i] = acc[ax] * g.cell_volume();
  }
  return out;
}

double direct_energy(const KernelSpec& spec, const PotentialParams& pot, const ScalarField& f) {
  const Grid& g = f.grid();
  const double cv = g.cell_volume();
  double pair = 0.0;
  double local = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) pair += spec.value(offset(g, i, j), g.dim) * f[i] * f[j];
    local += potential_eval(pot, f[i], 0);
  }
  return -0.5 * pair * cv * cv + local * cv;
}

}  // namespace nlch::reference
