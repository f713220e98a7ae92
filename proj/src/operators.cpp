#include "nlch/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlch/error.hpp"
#include "nlch/linear_solver.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

ScalarField partial(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  const std::size_t stride = g.stride(axis);
  const std::size_t n = static_cast<std::size_t>(g.n[axis]);
  const double c = 0.5 / g.h[axis];
  ScalarField out(g);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t i = (idx / stride) % n;
    const std::size_t plus = i + 1 < n ? idx + stride : idx;
    const std::size_t minus = i > 0 ? idx - stride : idx;
    out[idx] = c * (f[plus] - f[minus]);
  }
  return out;
}

ScalarField partial_transpose(const ScalarField& u, int axis) {
  const Grid& g = u.grid();
  const std::size_t stride = g.stride(axis);
  const std::size_t n = static_cast<std::size_t>(g.n[axis]);
  const double c = 0.5 / g.h[axis];
  ScalarField out(g);
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const std::size_t i = (idx / stride) % n;
    const std::size_t plus = i + 1 < n ? idx + stride : idx;
    const std::size_t minus = i > 0 ? idx - stride : idx;
    out[plus] += c * u[idx];
    out[minus] -= c * u[idx];
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < f.grid().dim; ++a) comps.push_back(partial(f, a));
  return VectorField(std::move(comps));
}

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid());
  for (int a = 0; a < v.dim(); ++a) out -= partial_transpose(v[a], a);
  return out;
}

ScalarField laplacian_neumann(const ScalarField& f) { return divergence(gradient(f)); }

double integral(const ScalarField& f) {
  const auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().volume(); }

ScalarField subtract_mean(const ScalarField& f) {
  ScalarField out = f;
  const double m = mean(f);
  for (double& d : out.values()) d -= m;
  return out;
}

namespace {

// RMS magnitude, the scale against which "mean zero" is judged.
double rms(const ScalarField& f) { return norm(f) / std::sqrt(f.grid().volume()); }

void require_mean_zero(const ScalarField& f, const char* what) {
  if (std::abs(mean(f)) > 1e-10 * rms(f)) throw ConfigError(what);
}

}  // namespace

ScalarField inv_neumann_laplacian(const ScalarField& f) {
  require_mean_zero(f, "inverse Neumann Laplacian needs mean-zero data");
  const Grid& g = f.grid();
  NeumannSpectral spectral(g);
  const LinearMap apply = [&g](std::span<const double> in, std::span<double> out) {
    const ScalarField lap = laplacian_neumann(ScalarField(g, std::vector<double>(in.begin(), in.end())));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -lap[i];
  };
  const LinearMap precond = [&spectral](std::span<const double> in, std::span<double> out) {
    spectral.solve_shifted(0.0, 1.0, in, out);
  };
  std::vector<double> x(g.size(), 0.0);
  CgOptions opts;
  opts.rel_tol = 1e-10;
  opts.deflate_mean = true;
  const CgResult res = pcg(apply, precond, f.values(), x, opts);
  if (!res.converged) throw SolverError("inverse Neumann Laplacian did not converge", res.rel_residual);
  return ScalarField(g, std::move(x));
}

double reduce(const ScalarField& f, Reduction kind) {
  switch (kind) {
    case Reduction::mean:
      return mean(f);
    case Reduction::integral:
      return integral(f);
    case Reduction::L2:
      return norm(f);
    case Reduction::Linf: {
      double m = 0.0;
      for (double d : f.values()) m = std::max(m, std::abs(d));
      return m;
    }
    case Reduction::H1semi:
      return norm(gradient(f));
    case Reduction::Vstar:
      require_mean_zero(f, "V* norm needs mean-zero data");
      return norm(gradient(inv_neumann_laplacian(f)));
  }
  return 0.0;
}

}  // namespace nlch
