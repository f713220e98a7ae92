#include "nlch/leray.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlch/error.hpp"
#include "nlch/operators.hpp"
#include "nlch/random.hpp"

namespace nlch {

ControlBounds ControlBounds::symmetric(int dim, double bound) {
  return ControlBounds{std::vector<double>(static_cast<std::size_t>(dim), -bound),
                       std::vector<double>(static_cast<std::size_t>(dim), bound)};
}

void validate(const ControlBounds& b, int dim) {
  if (static_cast<int>(b.vmin.size()) != dim || static_cast<int>(b.vmax.size()) != dim)
    throw ConfigError("control bounds need one entry per component");
  for (int a = 0; a < dim; ++a) {
    if (b.vmin[a] > b.vmax[a])
      throw ConfigError("control bounds: vmin > vmax on component " + std::to_string(a));
    if (b.vmin[a] > 0.0 || b.vmax[a] < 0.0)
      throw ConfigError("control bounds: zero not admissible on component " + std::to_string(a));
  }
}

ScalarField poisson_neumann(const ScalarField& rhs) {
  if (std::abs(mean(rhs)) > 1e-10 * (norm(rhs) / std::sqrt(rhs.grid().volume())))
    throw ConfigError("incompatible Neumann data: right-hand side has nonzero mean");
  ScalarField psi = inv_neumann_laplacian(rhs);
  psi *= -1.0;
  return psi;
}

VectorField leray_project(const VectorField& v) {
  // div v sums to zero by construction; only rounding is removed here.
  const ScalarField psi = poisson_neumann(subtract_mean(divergence(v)));
  return v - gradient(psi);
}

double box_violation(const VectorField& v, const ControlBounds& bounds) {
  double worst = 0.0;
  for (int a = 0; a < v.dim(); ++a)
    for (double d : v[a].values())
      worst = std::max({worst, bounds.vmin[a] - d, d - bounds.vmax[a]});
  return worst;
}

namespace {

VectorField clip(VectorField v, const ControlBounds& b) {
  for (int a = 0; a < v.dim(); ++a)
    for (double& d : v[a].values()) d = std::clamp(d, b.vmin[a], b.vmax[a]);
  return v;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double d : f.values()) m = std::max(m, std::abs(d));
  return m;
}

}  // namespace

ProjectionResult project_to_admissible(const VectorField& v, const ControlBounds& bounds,
                                       const ProjectionOptions& opts) {
  validate(bounds, v.dim());
  ProjectionResult res;
  // The subspace step is linear, so its Dykstra correction is always a
  // gradient that P_sigma annihilates; only the box correction is tracked.
  VectorField x = v;
  VectorField corr(v.grid());
  for (int k = 1; k <= opts.max_iter; ++k) {
    VectorField shifted = x + corr;
    VectorField y = clip(shifted, bounds);
    corr = shifted - y;
    VectorField next = leray_project(y);
    res.change = norm(next - x);
    x = std::move(next);
    res.iterations = k;
    res.box_violation = box_violation(x, bounds);
    if (res.change <= opts.tol && res.box_violation <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.divergence = max_abs(divergence(x));
  res.v = std::move(x);
  return res;
}

ControlField project_to_admissible(const ControlField& v, const ControlBounds& bounds,
                                   const ProjectionOptions& opts, ProjectionResult* worst) {
  ControlField out;
  out.dt = v.dt;
  ProjectionResult w;
  w.converged = true;
  for (const auto& slice : v.slices) {
    ProjectionResult r = project_to_admissible(slice, bounds, opts);
    w.iterations = std::max(w.iterations, r.iterations);
    w.change = std::max(w.change, r.change);
    w.box_violation = std::max(w.box_violation, r.box_violation);
    w.divergence = std::max(w.divergence, r.divergence);
    w.converged = w.converged && r.converged;
    out.slices.push_back(std::move(r.v));
  }
  if (worst) *worst = std::move(w);
  return out;
}

namespace {

// Smooth random potential supported at least two cells away from the boundary.
ScalarField windowed_potential(const Grid& grid, Rng& rng) {
  constexpr int kModes = 3;
  std::vector<std::array<double, 4>> modes;  // kx, ky, kz, coefficient ; phases below
  std::vector<std::array<double, 3>> phases;
  for (int i = 0; i < 8; ++i) {
    std::array<double, 4> m{};
    std::array<double, 3> ph{};
    double k2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      m[a] = a < grid.dim ? std::floor(rng.uniform(1.0, kModes + 1.0)) : 0.0;
      ph[a] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      k2 += m[a] * m[a];
    }
    m[3] = rng.uniform(-1.0, 1.0) / k2;
    modes.push_back(m);
    phases.push_back(ph);
  }
  const auto window = [&grid](int axis, double t) {
    const double delta = 2.0 * grid.h[axis];
    const double len = grid.length[axis] - 2.0 * delta;
    if (t <= delta || t >= grid.length[axis] - delta) return 0.0;
    const double s = std::sin(std::numbers::pi * (t - delta) / len);
    return s * s;
  };
  return ScalarField::sample(grid, [&](double x, double y, double z) {
    const std::array<double, 3> p{x, y, z};
    double w = 1.0;
    for (int a = 0; a < grid.dim; ++a) w *= window(a, p[a]);
    if (w == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      double term = modes[i][3];
      for (int a = 0; a < grid.dim; ++a)
        term *= std::cos(2.0 * std::numbers::pi * modes[i][a] * p[a] / grid.length[a] + phases[i][a]);
      s += term;
    }
    return w * s;
  });
}

}  // namespace

VectorField random_solenoidal(const Grid& grid, std::uint64_t seed, double amplitude) {
  Rng rng(seed);
  VectorField v(grid);
  // d_a := -partial_transpose(., a) is the central difference with odd ghosts.
  // The divergence is sum_a d_a(v_a), and transposed partials along different
  // axes commute, so rot/curl of a potential built from d_a is divergence free
  // to rounding.
  const auto d = [](const ScalarField& f, int axis) { return -1.0 * partial_transpose(f, axis); };
  if (grid.dim == 2) {
    const ScalarField s = windowed_potential(grid, rng);
    v[0] = d(s, 1);
    v[1] = -1.0 * d(s, 0);
  } else {
    std::vector<ScalarField> pot;
    for (int a = 0; a < 3; ++a) pot.push_back(windowed_potential(grid, rng));
    v[0] = d(pot[2], 1) - d(pot[1], 2);
    v[1] = d(pot[0], 2) - d(pot[2], 0);
    v[2] = d(pot[1], 0) - d(pot[0], 1);
  }
  const double peak = v.max_abs();
  v *= peak > 0.0 ? amplitude / peak : 0.0;
  return v;
}

}  // namespace nlch
