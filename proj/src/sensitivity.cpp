#include "nlch/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "nlch/error.hpp"
#include "nlch/leray.hpp"
#include "nlch/linear_solver.hpp"
#include "nlch/operators.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

const ScalarField& TargetData::tracking(int n) const {
  return phi_Q.size() == 1 ? phi_Q.front() : phi_Q[static_cast<std::size_t>(n)];
}

void validate(const TargetData& t, int n_steps) {
  for (double g : t.gamma)
    if (!(g >= 0.0)) throw ConfigError("cost weights must be nonnegative");
  if (t.gamma[0] + t.gamma[1] + t.gamma[2] <= 0.0)
    throw ConfigError("C3 violated: not all zero required");
  if (t.phi_Q.empty() || (t.phi_Q.size() != 1 && t.phi_Q.size() != static_cast<std::size_t>(n_steps) + 1))
    throw ConfigError("phi_Q must have 1 or n_steps + 1 slices");
}

namespace {

// Solves (diag(dinv) - dt Lap) z = rhs.
ScalarField solve_implicit(const NeumannSpectral& spectral, const std::vector<double>& dinv, double dt,
                           const ScalarField& rhs, double tol) {
  const Grid& g = rhs.grid();
  double dmean = 0.0;
  for (double d : dinv) dmean += d;
  dmean /= static_cast<double>(dinv.size());
  const LinearMap apply = [&](std::span<const double> in, std::span<double> o) {
    const ScalarField lap = laplacian_neumann(ScalarField(g, std::vector<double>(in.begin(), in.end())));
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = dinv[i] * in[i] - dt * lap[i];
  };
  const LinearMap precond = [&](std::span<const double> in, std::span<double> o) {
    spectral.solve_shifted(dmean, dt, in, o);
  };
  std::vector<double> z(g.size(), 0.0);
  CgOptions opts;
  opts.rel_tol = tol;
  const CgResult cg = pcg(apply, precond, rhs.values(), z, opts);
  if (!cg.converged && cg.rel_residual > 1e-6)
    throw SolverError("sensitivity linear solve failed", cg.rel_residual);
  return ScalarField(g, std::move(z));
}

std::vector<double> inverse_curvature(const PotentialParams& pot, const ScalarField& phi) {
  std::vector<double> d(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) d[i] = 1.0 / potential_eval(pot, phi[i], 2);
  return d;
}

void require_layout(const StateTrajectory& traj, const ControlField& v) {
  if (v.n_steps() < traj.n_steps()) throw ConfigError("control has fewer slices than the trajectory");
}

}  // namespace

LinearizedTrajectory linearized_solve(const StateTrajectory& traj, const ControlField& vbar,
                                      const ControlField& w, const KernelTable& kernel,
                                      const PotentialParams& pot, const StateParams& params) {
  require_layout(traj, vbar);
  require_layout(traj, w);
  const Grid& g = traj.phi.front().grid();
  const double dt = params.dt;
  const NeumannSpectral spectral(g);
  LinearizedTrajectory lin;
  lin.xi.emplace_back(g);
  lin.eta.emplace_back(g);
  for (int n = 0; n < traj.n_steps(); ++n) {
    const ScalarField& xi = lin.xi.back();
    const ScalarField kxi = convolve(kernel, xi);
    ScalarField rhs = xi;
    rhs.axpy(-dt, divergence(hadamard(xi, vbar.slices[n])));
    rhs.axpy(-dt, laplacian_neumann(kxi));
    rhs.axpy(-dt, divergence(hadamard(traj.phi[n], w.slices[n])));

    // (I - dt Lap D) xi' = rhs  <=>  (D^{-1} - dt Lap) z = rhs, xi' = rhs + dt Lap z
    const ScalarField z = solve_implicit(spectral, inverse_curvature(pot, traj.phi[n + 1]), dt, rhs,
                                         params.linear_tol);
    ScalarField next = rhs;
    next.axpy(dt, laplacian_neumann(z));

    ScalarField eta = hadamard(potential_eval(pot, traj.phi[n + 1], 2), next);
    eta -= kxi;
    lin.xi.push_back(std::move(next));
    lin.eta.push_back(std::move(eta));
  }
  return lin;
}

AdjointTrajectory adjoint_solve(const StateTrajectory& traj, const ControlField& vbar,
                                const TargetData& targets, const KernelTable& kernel,
                                const PotentialParams& pot, const StateParams& params) {
  require_layout(traj, vbar);
  const int steps = traj.n_steps();
  validate(targets, steps);
  const Grid& g = traj.phi.front().grid();
  const double dt = params.dt;
  const auto& gamma = targets.gamma;
  const NeumannSpectral spectral(g);

  AdjointTrajectory adj;
  adj.p.assign(static_cast<std::size_t>(steps) + 1, ScalarField(g));
  adj.lambda.assign(static_cast<std::size_t>(steps) + 1, ScalarField(g));
  adj.q.assign(static_cast<std::size_t>(steps) + 1, ScalarField(g));

  adj.p[steps] = gamma[1] * (traj.phi[steps] - targets.phi_Omega);
  for (int n = steps - 1; n >= 0; --n) {
    // A_n^T = I - dt diag(F'') Lap; scaling by diag(1/F'') gives an SPD system.
    const std::vector<double> dinv = inverse_curvature(pot, traj.phi[n + 1]);
    ScalarField rhs(g);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = dinv[i] * adj.p[n + 1][i];
    ScalarField lambda = solve_implicit(spectral, dinv, dt, rhs, params.linear_tol);

    const ScalarField lap_lambda = laplacian_neumann(lambda);
    const VectorField grad_lambda = gradient(lambda);
    ScalarField p = lambda;
    for (int a = 0; a < g.dim; ++a) p.axpy(dt, hadamard(vbar.slices[n][a], grad_lambda[a]));
    p.axpy(-dt, convolve(kernel, lap_lambda));
    if (gamma[0] != 0.0) p.axpy(gamma[0] * dt, traj.phi[n] - targets.tracking(n));

    adj.q[n + 1] = -1.0 * lap_lambda;
    adj.lambda[n + 1] = std::move(lambda);
    adj.p[n] = std::move(p);
  }
  adj.q[0] = -1.0 * laplacian_neumann(adj.p[0]);
  return adj;
}

ControlField adjoint_transport(const StateTrajectory& traj, const AdjointTrajectory& adj, double dt) {
  ControlField out;
  out.dt = dt;
  for (int n = 0; n < traj.n_steps(); ++n)
    out.slices.push_back(leray_project(hadamard(traj.phi[n], gradient(adj.lambda[n + 1]))));
  return out;
}

DualityCheck duality_residual(const StateTrajectory& traj, const LinearizedTrajectory& lin,
                              const AdjointTrajectory& adj, const ControlField& w,
                              const TargetData& targets) {
  const int steps = traj.n_steps();
  DualityCheck d;
  const ControlField transport = adjoint_transport(traj, adj, w.dt);
  for (int n = 0; n < steps; ++n) d.lhs += w.dt * inner(transport.slices[n], w.slices[n]);
  if (targets.gamma[0] != 0.0)
    for (int n = 0; n < steps; ++n)
      d.rhs += targets.gamma[0] * w.dt * inner(traj.phi[n] - targets.tracking(n), lin.xi[n]);
  d.rhs += targets.gamma[1] * inner(traj.phi[steps] - targets.phi_Omega, lin.xi[steps]);
  d.residual = std::abs(d.lhs - d.rhs);
  const double scale = std::max(std::abs(d.lhs), std::abs(d.rhs));
  d.relative = scale > 0.0 ? d.residual / scale : 0.0;
  return d;
}

}  // namespace nlch
