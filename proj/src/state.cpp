#include "nlch/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlch/error.hpp"
#include "nlch/linear_solver.hpp"
#include "nlch/operators.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

void validate(const StateParams& p) {
  if (!(p.dt > 0.0)) throw ConfigError("state dt must be positive");
  if (p.n_steps < 0) throw ConfigError("state n_steps must be nonnegative");
  if (!(p.newton_tol > 0.0)) throw ConfigError("state newton_tol must be positive");
  if (p.newton_max < 1) throw ConfigError("state newton_max must be at least 1");
  if (!(p.guard > 0.0 && p.guard <= 1e-2)) throw ConfigError("state guard must lie in (0, 1e-2]");
}

double energy(const ScalarField& phi, const KernelTable& kernel, const PotentialParams& pot) {
  const ScalarField kphi = convolve(kernel, phi);
  double entropy = 0.0;
  for (double s : phi.values()) entropy += potential_eval(pot, s, 0);
  return -0.5 * inner(kphi, phi) + entropy * phi.grid().cell_volume();
}

double cfl_number(const VectorField& v, double dt) { return dt * v.max_abs() / v.grid().min_spacing(); }

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::abs(d));
  return m;
}

double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double d : v) s += d * d;
  return s;
}

// R(phi') = phi' - dt Lap F'(phi') - b
ScalarField step_residual(const ScalarField& trial, const ScalarField& b, const PotentialParams& pot,
                          double dt) {
  ScalarField r = trial;
  r.axpy(-dt, laplacian_neumann(potential_eval(pot, trial, 1)));
  r -= b;
  return r;
}

}  // namespace

StepResult state_step(const ScalarField& phi, const VectorField& v, const KernelTable& kernel,
                      const PotentialParams& pot, const StateParams& params,
                      const NeumannSpectral* spectral) {
  const Grid& g = phi.grid();
  const double dt = params.dt;
  const double cfl = cfl_number(v, dt);
  if (cfl > params.cfl_limit)
    throw ConfigError("CFL violated: dt*max|v|/h = " + std::to_string(cfl) + " > " +
                      std::to_string(params.cfl_limit));
  const double bound = 1.0 - params.guard;
  if (max_abs(phi.values()) >= bound) throw ConfigError("state step: phi not separated from +-1 by the guard");

  std::unique_ptr<NeumannSpectral> own;
  if (!spectral) {
    own = std::make_unique<NeumannSpectral>(g);
    spectral = own.get();
  }

  const ScalarField kphi = convolve(kernel, phi);
  ScalarField b = phi;
  b.axpy(-dt, divergence(hadamard(phi, v)));
  b.axpy(-dt, laplacian_neumann(kphi));

  StepResult out;
  ScalarField cur = phi;
  ScalarField res = step_residual(cur, b, pot, dt);
  double rnorm = max_abs(res.values());
  int it = 0;
  for (; rnorm > params.newton_tol; ++it) {
    if (it >= params.newton_max) throw SolverError("Newton did not converge in state step", rnorm);

    // Jacobian J = I - dt Lap diag(F''). With z = diag(F'') delta the system
    // becomes (diag(1/F'') - dt Lap) z = -R, which is SPD.
    std::vector<double> dinv(g.size());
    double dmean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      dinv[i] = 1.0 / potential_eval(pot, cur[i], 2);
      dmean += dinv[i];
    }
    dmean /= static_cast<double>(g.size());
    const LinearMap apply = [&](std::span<const double> in, std::span<double> o) {
      const ScalarField lap = laplacian_neumann(ScalarField(g, std::vector<double>(in.begin(), in.end())));
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = dinv[i] * in[i] - dt * lap[i];
    };
    const LinearMap precond = [&](std::span<const double> in, std::span<double> o) {
      spectral->solve_shifted(dmean, dt, in, o);
    };
    ScalarField rhs = -1.0 * res;
    std::vector<double> z(g.size(), 0.0);
    CgOptions opts;
    opts.rel_tol = params.linear_tol;
    const CgResult cg = pcg(apply, precond, rhs.values(), z, opts);
    if (!cg.converged && cg.rel_residual > 1e-6)
      throw SolverError("Newton linear solve failed in state step", cg.rel_residual);

    // delta = -R + dt Lap z: a flux divergence plus -R, so sum(delta) = -sum(R).
    ScalarField delta = rhs;
    delta.axpy(dt, laplacian_neumann(ScalarField(g, std::move(z))));

    double lam = 1.0;
    const double r2 = sum_sq(res.values());
    for (;;) {
      ScalarField trial = cur;
      trial.axpy(lam, delta);
      if (max_abs(trial.values()) < bound) {
        ScalarField tres = step_residual(trial, b, pot, dt);
        if (sum_sq(tres.values()) <= (1.0 - 1e-4 * lam) * r2 || lam < 1e-3) {
          cur = std::move(trial);
          res = std::move(tres);
          break;
        }
      }
      lam *= 0.5;
      if (lam < 1e-14) throw SolverError("Newton damping underflow in state step", rnorm);
    }
    rnorm = max_abs(res.values());
  }

  out.mu = potential_eval(pot, cur, 1);
  out.mu -= kphi;
  out.phi = std::move(cur);
  out.newton_iterations = it;
  out.residual = rnorm;
  return out;
}

namespace {

void record_diagnostics(StateTrajectory& t, const ScalarField& phi, const KernelTable& kernel,
                        const PotentialParams& pot) {
  t.mass.push_back(mean(phi));
  t.energy.push_back(energy(phi, kernel, pot));
  t.separation.push_back(1.0 - max_abs(phi.values()));
}

}  // namespace

StateTrajectory simulate(const ScalarField& phi0, const ControlField& v, const KernelTable& kernel,
                         const PotentialParams& pot, const StateParams& params) {
  validate(params);
  validate(pot);
  if (v.n_steps() < params.n_steps)
    throw ConfigError("control has fewer slices than state steps");
  if (max_abs(phi0.values()) >= 1.0 - params.guard)
    throw ConfigError("initial datum must satisfy max|phi0| < 1 - guard");

  const NeumannSpectral spectral(phi0.grid());
  StateTrajectory t;
  t.phi.push_back(phi0);
  ScalarField mu0 = potential_eval(pot, phi0, 1);
  mu0 -= convolve(kernel, phi0);
  t.mu.push_back(std::move(mu0));
  t.newton_iterations.push_back(0);
  record_diagnostics(t, phi0, kernel, pot);

  for (int n = 0; n < params.n_steps; ++n) {
    StepResult step;
    try {
      step = state_step(t.phi.back(), v.slices[static_cast<std::size_t>(n)], kernel, pot, params, &spectral);
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(n) + ": " + e.what(), e.residual());
    } catch (const ConfigError& e) {
      throw ConfigError("step " + std::to_string(n) + ": " + e.what());
    }
    record_diagnostics(t, step.phi, kernel, pot);
    t.newton_iterations.push_back(step.newton_iterations);
    t.phi.push_back(std::move(step.phi));
    t.mu.push_back(std::move(step.mu));
  }
  return t;
}

std::vector<double> energy_identity_residual(const StateTrajectory& traj, const ControlField& v,
                                             const KernelTable&, const PotentialParams&) {
  const int steps = traj.n_steps();
  std::vector<double> r(static_cast<std::size_t>(steps) + 1, 0.0);
  double flux = 0.0;
  for (int n = 0; n < steps; ++n) {
    const VectorField gmu = gradient(traj.mu[n + 1]);
    flux += v.dt * (inner(gmu, gmu) - inner(hadamard(traj.phi[n], v.slices[n]), gmu));
    r[n + 1] = traj.energy[n + 1] - traj.energy[0] + flux;
  }
  return r;
}

}  // namespace nlch
