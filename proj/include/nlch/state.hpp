#pragma once

#include <vector>

#include "nlch/control.hpp"
#include "nlch/field.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"

namespace nlch {

class NeumannSpectral;

struct StateParams {
  double dt = 1e-3;
  int n_steps = 20;
  double newton_tol = 1e-10;  ///< max-norm of the step residual
  int newton_max = 50;
  double guard = 1e-6;        ///< Newton iterates stay in (-1 + guard, 1 - guard)
  double cfl_limit = 0.9;     ///< dt * max|v| / h
  double linear_tol = 1e-12;  ///< relative residual of the inner Krylov solves
};

void validate(const StateParams& p);

struct StateTrajectory {
  std::vector<ScalarField> phi;  ///< n_steps + 1 slices, phi[0] = initial datum
  std::vector<ScalarField> mu;   ///< mu[0] from phi[0] without lag
  std::vector<double> mass;        ///< mean(phi^n)
  std::vector<double> energy;      ///< free energy of phi^n
  std::vector<double> separation;  ///< 1 - max|phi^n|
  std::vector<int> newton_iterations;

  int n_steps() const { return static_cast<int>(phi.size()) - 1; }
};

struct StepResult {
  ScalarField phi;
  ScalarField mu;
  int newton_iterations = 0;
  double residual = 0.0;
};

/// E(phi) = -1/2 <K*phi, phi> + int F(phi).
double energy(const ScalarField& phi, const KernelTable& kernel, const PotentialParams& pot);

/// dt * max|v| / h_min.
double cfl_number(const VectorField& v, double dt);

/// One convex-splitting step
///   (phi' - phi)/dt + div(phi v) - Lap[F'(phi') - K*phi] = 0,
/// solved by damped Newton on phi'. Returns phi' and mu' = F'(phi') - K*phi.
/// Each Newton update is written as a discrete flux divergence, so
/// mean(phi') = mean(phi) to rounding regardless of the solve tolerance.
StepResult state_step(const ScalarField& phi, const VectorField& v, const KernelTable& kernel,
                      const PotentialParams& pot, const StateParams& params,
                      const NeumannSpectral* spectral = nullptr);

/// n_steps applications of state_step, slice n of `v` active on step n.
/// Failures are rethrown with the step index.
StateTrajectory simulate(const ScalarField& phi0, const ControlField& v, const KernelTable& kernel,
                         const PotentialParams& pot, const StateParams& params);

/// Discrete energy balance defect
///   r_m = E(phi^m) - E(phi^0) + sum_{n<m} dt (||grad mu^{n+1}||^2 - <phi^n v^n, grad mu^{n+1}>).
/// r_0 = 0; the defect is O(dt) for smooth data.
std::vector<double> energy_identity_residual(const StateTrajectory& traj, const ControlField& v,
                                             const KernelTable& kernel, const PotentialParams& pot);

}  // namespace nlch
