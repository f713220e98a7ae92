#pragma once

#include <array>
#include <vector>

#include "nlch/control.hpp"
#include "nlch/state.hpp"

namespace nlch {

// Discrete linearized and adjoint systems. Both are derived from the
// implemented state step rather than discretised separately: the linearized
// step is its exact derivative and the adjoint step its exact transpose, so
// the duality identity and gradient consistency hold to solver tolerance.
//
// Step n of the state map, written with b_n = phi^n - dt div(phi^n v^n) - dt Lap K*phi^n,
//   A_n phi^{n+1} ~ phi^{n+1} - dt Lap F'(phi^{n+1}) = b_n.
// Linearized:  A_n xi^{n+1} = B_n xi^n + C_n w^n  with
//   A_n = I - dt Lap diag(F''(phi^{n+1})),
//   B_n = I - dt div(. v^n) - dt Lap K*,
//   C_n w = -dt div(phi^n w).

struct TargetData {
  std::vector<ScalarField> phi_Q;  ///< one slice (constant in time) or n_steps + 1 slices
  ScalarField phi_Omega;
  std::array<double, 3> gamma{1.0, 1.0, 0.0};

  const ScalarField& tracking(int n) const;
};

/// Nonnegative weights, not all zero; target slice count 1 or n_steps + 1.
void validate(const TargetData& t, int n_steps);

struct LinearizedTrajectory {
  std::vector<ScalarField> xi;   ///< xi[0] = 0
  std::vector<ScalarField> eta;  ///< eta^{n+1} = F''(phi^{n+1}) xi^{n+1} - K*xi^n, eta[0] = 0
};

/// Directional derivative of the state map at `vbar` in direction `w`.
LinearizedTrajectory linearized_solve(const StateTrajectory& traj, const ControlField& vbar,
                                      const ControlField& w, const KernelTable& kernel,
                                      const PotentialParams& pot, const StateParams& params);

struct AdjointTrajectory {
  /// p[n] is the sensitivity of the cost with respect to phi^n;
  /// p[N] = gamma_2 (phi^N - phi_Omega) exactly.
  std::vector<ScalarField> p;
  /// Adjoint of the implicit solve, lambda^{n+1} = A_n^{-T} p^{n+1};
  /// lambda[0] is unused and zero.
  std::vector<ScalarField> lambda;
  /// q^n = -Lap lambda^n (n >= 1), q^0 = -Lap p^0.
  std::vector<ScalarField> q;
};

/// Backward sweep:
///   A_n^T lambda^{n+1} = p^{n+1},
///   p^n = gamma_1 dt (phi^n - phi_Q^n) + lambda^{n+1} + dt v^n . grad lambda^{n+1} - dt K*(Lap lambda^{n+1}).
AdjointTrajectory adjoint_solve(const StateTrajectory& traj, const ControlField& vbar,
                                const TargetData& targets, const KernelTable& kernel,
                                const PotentialParams& pot, const StateParams& params);

/// Per slice P_sigma(phi^n grad lambda^{n+1}): the transpose of the control
/// coupling C_n. It is the discrete counterpart of -P_sigma(p grad phi); the
/// two differ by grad(p phi) in the continuum, which P_sigma removes.
ControlField adjoint_transport(const StateTrajectory& traj, const AdjointTrajectory& adj, double dt);

struct DualityCheck {
  double lhs = 0.0;  ///< -int_Q P_sigma(p grad phi) . w
  double rhs = 0.0;  ///< gamma_1 int_Q (phi - phi_Q) xi + gamma_2 int (phi(T) - phi_Omega) xi(T)
  double residual = 0.0;
  double relative = 0.0;  ///< residual / max(|lhs|, |rhs|), 0 when both vanish
};

DualityCheck duality_residual(const StateTrajectory& traj, const LinearizedTrajectory& lin,
                              const AdjointTrajectory& adj, const ControlField& w,
                              const TargetData& targets);

}  // namespace nlch
