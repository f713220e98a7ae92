#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlch/control.hpp"
#include "nlch/kernel.hpp"
#include "nlch/leray.hpp"
#include "nlch/potential.hpp"
#include "nlch/sensitivity.hpp"
#include "nlch/state.hpp"

namespace nlch {

/// Everything needed to evaluate the reduced cost J_red(v) = J(v, S(v)).
struct ControlProblem {
  KernelTable kernel;
  PotentialParams potential;
  StateParams state;
  ScalarField phi0;
  TargetData targets;
  ControlBounds bounds;
  ProjectionOptions projection;
  /// Mutation hook for the gradient check: negates the adjoint contribution.
  bool flip_adjoint_sign = false;
};

struct CostBreakdown {
  double tracking_Q = 0.0;
  double tracking_T = 0.0;
  double control_energy = 0.0;
  double total = 0.0;
};

/// J = g1/2 sum_{n<N} dt ||phi^n - phi_Q^n||^2 + g2/2 ||phi^N - phi_Omega||^2
///   + g3/2 sum_{n<N} dt ||v^n||^2   (left-endpoint rectangle rule).
CostBreakdown evaluate_cost(const StateTrajectory& traj, const ControlField& v, const TargetData& targets);

/// g^n = gamma_3 v^n + P_sigma(phi^n grad lambda^{n+1}), the L2(Q) Riesz
/// representative of dJ_red on divergence-free directions.
ControlField reduced_gradient(const StateTrajectory& traj, const AdjointTrajectory& adj,
                              const ControlField& v, const TargetData& targets,
                              bool flip_adjoint_sign = false);

CostBreakdown reduced_cost(const ControlProblem& problem, const ControlField& v);

struct GradientEvaluation {
  StateTrajectory trajectory;
  AdjointTrajectory adjoint;
  CostBreakdown cost;
  ControlField gradient;
};

GradientEvaluation evaluate_gradient(const ControlProblem& problem, const ControlField& v);

/// Central difference [J_red(v + h w) - J_red(v - h w)] / (2h).
double fd_directional_derivative(const ControlProblem& problem, const ControlField& v,
                                 const ControlField& w, double h);

/// ||v - Proj_Vad(v - g)||_{L2(Q)}; zero exactly at discrete stationary points.
double stationarity_residual(const ControlField& v, const ControlField& g, const ControlBounds& bounds,
                             const ProjectionOptions& opts = {});

/// ||v - Proj_Vad(gamma_3^{-1} P_sigma(p grad phi))||_{L2(Q)}, requires gamma_3 > 0.
double fixed_point_residual(const ControlProblem& problem, const ControlField& v,
                            const GradientEvaluation& eval);

struct OptimizerOptions {
  double step0 = 1.0;     ///< length of the first trial step, in units of ||g_0||
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 30;
  int max_iter = 100;
  double tol = 1e-6;      ///< on stationarity_residual
};

struct OptimizationResult {
  ControlField v_opt;
  std::vector<double> cost_history;
  std::vector<double> stationarity_history;
  std::vector<double> step_history;  ///< accepted tau per step
  int iterations = 0;                ///< gradient evaluations
  bool converged = false;
  double fixed_point_residual = -1.0;  ///< negative when gamma_3 = 0 or not converged
  std::string message;
};

using IterationCallback = std::function<void(int iteration, const ControlField& v, const GradientEvaluation&)>;

/// Projected gradient v_{k+1} = Proj_Vad(v_k - tau_k g_k) with Armijo
/// backtracking  J(v_{k+1}) <= J(v_k) - (c / tau) ||v_{k+1} - v_k||^2.
/// Trial steps use the Barzilai-Borwein length <s,s>/<s,y>, which keeps the
/// iterate sequence invariant under scaling of the cost weights.
OptimizationResult projected_gradient_descent(const ControlField& v0, const ControlProblem& problem,
                                              const OptimizerOptions& opts = {},
                                              const IterationCallback& on_iteration = {});

}  // namespace nlch
