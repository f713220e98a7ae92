#include "nlch/optimizer.hpp"

#include <cmath>
#include <limits>

#include "nlch/error.hpp"
#include "nlch/leray.hpp"

namespace nlch {

CostBreakdown evaluate_cost(const StateTrajectory& traj, const ControlField& v, const TargetData& targets) {
  const int steps = traj.n_steps();
  const auto& gamma = targets.gamma;
  CostBreakdown c;
  for (int n = 0; n < steps; ++n) {
    const ScalarField e = traj.phi[n] - targets.tracking(n);
    c.tracking_Q += inner(e, e);
    c.control_energy += inner(v.slices[n], v.slices[n]);
  }
  c.tracking_Q *= 0.5 * gamma[0] * v.dt;
  c.control_energy *= 0.5 * gamma[2] * v.dt;
  const ScalarField eT = traj.phi[steps] - targets.phi_Omega;
  c.tracking_T = 0.5 * gamma[1] * inner(eT, eT);
  c.total = c.tracking_Q + c.tracking_T + c.control_energy;
  return c;
}

ControlField reduced_gradient(const StateTrajectory& traj, const AdjointTrajectory& adj,
                              const ControlField& v, const TargetData& targets, bool flip_adjoint_sign) {
  ControlField g = adjoint_transport(traj, adj, v.dt);
  if (flip_adjoint_sign) g *= -1.0;
  const double g3 = targets.gamma[2];
  if (g3 != 0.0)
    for (int n = 0; n < traj.n_steps(); ++n) g.slices[n].axpy(g3, v.slices[n]);
  return g;
}

CostBreakdown reduced_cost(const ControlProblem& problem, const ControlField& v) {
  const StateTrajectory traj = simulate(problem.phi0, v, problem.kernel, problem.potential, problem.state);
  return evaluate_cost(traj, v, problem.targets);
}

GradientEvaluation evaluate_gradient(const ControlProblem& problem, const ControlField& v) {
  GradientEvaluation e;
  e.trajectory = simulate(problem.phi0, v, problem.kernel, problem.potential, problem.state);
  e.cost = evaluate_cost(e.trajectory, v, problem.targets);
  e.adjoint = adjoint_solve(e.trajectory, v, problem.targets, problem.kernel, problem.potential, problem.state);
  e.gradient = reduced_gradient(e.trajectory, e.adjoint, v, problem.targets, problem.flip_adjoint_sign);
  return e;
}

double fd_directional_derivative(const ControlProblem& problem, const ControlField& v, const ControlField& w,
                                 double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  ControlField plus = v;
  plus.axpy(h, w);
  ControlField minus = v;
  minus.axpy(-h, w);
  return (reduced_cost(problem, plus).total - reduced_cost(problem, minus).total) / (2.0 * h);
}

double stationarity_residual(const ControlField& v, const ControlField& g, const ControlBounds& bounds,
                             const ProjectionOptions& opts) {
  ControlField trial = v;
  trial -= g;
  const ControlField proj = project_to_admissible(trial, bounds, opts);
  return norm(v - proj);
}

double fixed_point_residual(const ControlProblem& problem, const ControlField& v, const GradientEvaluation& eval) {
  const double g3 = problem.targets.gamma[2];
  if (!(g3 > 0.0)) throw ConfigError("fixed-point characterisation needs gamma_3 > 0");
  // P_sigma(p grad phi) is represented discretely by -adjoint_transport.
  ControlField target = adjoint_transport(eval.trajectory, eval.adjoint, v.dt);
  target *= -1.0 / g3;
  const ControlField proj = project_to_admissible(target, problem.bounds, problem.projection);
  return norm(v - proj);
}

namespace {

double safe_cost(const ControlProblem& problem, const ControlField& v) {
  try {
    return reduced_cost(problem, v).total;
  } catch (const SolverError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const ConfigError&) {  // CFL violation on an over-long trial step
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

OptimizationResult projected_gradient_descent(const ControlField& v0, const ControlProblem& problem,
                                              const OptimizerOptions& opts,
                                              const IterationCallback& on_iteration) {
  OptimizationResult res;
  ControlField v = v0;
  GradientEvaluation eval = evaluate_gradient(problem, v);
  double tau = 0.0;

  for (int k = 0; k < opts.max_iter; ++k) {
    res.iterations = k + 1;
    const double stat = stationarity_residual(v, eval.gradient, problem.bounds, problem.projection);
    res.cost_history.push_back(eval.cost.total);
    res.stationarity_history.push_back(stat);
    if (on_iteration) on_iteration(k, v, eval);
    if (stat <= opts.tol) {
      res.converged = true;
      res.message = "stationarity tolerance reached";
      break;
    }
    if (k + 1 == opts.max_iter) {
      res.message = "iteration limit reached";
      break;
    }

    if (tau <= 0.0) {
      const double gnorm = norm(eval.gradient);
      if (!(gnorm > 0.0)) {
        res.message = "zero gradient at an infeasible iterate";
        break;
      }
      tau = opts.step0 / gnorm;
    }
    bool accepted = false;
    ControlField next;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      ControlField trial = v;
      trial.axpy(-tau, eval.gradient);
      next = project_to_admissible(trial, problem.bounds, problem.projection);
      const ControlField step = next - v;
      const double s2 = inner(step, step);
      const double j = safe_cost(problem, next);
      if (j <= eval.cost.total - opts.armijo_c / tau * s2) {
        accepted = true;
        break;
      }
      tau *= opts.shrink;
    }
    if (!accepted) {
      res.message = "line search failed: step underflow";
      break;
    }
    res.step_history.push_back(tau);

    GradientEvaluation next_eval = evaluate_gradient(problem, next);
    const ControlField s = next - v;
    const ControlField y = next_eval.gradient - eval.gradient;
    const double sy = inner(s, y);
    if (sy > 0.0) tau = inner(s, s) / sy;
    v = std::move(next);
    eval = std::move(next_eval);
  }

  if (res.converged && problem.targets.gamma[2] > 0.0) res.fixed_point_residual = fixed_point_residual(problem, v, eval);
  res.v_opt = std::move(v);
  return res;
}

}  // namespace nlch
