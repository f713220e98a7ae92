#include "nlch/harness/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "nlch/error.hpp"
#include "nlch/harness/field_io.hpp"
#include "nlch/harness/parallel.hpp"
#include "nlch/harness/problem.hpp"
#include "nlch/harness/timeseries.hpp"
#include "nlch/harness/verify.hpp"
#include "nlch/random.hpp"

namespace nlch {

namespace fs = std::filesystem;

namespace {

std::string indexed(const char* stem, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.nlchf", stem, n);
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

class Failures {
 public:
  Failures(const fs::path& dir, std::ostream& report) : path_(dir / "failures.jsonl"), report_(report) {}

  void add(const std::string& check, double value, double threshold, const std::string& message = {}) {
    lines_.push_back(failure_line(check, value, threshold, message));
    report_ << lines_.back() << '\n';
  }

  /// Writes the report file (removing a stale one) and returns the exit status.
  int finish(int failure_status = 1) {
    std::error_code ec;
    fs::remove(path_, ec);
    if (lines_.empty()) return 0;
    std::ofstream out(path_, std::ios::trunc);
    for (const auto& l : lines_) out << l << '\n';
    return failure_status;
  }

 private:
  fs::path path_;
  std::ostream& report_;
  std::vector<std::string> lines_;
};

void write_control(const ControlField& v, const fs::path& dir, const char* stem) {
  for (int n = 0; n < v.n_steps(); ++n)
    for (int a = 0; a < v.grid().dim; ++a) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_c%d_%04d.nlchf", stem, a, n);
      write_field(v.slices[static_cast<std::size_t>(n)][a], dir / name);
    }
}

int cmd_simulate(const ProblemConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output_dir / "simulate";
  fs::create_directories(dir);
  const KernelTable kernel = build_kernel(cfg.kernel, cfg.grid);
  const ControlField v = initial_control(cfg);
  const StateTrajectory tr = simulate(initial_state(cfg), v, kernel, cfg.potential, cfg.state);
  for (int n = 0; n <= tr.n_steps(); ++n) {
    write_field(tr.phi[static_cast<std::size_t>(n)], dir / indexed("phi", n));
    write_field(tr.mu[static_cast<std::size_t>(n)], dir / indexed("mu", n));
  }
  emit_timeseries(diagnostics_series(tr, cfg.state.dt), dir / "diagnostics.csv");
  double drift = 0.0;
  for (double m : tr.mass) drift = std::max(drift, std::abs(m - tr.mass.front()));
  out << "simulate: " << tr.n_steps() << " steps, mass drift " << fmt(drift) << ", min separation "
      << fmt(*std::min_element(tr.separation.begin(), tr.separation.end())) << ", final energy "
      << fmt(tr.energy.back()) << "\n";
  out << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_make_targets(const ProblemConfig& cfg, std::ostream& out) {
  const KernelTable kernel = build_kernel(cfg.kernel, cfg.grid);
  const TargetSet targets = synthesize_targets(cfg, kernel);
  const fs::path dir = cfg.output_dir / "targets";
  const fs::path manifest = write_targets(targets, cfg, dir);
  write_control(reference_control(cfg), dir, "v_ref");
  out << "make-targets: " << targets.data.phi_Q.size() << " tracking slices\n";
  out << "wrote " << manifest.string() << "\n";
  return 0;
}

int cmd_optimize(const ProblemConfig& cfg, std::ostream& out, Failures& failures) {
  const fs::path dir = cfg.output_dir / "optimize";
  fs::create_directories(dir);
  const ControlProblem problem = build_problem(cfg);
  const ControlField v0 = project_to_admissible(initial_control(cfg), cfg.bounds, cfg.projection);

  Timeseries history;
  history.with_cost = true;
  const auto on_iteration = [&](int k, const ControlField& v, const GradientEvaluation& eval) {
    const double stat = stationarity_residual(v, eval.gradient, cfg.bounds, cfg.projection);
    history.rows.push_back(optimization_row(k, eval.trajectory, cfg.state.dt, eval.cost.total, stat));
    out << "iter " << k << "  J " << fmt(eval.cost.total) << "  stationarity " << fmt(stat) << "\n";
  };
  const OptimizationResult res = projected_gradient_descent(v0, problem, cfg.optimizer, on_iteration);

  emit_timeseries(history, dir / "history.csv");
  write_control(res.v_opt, dir, "v_opt");
  nlohmann::json summary;
  summary["iterations"] = res.iterations;
  summary["converged"] = res.converged;
  summary["message"] = res.message;
  summary["cost_initial"] = res.cost_history.front();
  summary["cost_final"] = res.cost_history.back();
  summary["stationarity_final"] = res.stationarity_history.back();
  summary["fixed_point_residual"] = res.fixed_point_residual;
  std::ofstream(dir / "result.json", std::ios::trunc) << summary.dump(2) << '\n';

  out << "optimize: " << res.message << " after " << res.iterations << " iterations, J " << fmt(res.cost_history.front())
      << " -> " << fmt(res.cost_history.back()) << "\n";
  for (std::size_t k = 1; k < res.cost_history.size(); ++k)
    if (res.cost_history[k] > res.cost_history[k - 1])
      failures.add("optimizer-monotone-cost", res.cost_history[k] - res.cost_history[k - 1], 0.0);
  if (res.fixed_point_residual > 10.0 * cfg.optimizer.tol)
    failures.add("optimizer-fixed-point", res.fixed_point_residual, 10.0 * cfg.optimizer.tol);
  if (!res.converged && res.message.rfind("line search", 0) == 0)
    failures.add("optimizer-line-search", res.stationarity_history.back(), cfg.optimizer.tol);
  return 0;
}

int cmd_grad_check(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out, Failures& failures) {
  const fs::path dir = cfg.output_dir / "grad-check";
  fs::create_directories(dir);
  const ControlProblem problem = build_problem(cfg);
  const ControlField v = project_to_admissible(initial_control(cfg), cfg.bounds, cfg.projection);
  const GradCheckReport rep = gradient_check(problem, v, cfg.grad_check.directions, cfg.seed, opts.threads);

  std::string csv = "direction,h,fd,adjoint,rel_error\r\n";
  for (const auto& r : rep.rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\r\n", r.direction, r.h, r.fd, r.adjoint, r.rel_error);
    csv += buf;
    out << "direction " << r.direction << "  h " << fmt(r.h) << "  rel error " << fmt(r.rel_error) << "\n";
  }
  std::ofstream(dir / "report.csv", std::ios::binary | std::ios::trunc) << csv;

  double worst = 0.0;
  for (double e : rep.min_error) worst = std::max(worst, std::isnan(e) ? std::numeric_limits<double>::infinity() : e);
  out << "grad-check: worst min relative error " << fmt(worst) << " (threshold " << fmt(cfg.grad_check.threshold)
      << ")\n";
  if (!(worst <= cfg.grad_check.threshold)) failures.add("gradient-fd-mismatch", worst, cfg.grad_check.threshold);
  return 0;
}

int cmd_verify(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out, Failures& failures) {
  const auto reports = run_verify(cfg, opts.threads);
  int passed = 0;
  for (const auto& r : reports) {
    out << (r.passed ? "PASS " : "FAIL ") << r.check << "  value " << fmt(r.value) << "  threshold "
        << fmt(r.threshold) << (r.error.empty() ? "" : "  error: " + r.error) << "\n";
    if (r.passed) ++passed;
    else failures.add(r.check, r.value, r.threshold, r.error);
  }
  out << "verify: " << passed << "/" << reports.size() << " checks passed\n";
  return 0;
}

}  // namespace

GradCheckReport gradient_check(const ControlProblem& problem, const ControlField& v, int directions,
                               std::uint64_t seed, int threads) {
  const GradientEvaluation eval = evaluate_gradient(problem, v);
  const std::vector<double> hs = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  GradCheckReport rep;
  rep.rows.resize(static_cast<std::size_t>(directions) * hs.size());
  std::vector<ControlField> ws;
  for (int d = 0; d < directions; ++d) {
    Rng rng(seed + 1000 + static_cast<std::uint64_t>(d));
    ControlField w = ControlField::zeros(v.grid(), v.n_steps(), v.dt);
    const VectorField base = random_solenoidal(v.grid(), seed + 2000 + static_cast<std::uint64_t>(d), 1.0);
    for (auto& slice : w.slices) {
      slice = base;
      slice *= rng.uniform(0.5, 1.5);
    }
    ws.push_back(std::move(w));
  }
  parallel_for(static_cast<int>(rep.rows.size()), threads, [&](int i) {
    const auto d = static_cast<std::size_t>(i) / hs.size();
    const double h = hs[static_cast<std::size_t>(i) % hs.size()];
    GradCheckRow& row = rep.rows[static_cast<std::size_t>(i)];
    row.direction = static_cast<int>(d);
    row.h = h;
    row.adjoint = inner(eval.gradient, ws[d]);
    row.fd = fd_directional_derivative(problem, v, ws[d], h);
    row.rel_error = std::abs(row.fd - row.adjoint) / std::max(std::abs(row.adjoint), std::numeric_limits<double>::min());
  });
  rep.min_error.assign(static_cast<std::size_t>(directions), std::numeric_limits<double>::infinity());
  for (const auto& r : rep.rows) {
    auto& m = rep.min_error[static_cast<std::size_t>(r.direction)];
    if (!(r.rel_error >= m)) m = r.rel_error;
  }
  return rep;
}

std::string failure_line(const std::string& check, double value, double threshold, const std::string& message) {
  nlohmann::json j;
  j["check"] = check;
  j["value"] = value;
  j["threshold"] = threshold;
  if (!message.empty()) j["message"] = message;
  return j.dump();
}

int run_command(const std::string& command, const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
                std::ostream& report) {
  fs::create_directories(cfg.output_dir);
  Failures failures(cfg.output_dir, report);
  try {
    if (command == "simulate") cmd_simulate(cfg, out);
    else if (command == "make-targets") cmd_make_targets(cfg, out);
    else if (command == "optimize") cmd_optimize(cfg, out, failures);
    else if (command == "grad-check") cmd_grad_check(cfg, opts, out, failures);
    else if (command == "verify") cmd_verify(cfg, opts, out, failures);
    else throw ConfigError("unknown command '" + command + "'");
  } catch (const SolverError& e) {
    out << "error: " << e.what() << "\n";
    failures.add("solver-error", e.residual(), 0.0, e.what());
    return failures.finish(2);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    failures.add("command-error", std::numeric_limits<double>::quiet_NaN(), 0.0, e.what());
    return failures.finish(2);
  }
  return failures.finish(1);
}

}  // namespace nlch
