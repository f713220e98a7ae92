#include "nlch/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <unistd.h>

#include "nlch/error.hpp"
#include "nlch/harness/field_io.hpp"
#include "nlch/harness/parallel.hpp"
#include "nlch/harness/problem.hpp"
#include "nlch/harness/timeseries.hpp"
#include "nlch/operators.hpp"
#include "nlch/random.hpp"
#include "nlch/reference.hpp"

namespace nlch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VectorField random_vector(const Grid& g, std::uint64_t seed) {
  VectorField v(g);
  for (int a = 0; a < g.dim; ++a) v[a] = random_field(g, seed + 17 * a, -1.0, 1.0);
  return v;
}

// Oracle grids for the O(N^2) quadratures stay small.
Grid small_grid(const ProblemConfig& cfg) {
  std::vector<int> n;
  std::vector<double> length;
  for (int a = 0; a < cfg.grid.dim; ++a) {
    n.push_back(std::min(cfg.grid.n[a], cfg.grid.dim == 2 ? 12 : 6));
    length.push_back(cfg.grid.length[a]);
  }
  return make_grid(cfg.grid.dim, n, length);
}

ControlField safe_control(const ProblemConfig& cfg, std::uint64_t seed) {
  // max |v| sized so the advective CFL number is 0.25
  const double amp = 0.25 * cfg.grid.min_spacing() / cfg.state.dt;
  return ControlField::constant(random_solenoidal(cfg.grid, seed, amp), cfg.state.n_steps, cfg.state.dt);
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double adjointness(const ProblemConfig& cfg) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const ScalarField f = random_field(cfg.grid, cfg.seed + k, -1.0, 1.0);
    const VectorField v = random_vector(cfg.grid, cfg.seed + 100 + k);
    const double d = std::abs(inner(gradient(f), v) + inner(f, divergence(v)));
    worst = std::max(worst, d / (norm(f) * norm(v)));
  }
  return worst;
}

double laplacian_constants(const ProblemConfig& cfg) {
  return max_abs(laplacian_neumann(ScalarField(cfg.grid, 2.5)));
}

double inverse_roundtrip(const ProblemConfig& cfg) {
  const ScalarField g = subtract_mean(random_field(cfg.grid, cfg.seed + 3, -1.0, 1.0));
  ScalarField rhs = laplacian_neumann(g);
  rhs *= -1.0;
  return norm(inv_neumann_laplacian(rhs) - g) / norm(g);
}

double potential_derivatives(const ProblemConfig& cfg) {
  double worst = 0.0;
  const double h = 1e-5;
  for (double s = -0.95; s <= 0.95; s += 0.05) {
    for (int order = 1; order <= 3; ++order) {
      const double fd = (potential_eval(cfg.potential, s + h, order - 1) -
                         potential_eval(cfg.potential, s - h, order - 1)) / (2.0 * h);
      const double exact = potential_eval(cfg.potential, s, order);
      worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  return worst;
}

double potential_convexity(const ProblemConfig& cfg) {
  double lowest = std::numeric_limits<double>::infinity();
  for (double s = -0.999; s <= 0.999; s += 0.001)
    lowest = std::min(lowest, (potential_eval(cfg.potential, s, 2) - cfg.potential.alpha()) / cfg.potential.alpha());
  return lowest;
}

double convolution_oracle(const ProblemConfig& cfg) {
  const Grid g = small_grid(cfg);
  const KernelSpec spec = cfg.kernel.family == KernelFamily::gaussian ? KernelSpec::default_gaussian(g)
                                                                      : KernelSpec::default_newtonian(g);
  const KernelTable k = build_kernel(spec, g);
  const ScalarField f = random_field(g, cfg.seed + 5, -1.0, 1.0);
  const ScalarField fast = convolve(k, f);
  const ScalarField slow = reference::direct_convolve(spec, f);
  return norm(fast - slow) / norm(slow);
}

double energy_oracle(const ProblemConfig& cfg) {
  const Grid g = small_grid(cfg);
  const KernelSpec spec = cfg.kernel.family == KernelFamily::gaussian ? KernelSpec::default_gaussian(g)
                                                                      : KernelSpec::default_newtonian(g);
  const KernelTable k = build_kernel(spec, g);
  const ScalarField f = random_field(g, cfg.seed + 6, -0.8, 0.8);
  const double slow = reference::direct_energy(spec, cfg.potential, f);
  return std::abs(energy(f, k, cfg.potential) - slow) / std::abs(slow);
}

double convolution_symmetry(const ProblemConfig& cfg) {
  const KernelTable k = build_kernel(cfg.kernel, cfg.grid);
  const ScalarField f = random_field(cfg.grid, cfg.seed + 7, -1.0, 1.0);
  const ScalarField g = random_field(cfg.grid, cfg.seed + 8, -1.0, 1.0);
  const double a = inner(convolve(k, f), g);
  const double b = inner(f, convolve(k, g));
  return std::abs(a - b) / (norm(convolve(k, f)) * norm(g));
}

double leray_gradients(const ProblemConfig& cfg) {
  const ScalarField psi = random_field(cfg.grid, cfg.seed + 9, -1.0, 1.0);
  const VectorField gp = gradient(psi);
  return norm(leray_project(gp)) / norm(gp);
}

double leray_idempotent(const ProblemConfig& cfg) {
  const VectorField p1 = leray_project(random_vector(cfg.grid, cfg.seed + 10));
  return norm(leray_project(p1) - p1) / norm(p1);
}

double dykstra_feasibility(const ProblemConfig& cfg) {
  VectorField v = random_vector(cfg.grid, cfg.seed + 11);
  for (int a = 0; a < cfg.grid.dim; ++a) v[a] *= 3.0 * std::max(std::abs(cfg.bounds.vmin[a]), cfg.bounds.vmax[a]);
  const ProjectionResult pr = project_to_admissible(v, cfg.bounds, cfg.projection);
  if (!pr.converged) return std::numeric_limits<double>::infinity();
  return std::max(pr.box_violation, pr.divergence * cfg.grid.min_spacing());
}

double mass_conservation(const ProblemConfig& cfg) {
  const KernelTable k = build_kernel(cfg.kernel, cfg.grid);
  const StateTrajectory tr = simulate(initial_state(cfg), safe_control(cfg, cfg.seed + 12), k, cfg.potential, cfg.state);
  double worst = 0.0;
  for (double m : tr.mass) worst = std::max(worst, std::abs(m - tr.mass.front()));
  return worst;
}

double energy_dissipation(const ProblemConfig& cfg) {
  const KernelTable k = build_kernel(cfg.kernel, cfg.grid);
  const StateTrajectory tr = simulate(initial_state(cfg), ControlField::zeros(cfg.grid, cfg.state.n_steps, cfg.state.dt),
                                      k, cfg.potential, cfg.state);
  double worst = 0.0;
  for (std::size_t n = 1; n < tr.energy.size(); ++n) worst = std::max(worst, tr.energy[n] - tr.energy[n - 1]);
  return worst;
}

double separation(const ProblemConfig& cfg) {
  const KernelTable k = build_kernel(cfg.kernel, cfg.grid);
  const StateTrajectory tr = simulate(initial_state(cfg), safe_control(cfg, cfg.seed + 13), k, cfg.potential, cfg.state);
  return *std::min_element(tr.separation.begin(), tr.separation.end());
}

double duality(const ProblemConfig& cfg) {
  const ControlProblem problem = build_problem(cfg);
  const ControlField v = safe_control(cfg, cfg.seed + 14);
  const ControlField w = safe_control(cfg, cfg.seed + 15);
  const StateTrajectory tr = simulate(problem.phi0, v, problem.kernel, problem.potential, problem.state);
  const LinearizedTrajectory lin = linearized_solve(tr, v, w, problem.kernel, problem.potential, problem.state);
  const AdjointTrajectory adj = adjoint_solve(tr, v, problem.targets, problem.kernel, problem.potential, problem.state);
  return duality_residual(tr, lin, adj, w, problem.targets).relative;
}

double gradient_fd(const ProblemConfig& cfg) {
  const ControlProblem problem = build_problem(cfg);
  const ControlField v = project_to_admissible(safe_control(cfg, cfg.seed + 16), cfg.bounds, cfg.projection);
  const ControlField w = safe_control(cfg, cfg.seed + 17);
  const GradientEvaluation eval = evaluate_gradient(problem, v);
  const double exact = inner(eval.gradient, w);
  double best = std::numeric_limits<double>::infinity();
  for (double h = 1e-1; h >= 1e-6; h *= 0.1)
    best = std::min(best, std::abs(fd_directional_derivative(problem, v, w, h) - exact) / std::abs(exact));
  return best;
}

double descent(const ProblemConfig& cfg) {
  const ControlProblem problem = build_problem(cfg);
  OptimizerOptions opts = cfg.optimizer;
  opts.max_iter = 4;
  const OptimizationResult res = projected_gradient_descent(initial_control(cfg), problem, opts);
  double worst = 0.0;
  for (std::size_t k = 1; k < res.cost_history.size(); ++k)
    worst = std::max(worst, res.cost_history[k] - res.cost_history[k - 1]);
  return worst;
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& stem)
      : path(std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(::getpid()))) {}
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

double field_io_roundtrip(const ProblemConfig& cfg) {
  const ScalarField f = random_field(cfg.grid, cfg.seed + 18, -1.0, 1.0);
  const TempFile tmp("nlch-verify-field");
  write_field(f, tmp.path);
  const ScalarField g = read_field(tmp.path);
  if (!(g.grid() == f.grid())) return static_cast<double>(f.size());
  double mismatches = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mismatches += std::memcmp(&f.data()[i], &g.data()[i], sizeof(double)) != 0;
  return mismatches;
}

double csv_roundtrip(const ProblemConfig& cfg) {
  Rng rng(cfg.seed + 19);
  Timeseries ts;
  ts.with_cost = true;
  for (int k = 0; k < 20; ++k)
    ts.rows.push_back({k, rng.uniform(), rng.uniform(-1, 1), rng.uniform() * 1e-7, rng.uniform(), rng.uniform() * 1e5,
                       rng.uniform() * 1e-12});
  const Timeseries back = parse_timeseries(format_timeseries(ts));
  if (back.rows.size() != ts.rows.size()) return static_cast<double>(ts.rows.size());
  double mismatches = 0.0;
  for (std::size_t k = 0; k < ts.rows.size(); ++k) {
    const auto& a = ts.rows[k];
    const auto& b = back.rows[k];
    mismatches += (a.step != b.step) + (a.time != b.time) + (a.mass != b.mass) + (a.energy != b.energy) +
                  (a.separation != b.separation) + (a.cost != b.cost) + (a.stationarity != b.stationarity);
  }
  return mismatches;
}

double config_defaults(const ProblemConfig&) {
  const ProblemConfig c = parse_config("[grid]\nn = 8\n[potential]\ntheta = 0.2\n");
  const ProblemConfig d;
  double mismatches = 0.0;
  mismatches += c.state.n_steps != d.state.n_steps;
  mismatches += c.gamma != d.gamma;
  mismatches += c.optimizer.tol != d.optimizer.tol;
  mismatches += c.projection.tol != d.projection.tol;
  mismatches += c.kernel.sigma != 4.0 / 8.0;
  return mismatches;
}

}  // namespace

const std::vector<std::string>& suite_modules() {
  static const std::vector<std::string> modules = {"field-core", "potential", "nonlocal-kernel", "leray",
                                                   "state-solver", "sensitivity", "optimizer", "harness-cli"};
  return modules;
}

const std::vector<Check>& registered_checks() {
  static const std::vector<Check> checks = {
      {"field-core", "gradient-divergence-adjoint", Bound::at_most, 1e-12, adjointness},
      {"field-core", "laplacian-kills-constants", Bound::at_most, 1e-12, laplacian_constants},
      {"field-core", "inverse-laplacian-roundtrip", Bound::at_most, 1e-8, inverse_roundtrip},
      {"potential", "derivative-consistency", Bound::at_most, 1e-6, potential_derivatives},
      {"potential", "second-derivative-lower-bound", Bound::above, -1e-14, potential_convexity},
      {"nonlocal-kernel", "convolution-vs-direct", Bound::at_most, 1e-12, convolution_oracle},
      {"nonlocal-kernel", "energy-vs-direct", Bound::at_most, 1e-12, energy_oracle},
      {"nonlocal-kernel", "convolution-symmetry", Bound::at_most, 1e-12, convolution_symmetry},
      {"leray", "annihilates-gradients", Bound::at_most, 1e-8, leray_gradients},
      {"leray", "idempotent", Bound::at_most, 1e-8, leray_idempotent},
      {"leray", "admissible-projection-feasible", Bound::at_most, 1e-6, dykstra_feasibility},
      {"state-solver", "mass-conservation", Bound::at_most, 1e-11, mass_conservation},
      {"state-solver", "energy-dissipation-no-flow", Bound::at_most, 1e-10, energy_dissipation},
      {"state-solver", "separation-margin", Bound::above, 0.0, separation},
      {"sensitivity", "duality-identity", Bound::at_most, 1e-8, duality},
      {"optimizer", "gradient-vs-fd", Bound::at_most, 1e-6, gradient_fd},
      {"optimizer", "monotone-cost", Bound::at_most, 0.0, descent},
      {"harness-cli", "field-io-roundtrip", Bound::at_most, 0.0, field_io_roundtrip},
      {"harness-cli", "csv-roundtrip", Bound::at_most, 0.0, csv_roundtrip},
      {"harness-cli", "config-defaults", Bound::at_most, 0.0, config_defaults},
  };
  return checks;
}

CheckReport run_check(const Check& check, const ProblemConfig& cfg) {
  CheckReport r;
  r.check = check.module + "/" + check.name;
  r.threshold = check.threshold;
  try {
    r.value = check.measure(cfg);
  } catch (const std::exception& e) {
    r.value = kNaN;
    r.error = e.what();
  }
  r.passed = check.bound == Bound::at_most ? r.value <= r.threshold : r.value > r.threshold;
  return r;
}

std::vector<CheckReport> run_verify(const ProblemConfig& cfg, int threads) {
  const auto& checks = registered_checks();
  std::vector<CheckReport> reports(checks.size());
  parallel_for(static_cast<int>(checks.size()), threads,
               [&](int i) { reports[static_cast<std::size_t>(i)] = run_check(checks[static_cast<std::size_t>(i)], cfg); });
  return reports;
}

}  // namespace nlch
