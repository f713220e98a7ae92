#include "nlch/harness/problem.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "nlch/error.hpp"
#include "nlch/harness/field_io.hpp"
#include "nlch/random.hpp"

namespace nlch {

namespace {

std::string indexed(const char* stem, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.nlchf", stem, n);
  return buf;
}

}  // namespace

ScalarField initial_state(const ProblemConfig& cfg) {
  switch (cfg.initial.kind) {
    case InitialKind::smooth:
      return smooth_random_field(cfg.grid, cfg.seed, cfg.initial.mean, cfg.initial.amplitude);
    case InitialKind::random:
      return random_field(cfg.grid, cfg.seed, cfg.initial.mean - cfg.initial.amplitude,
                          cfg.initial.mean + cfg.initial.amplitude);
    case InitialKind::file: {
      ScalarField f = read_field(cfg.initial.file);
      if (f.grid() != cfg.grid) throw ConfigError("initial_file grid does not match [grid]");
      return f;
    }
  }
  throw ConfigError("unknown initial datum kind");
}

ControlField initial_control(const ProblemConfig& cfg) {
  if (cfg.control.kind == ControlInitKind::zero)
    return ControlField::zeros(cfg.grid, cfg.state.n_steps, cfg.state.dt);
  const VectorField raw = random_solenoidal(cfg.grid, cfg.seed + 1, cfg.control.amplitude);
  const ProjectionResult pr = project_to_admissible(raw, cfg.bounds, cfg.projection);
  return ControlField::constant(pr.v, cfg.state.n_steps, cfg.state.dt);
}

ControlField reference_control(const ProblemConfig& cfg) {
  const VectorField raw = random_solenoidal(cfg.grid, cfg.targets.reference_seed, cfg.targets.reference_amplitude);
  const ProjectionResult pr = project_to_admissible(raw, cfg.bounds, cfg.projection);
  return ControlField::constant(pr.v, cfg.state.n_steps, cfg.state.dt);
}

TargetSet synthesize_targets(const ProblemConfig& cfg, const KernelTable& kernel) {
  TargetSet t;
  t.phi0 = initial_state(cfg);
  const StateTrajectory ref = simulate(t.phi0, reference_control(cfg), kernel, cfg.potential, cfg.state);
  t.data.phi_Q = ref.phi;
  t.data.phi_Omega = ref.phi.back();
  t.data.gamma = cfg.gamma;
  return t;
}

std::filesystem::path write_targets(const TargetSet& targets, const ProblemConfig& cfg,
                                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "nlch-targets";
  manifest["version"] = 1;
  manifest["n_steps"] = cfg.state.n_steps;
  manifest["dt"] = cfg.state.dt;
  manifest["dim"] = cfg.grid.dim;
  manifest["n"] = std::vector<int>(cfg.grid.n.begin(), cfg.grid.n.begin() + cfg.grid.dim);
  manifest["length"] = std::vector<double>(cfg.grid.length.begin(), cfg.grid.length.begin() + cfg.grid.dim);
  std::vector<std::string> q_files;
  for (std::size_t n = 0; n < targets.data.phi_Q.size(); ++n) {
    q_files.push_back(indexed("phi_Q", static_cast<int>(n)));
    write_field(targets.data.phi_Q[n], dir / q_files.back());
  }
  manifest["phi_Q"] = q_files;
  manifest["phi_Omega"] = "phi_Omega.nlchf";
  write_field(targets.data.phi_Omega, dir / "phi_Omega.nlchf");
  manifest["phi0"] = "phi0.nlchf";
  write_field(targets.phi0, dir / "phi0.nlchf");

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
  return path;
}

TargetSet read_targets(const std::filesystem::path& manifest_path, const ProblemConfig& cfg) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": malformed manifest: " + e.what());
  }
  const auto dir = manifest_path.parent_path();
  TargetSet t;
  try {
    if (m.at("format") != "nlch-targets" || m.at("version") != 1)
      throw IoError(manifest_path.string() + ": not an nlch target manifest");
    for (const auto& name : m.at("phi_Q")) t.data.phi_Q.push_back(read_field(dir / name.get<std::string>()));
    t.data.phi_Omega = read_field(dir / m.at("phi_Omega").get<std::string>());
    t.phi0 = m.contains("phi0") ? read_field(dir / m.at("phi0").get<std::string>()) : initial_state(cfg);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": malformed manifest: " + e.what());
  }
  for (const auto& f : t.data.phi_Q)
    if (f.grid() != cfg.grid) throw ConfigError("target grid does not match [grid]");
  if (t.data.phi_Omega.grid() != cfg.grid || t.phi0.grid() != cfg.grid)
    throw ConfigError("target grid does not match [grid]");
  t.data.gamma = cfg.gamma;
  return t;
}

ControlProblem build_problem(const ProblemConfig& cfg) {
  KernelTable kernel = build_kernel(cfg.kernel, cfg.grid);
  TargetSet targets = cfg.targets.source == TargetSource::files ? read_targets(cfg.targets.manifest, cfg)
                                                                 : synthesize_targets(cfg, kernel);
  validate(targets.data, cfg.state.n_steps);
  ControlProblem problem{std::move(kernel), cfg.potential, cfg.state, std::move(targets.phi0),
                         std::move(targets.data), cfg.bounds, cfg.projection, cfg.grad_check.flip_adjoint_sign};
  return problem;
}

}  // namespace nlch
