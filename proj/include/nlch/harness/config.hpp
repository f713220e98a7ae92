#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/leray.hpp"
#include "nlch/optimizer.hpp"
#include "nlch/potential.hpp"
#include "nlch/state.hpp"

namespace nlch {

enum class InitialKind { smooth, random, file };
enum class ControlInitKind { zero, random };
enum class TargetSource { synthetic_reference, files };

struct InitialSpec {
  InitialKind kind = InitialKind::smooth;
  double mean = 0.0;
  double amplitude = 0.5;
  std::filesystem::path file;
};

struct ControlInit {
  ControlInitKind kind = ControlInitKind::zero;
  double amplitude = 0.5;
};

struct TargetSpec {
  TargetSource source = TargetSource::synthetic_reference;
  std::filesystem::path manifest;
  double reference_amplitude = 1.0;  ///< max |v| of the synthetic reference control
  std::uint64_t reference_seed = 7;
};

struct GradCheckOptions {
  int directions = 3;
  double threshold = 1e-5;
  bool flip_adjoint_sign = false;
};

/// Fully validated problem description, see README for the key reference.
struct ProblemConfig {
  Grid grid;
  KernelSpec kernel;
  PotentialParams potential;
  StateParams state;
  InitialSpec initial;
  ControlBounds bounds;
  ProjectionOptions projection;
  ControlInit control;
  TargetSpec targets;
  std::array<double, 3> gamma{1.0, 1.0, 1e-4};
  OptimizerOptions optimizer;
  GradCheckOptions grad_check;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "nlch-out";
};

/// Parses an INI document. Relative file paths resolve against `base_dir`.
/// Throws ConfigError naming the offending key.
ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ProblemConfig load_config(const std::filesystem::path& path);

}  // namespace nlch
