#pragma once

#include <filesystem>

#include "nlch/harness/config.hpp"
#include "nlch/optimizer.hpp"

namespace nlch {

ScalarField initial_state(const ProblemConfig& cfg);

/// Starting control: zero, or a projected random solenoidal field held constant in time.
ControlField initial_control(const ProblemConfig& cfg);

/// The configured v_dagger used to synthesize targets.
ControlField reference_control(const ProblemConfig& cfg);

struct TargetSet {
  TargetData data;
  ScalarField phi0;  ///< initial datum of the run that produced the targets
};

/// Simulates with the reference control and tracks every slice of the result.
TargetSet synthesize_targets(const ProblemConfig& cfg, const KernelTable& kernel);

/// Writes one field file per time index plus manifest.json; returns the manifest path.
std::filesystem::path write_targets(const TargetSet& targets, const ProblemConfig& cfg,
                                    const std::filesystem::path& dir);
TargetSet read_targets(const std::filesystem::path& manifest, const ProblemConfig& cfg);

/// Targets per [targets] source, with the initial datum the targets belong to.
ControlProblem build_problem(const ProblemConfig& cfg);

}  // namespace nlch
