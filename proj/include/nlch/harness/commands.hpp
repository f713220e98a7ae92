#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlch/harness/config.hpp"
#include "nlch/optimizer.hpp"

namespace nlch {

struct CommandOptions {
  int threads = 1;
};

struct GradCheckRow {
  int direction = 0;
  double h = 0.0;
  double fd = 0.0;
  double adjoint = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  std::vector<double> min_error;  ///< per direction, over the h-sweep
};

/// Central differences of J_red against <gradient, w> for `directions`
/// random solenoidal directions and steps h = 1e-1 .. 1e-6.
GradCheckReport gradient_check(const ControlProblem& problem, const ControlField& v, int directions,
                               std::uint64_t seed, int threads = 1);

/// One JSON object per line: {"check": ..., "value": ..., "threshold": ...}, plus
/// "message" when given. NaN values serialize as null.
std::string failure_line(const std::string& check, double value, double threshold, const std::string& message = {});

/// Runs simulate, optimize, grad-check, verify or make-targets. Artifacts go
/// below cfg.output_dir; progress goes to `out`; failure reports go to
/// `report` and <output_dir>/failures.jsonl. Returns the process exit status.
int run_command(const std::string& command, const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
                std::ostream& report);

}  // namespace nlch
