#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlch/harness/config.hpp"

namespace nlch {

enum class Bound {
  at_most,  ///< pass iff value <= threshold
  above,    ///< pass iff value > threshold
};

struct CheckReport {
  std::string check;  ///< "<module>/<name>"
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string error;  ///< set when the measurement threw
};

struct Check {
  std::string module;
  std::string name;
  Bound bound = Bound::at_most;
  double threshold = 0.0;
  std::function<double(const ProblemConfig&)> measure;
};

/// Module names covered by the verification suite.
const std::vector<std::string>& suite_modules();
const std::vector<Check>& registered_checks();

/// A throwing measurement is reported as a failure with a NaN value.
CheckReport run_check(const Check& check, const ProblemConfig& cfg);
std::vector<CheckReport> run_verify(const ProblemConfig& cfg, int threads = 1);

}  // namespace nlch
