#pragma once

#include <stdexcept>
#include <string>

namespace nlch {

/// Invalid input or configuration (bad grid, out-of-range parameter, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation of the logarithmic potential at or beyond the pure phases.
class SingularEvaluation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A linear or nonlinear solve that did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed or unreadable artifact file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlch
