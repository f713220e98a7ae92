#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nlch {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iter = 0;           ///< 0 selects 10 * problem size
  bool deflate_mean = false;  ///< operator singular on constants; iterate in the mean-zero subspace
};

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator. `x` holds the initial guess on entry. The preconditioner must be
/// symmetric positive definite on the iteration subspace.
CgResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> b,
             std::span<double> x, const CgOptions& opts);

}  // namespace nlch
