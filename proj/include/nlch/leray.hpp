#pragma once

#include <cstdint>
#include <vector>

#include "nlch/control.hpp"
#include "nlch/field.hpp"

namespace nlch {

/// Componentwise box [vmin, vmax]; 0 must be admissible.
struct ControlBounds {
  std::vector<double> vmin;
  std::vector<double> vmax;

  static ControlBounds symmetric(int dim, double bound);
};

void validate(const ControlBounds& b, int dim);

/// Mean-zero psi with laplacian_neumann(psi) = rhs. Rejects rhs with nonzero
/// mean ("incompatible Neumann data").
ScalarField poisson_neumann(const ScalarField& rhs);

/// L2-orthogonal projection onto discretely divergence-free fields:
/// v - grad psi with Lap psi = div v.
VectorField leray_project(const VectorField& v);

struct ProjectionOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

struct ProjectionResult {
  VectorField v;
  int iterations = 0;
  double change = 0.0;         ///< L2 distance between the last two iterates
  double box_violation = 0.0;  ///< max distance to the box
  double divergence = 0.0;     ///< max |div v|
  bool converged = false;
};

/// Metric projection onto {box} cap {div-free} by Dykstra's algorithm.
/// Non-convergence is reported in the result, not thrown.
ProjectionResult project_to_admissible(const VectorField& v, const ControlBounds& bounds,
                                       const ProjectionOptions& opts = {});

/// Slice-wise projection of a time-dependent control (the constraints carry
/// no coupling in time). `worst` receives the least converged slice.
ControlField project_to_admissible(const ControlField& v, const ControlBounds& bounds,
                                   const ProjectionOptions& opts = {},
                                   ProjectionResult* worst = nullptr);

/// Largest distance of any component to the box.
double box_violation(const VectorField& v, const ControlBounds& bounds);

/// Divergence-free test field from a random stream function (2D) or vector
/// potential (3D) supported away from the boundary; max |v| = amplitude.
VectorField random_solenoidal(const Grid& grid, std::uint64_t seed, double amplitude);

}  // namespace nlch
