#pragma once

#include <cstddef>

#include "nlch/field.hpp"

namespace nlch {

/// Convex logarithmic entropy
///   F(s) = (theta/2) [(1+s) ln(1+s) + (1-s) ln(1-s)],  s in (-1, 1),
/// with F(0) = F'(0) = 0 and F''(s) = theta / (1 - s^2) >= theta.
struct PotentialParams {
  double theta = 0.2;
  double guard = 1e-9;  ///< minimum distance to +-1 used by clip_to_domain

  double alpha() const { return theta; }  ///< lower bound of F''
};

void validate(const PotentialParams& p);

/// F and its first three derivatives. Throws SingularEvaluation for |s| >= 1
/// or non-finite s; order must be 0..3.
double potential_eval(const PotentialParams& p, double s, int order);
ScalarField potential_eval(const PotentialParams& p, const ScalarField& f, int order);

struct ClipResult {
  ScalarField field;
  std::size_t clipped = 0;
};

/// Maps values into [-1 + guard, 1 - guard] and counts the cells that moved.
ClipResult clip_to_domain(const ScalarField& f, double guard);

}  // namespace nlch
