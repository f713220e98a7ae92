#pragma once

#include "nlch/field.hpp"

namespace nlch {

// Finite-difference operators with homogeneous Neumann ghost cells.
//
// The gradient uses central differences with reflected ghosts (f[-1] = f[0],
// f[n] = f[n-1]). The divergence is the exact negative transpose of that
// stencil under the cell-volume inner product, so
//   <grad f, v> + <f, div v> = 0
// holds to rounding for every pair, and sum(div v) = 0 for every v.

/// Central difference along one axis.
ScalarField partial(const ScalarField& f, int axis);
/// Transpose of `partial` (plain matrix transpose; uniform cell weights).
ScalarField partial_transpose(const ScalarField& u, int axis);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// divergence(gradient(f)); symmetric negative semidefinite, kernel = constants.
ScalarField laplacian_neumann(const ScalarField& f);

double mean(const ScalarField& f);
double integral(const ScalarField& f);
ScalarField subtract_mean(const ScalarField& f);

/// Mean-zero psi with -laplacian_neumann(psi) = f. Rejects inputs whose mean
/// exceeds 1e-10 * ||f||; throws SolverError if the Krylov solve stalls.
ScalarField inv_neumann_laplacian(const ScalarField& f);

enum class Reduction { mean, integral, L2, Linf, H1semi, Vstar };

/// Scalar reductions; Vstar is ||grad N f|| and requires a mean-zero input.
double reduce(const ScalarField& f, Reduction kind);

}  // namespace nlch
