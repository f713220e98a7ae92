#pragma once

#include "nlch/field.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"

// Brute-force O(N^2) quadratures used as oracles by `nlch verify` and the tests.
namespace nlch::reference {

ScalarField direct_convolve(const KernelSpec& spec, const ScalarField& f);
VectorField direct_grad_convolve(const KernelSpec& spec, const ScalarField& f);

/// -1/2 sum_ij K(x_i - x_j) f_i f_j |cell|^2 + sum_i F(f_i) |cell|, summed pairwise.
double direct_energy(const KernelSpec& spec, const PotentialParams& pot, const ScalarField& f);

}  // namespace nlch::reference
