#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "nlch/field.hpp"

namespace nlch {

enum class KernelFamily { gaussian, mollified_newtonian };

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 0.0;      ///< Gaussian width
  double r0 = 0.0;         ///< Newtonian cap radius
  double amplitude = 1.0;
  int padded_size = 0;     ///< FFT length per axis; 0 picks 2n

  /// Gaussian with sigma = 4h and unit integral over R^d.
  static KernelSpec default_gaussian(const Grid& grid);
  /// Mollified Newtonian profile with r0 = 2h and unit amplitude.
  static KernelSpec default_newtonian(const Grid& grid);

  double value(const std::array<double, 3>& x, int dim) const;
  std::array<double, 3> gradient(const std::array<double, 3>& x, int dim) const;
};

void validate(const KernelSpec& spec);

/// Kernel sampled on every lattice offset x_i - x_j of a grid, with cached
/// transforms for zero-padded (non-periodic) convolution over the domain.
/// Immutable after construction; concurrent convolutions are safe.
class KernelTable {
 public:
  const Grid& grid() const { return grid_; }
  const KernelSpec& spec() const { return spec_; }

  /// Offsets run over -(n_a - 1) .. (n_a - 1) on each axis.
  double sample(const std::array<int, 3>& offset) const;
  double grad_sample(int axis, const std::array<int, 3>& offset) const;
  int padded_size(int axis) const { return padded_[axis]; }

 private:
  friend KernelTable build_kernel(const KernelSpec& spec, const Grid& grid);
  friend ScalarField convolve(const KernelTable& k, const ScalarField& f);
  friend VectorField grad_convolve(const KernelTable& k, const ScalarField& f);

  struct Transform;
  std::size_t lattice_index(const std::array<int, 3>& offset) const;
  ScalarField apply(const std::vector<std::complex<double>>& hat, const ScalarField& f) const;

  Grid grid_;
  KernelSpec spec_;
  std::array<int, 3> padded_{1, 1, 1};
  std::vector<double> samples_;
  std::vector<std::vector<double>> grad_samples_;
  std::shared_ptr<const Transform> transform_;
  std::vector<std::complex<double>> kernel_hat_;
  std::vector<std::vector<std::complex<double>>> grad_hat_;
};

/// Throws ConfigError when the padded length cannot hold all offsets.
KernelTable build_kernel(const KernelSpec& spec, const Grid& grid);

/// (K * f)(x_i) = sum_j K(x_i - x_j) f_j |cell|, f extended by zero outside the box.
ScalarField convolve(const KernelTable& k, const ScalarField& f);

/// Same with the analytic kernel gradient.
VectorField grad_convolve(const KernelTable& k, const ScalarField& f);

}  // namespace nlch
