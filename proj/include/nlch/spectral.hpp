#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nlch/grid.hpp"

namespace nlch {

/// Exact diagonalisation of laplacian_neumann by the type-II cosine transform.
///
/// The cosine modes cos(m pi x / L) sampled at cell centres are eigenvectors of
/// divergence(gradient(.)) with eigenvalue -sum_a sin^2(pi m_a / n_a) / h_a^2,
/// so shifted systems (c I - beta * Lap) are solved to rounding in O(N log N).
class NeumannSpectral {
 public:
  explicit NeumannSpectral(const Grid& grid);
  ~NeumannSpectral();
  NeumannSpectral(NeumannSpectral&&) noexcept;
  NeumannSpectral& operator=(NeumannSpectral&&) noexcept;

  const Grid& grid() const;

  /// out = (shift * I - beta * Lap)^{-1} in. With shift == 0 the constant mode
  /// is dropped, i.e. the pseudo-inverse on mean-zero data.
  void solve_shifted(double shift, double beta, std::span<const double> in,
                     std::span<double> out) const;

  /// Eigenvalues of -Lap in cosine-coefficient order.
  const std::vector<double>& eigenvalues() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nlch
