#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace nlch {

/// Uniform cell-centred grid on the box [0, length_0] x ... (2 or 3 axes).
/// Data is stored row-major with axis 0 slowest.
struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  std::array<double, 3> h{1.0, 1.0, 1.0};

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  double cell_volume() const { return h[0] * h[1] * h[2]; }
  double volume() const { return length[0] * length[1] * length[2]; }
  double min_spacing() const;

  /// Distance in flat index between neighbours along `axis`.
  std::size_t stride(int axis) const;

  /// Cell-centre coordinate along `axis` for cell index i.
  double center(int axis, int i) const { return (i + 0.5) * h[axis]; }

  /// Multi-index of a flat index.
  std::array<int, 3> unflatten(std::size_t idx) const;

  bool operator==(const Grid& o) const { return dim == o.dim && n == o.n && length == o.length; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Throws ConfigError for dim outside {2,3}, fewer than 4 cells per axis or
/// non-positive lengths.
Grid make_grid(int dim, const std::vector<int>& n, const std::vector<double>& length);

}  // namespace nlch
