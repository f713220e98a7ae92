#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nlch/grid.hpp"

namespace nlch {

/// Piecewise-constant scalar on the cells of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0)
      : grid_(grid), data_(grid.size(), value) {}
  ScalarField(const Grid& grid, std::vector<double> data);

  /// Samples f at cell centres; f receives (x, y, z) with unused axes at 0.5.
  static ScalarField sample(const Grid& grid,
                            const std::function<double(double, double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& data() const { return data_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// One ScalarField per axis, all on the same grid.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);
  explicit VectorField(std::vector<ScalarField> components);

  const Grid& grid() const { return comps_.front().grid(); }
  int dim() const { return static_cast<int>(comps_.size()); }
  ScalarField& operator[](int axis) { return comps_[static_cast<std::size_t>(axis)]; }
  const ScalarField& operator[](int axis) const { return comps_[static_cast<std::size_t>(axis)]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& axpy(double a, const VectorField& x);

  /// Largest |component| over all cells.
  double max_abs() const;
  bool all_finite() const;

 private:
  std::vector<ScalarField> comps_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
/// Scalar times vector, pointwise.
VectorField hadamard(const ScalarField& a, const VectorField& v);

/// Cell-volume weighted inner products and norms.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double norm(const ScalarField& a);
double norm(const VectorField& a);

}  // namespace nlch
