#pragma once

#include <vector>

#include "nlch/field.hpp"

namespace nlch {

/// Velocity control, piecewise constant in time: slice n acts on (t_n, t_{n+1}).
struct ControlField {
  double dt = 1.0;
  std::vector<VectorField> slices;

  static ControlField zeros(const Grid& grid, int n_steps, double dt);
  /// Same field on every slice.
  static ControlField constant(const VectorField& v, int n_steps, double dt);

  int n_steps() const { return static_cast<int>(slices.size()); }
  const Grid& grid() const { return slices.front().grid(); }

  ControlField& operator+=(const ControlField& o);
  ControlField& operator-=(const ControlField& o);
  ControlField& operator*=(double s);
  ControlField& axpy(double a, const ControlField& x);
  double max_abs() const;
};

ControlField operator+(ControlField a, const ControlField& b);
ControlField operator-(ControlField a, const ControlField& b);
ControlField operator*(double s, ControlField a);

/// L2(Q) inner product sum_n dt <a_n, b_n>.
double inner(const ControlField& a, const ControlField& b);
double norm(const ControlField& a);

}  // namespace nlch
