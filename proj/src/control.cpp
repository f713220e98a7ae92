#include "nlch/control.hpp"

#include <algorithm>
#include <cmath>

#include "nlch/error.hpp"

namespace nlch {

namespace {
void require_layout(const ControlField& a, const ControlField& b) {
  if (a.slices.size() != b.slices.size()) throw ConfigError("control fields have different slice counts");
}
}  // namespace

ControlField ControlField::zeros(const Grid& grid, int n_steps, double dt) {
  ControlField c;
  c.dt = dt;
  c.slices.assign(static_cast<std::size_t>(n_steps), VectorField(grid));
  return c;
}

ControlField ControlField::constant(const VectorField& v, int n_steps, double dt) {
  ControlField c;
  c.dt = dt;
  c.slices.assign(static_cast<std::size_t>(n_steps), v);
  return c;
}

ControlField& ControlField::operator+=(const ControlField& o) {
  require_layout(*this, o);
  for (std::size_t n = 0; n < slices.size(); ++n) slices[n] += o.slices[n];
  return *this;
}

ControlField& ControlField::operator-=(const ControlField& o) {
  require_layout(*this, o);
  for (std::size_t n = 0; n < slices.size(); ++n) slices[n] -= o.slices[n];
  return *this;
}

ControlField& ControlField::operator*=(double s) {
  for (auto& v : slices) v *= s;
  return *this;
}

ControlField& ControlField::axpy(double a, const ControlField& x) {
  require_layout(*this, x);
  for (std::size_t n = 0; n < slices.size(); ++n) slices[n].axpy(a, x.slices[n]);
  return *this;
}

double ControlField::max_abs() const {
  double m = 0.0;
  for (const auto& v : slices) m = std::max(m, v.max_abs());
  return m;
}

ControlField operator+(ControlField a, const ControlField& b) { return a += b; }
ControlField operator-(ControlField a, const ControlField& b) { return a -= b; }
ControlField operator*(double s, ControlField a) { return a *= s; }

double inner(const ControlField& a, const ControlField& b) {
  require_layout(a, b);
  double s = 0.0;
  for (std::size_t n = 0; n < a.slices.size(); ++n) s += inner(a.slices[n], b.slices[n]);
  return a.dt * s;
}

double norm(const ControlField& a) { return std::sqrt(inner(a, a)); }

}  // namespace nlch
