#include "nlch/field.hpp"

#include <algorithm>
#include <cmath>

#include "nlch/error.hpp"

namespace nlch {

namespace {
void require_same(const Grid& a, const Grid& b) {
  if (a != b) throw ConfigError("field grid mismatch");
}
}  // namespace

ScalarField::ScalarField(const Grid& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) throw ConfigError("field data length does not match grid");
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(double, double, double)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = grid.unflatten(i);
    std::array<double, 3> x{0.5, 0.5, 0.5};
    for (int a = 0; a < grid.dim; ++a) x[a] = grid.center(a, c[a]);
    out[i] = f(x[0], x[1], x[2]);
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& d : data_) d *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same(grid_, x.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double d) { return std::isfinite(d); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

VectorField::VectorField(const Grid& grid)
    : comps_(static_cast<std::size_t>(grid.dim), ScalarField(grid)) {}

VectorField::VectorField(std::vector<ScalarField> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw ConfigError("vector field needs at least one component");
  if (static_cast<int>(comps_.size()) != comps_.front().grid().dim)
    throw ConfigError("vector field component count must equal grid dimension");
  for (const auto& c : comps_) require_same(c.grid(), comps_.front().grid());
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (int a = 0; a < dim(); ++a) comps_[a] += o[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  for (int a = 0; a < dim(); ++a) comps_[a] -= o[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& x) {
  for (int k = 0; k < dim(); ++k) comps_[k].axpy(a, x[k]);
  return *this;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_)
    for (double d : c.values()) m = std::max(m, std::abs(d));
  return m;
}

bool VectorField::all_finite() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.all_finite(); });
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

VectorField hadamard(const ScalarField& a, const VectorField& v) {
  std::vector<ScalarField> comps;
  for (int k = 0; k < v.dim(); ++k) comps.push_back(hadamard(a, v[k]));
  return VectorField(std::move(comps));
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same(a.grid(), b.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) s += inner(a[k], b[k]);
  return s;
}

double norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }
double norm(const VectorField& a) { return std::sqrt(inner(a, a)); }

}  // namespace nlch
