#include "nlch/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <string>

#include "fftw_planner.hpp"
#include "nlch/error.hpp"

namespace nlch {

KernelSpec KernelSpec::default_gaussian(const Grid& grid) {
  KernelSpec s;
  s.family = KernelFamily::gaussian;
  s.sigma = 4.0 * grid.min_spacing();
  s.amplitude = 1.0 / std::pow(2.0 * std::numbers::pi * s.sigma * s.sigma, 0.5 * grid.dim);
  return s;
}

KernelSpec KernelSpec::default_newtonian(const Grid& grid) {
  KernelSpec s;
  s.family = KernelFamily::mollified_newtonian;
  s.r0 = 2.0 * grid.min_spacing();
  s.amplitude = 1.0;
  return s;
}

double KernelSpec::value(const std::array<double, 3>& x, int dim) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
  if (family == KernelFamily::gaussian) return amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
  return amplitude / (4.0 * std::numbers::pi * std::max(std::sqrt(r2), r0));
}

std::array<double, 3> KernelSpec::gradient(const std::array<double, 3>& x, int dim) const {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
  if (family == KernelFamily::gaussian) {
    const double k = amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
    for (int a = 0; a < dim; ++a) g[a] = -x[a] / (sigma * sigma) * k;
  } else {
    const double r = std::sqrt(r2);
    if (r > r0) {
      const double c = -amplitude / (4.0 * std::numbers::pi * r2 * r);
      for (int a = 0; a < dim; ++a) g[a] = c * x[a];
    }
  }
  return g;
}

void validate(const KernelSpec& spec) {
  if (!(spec.amplitude >= 0.0)) throw ConfigError("kernel amplitude must be nonnegative");
  if (spec.family == KernelFamily::gaussian && !(spec.sigma > 0.0))
    throw ConfigError("gaussian kernel needs sigma > 0");
  if (spec.family == KernelFamily::mollified_newtonian && !(spec.r0 > 0.0))
    throw ConfigError("newtonian kernel needs r0 > 0");
}

struct KernelTable::Transform {
  std::array<int, 3> dims{1, 1, 1};
  int rank = 2;
  std::size_t real_size = 1;
  std::size_t complex_size = 1;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Transform(const std::array<int, 3>& padded, int dim) : dims(padded), rank(dim) {
    for (int a = 0; a < rank; ++a) real_size *= static_cast<std::size_t>(dims[a]);
    complex_size = real_size / static_cast<std::size_t>(dims[rank - 1]) *
                   static_cast<std::size_t>(dims[rank - 1] / 2 + 1);
    double* r = fftw_alloc_real(real_size);
    fftw_complex* c = fftw_alloc_complex(complex_size);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      r2c = fftw_plan_dft_r2c(rank, dims.data(), r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
      c2r = fftw_plan_dft_c2r(rank, dims.data(), c, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(r);
    fftw_free(c);
    if (!r2c || !c2r) throw ConfigError("FFTW could not plan kernel transform");
  }

  ~Transform() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }

  std::vector<std::complex<double>> forward(std::vector<double> in) const {
    std::vector<std::complex<double>> out(complex_size);
    fftw_execute_dft_r2c(r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  std::vector<double> backward(std::vector<std::complex<double>> in) const {
    std::vector<double> out(real_size);
    fftw_execute_dft_c2r(c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
  }

  std::size_t padded_index(const std::array<int, 3>& pos) const {
    std::size_t idx = 0;
    for (int a = 0; a < rank; ++a) {
      const int m = ((pos[a] % dims[a]) + dims[a]) % dims[a];
      idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(m);
    }
    return idx;
  }
};

std::size_t KernelTable::lattice_index(const std::array<int, 3>& offset) const {
  std::size_t idx = 0;
  for (int a = 0; a < grid_.dim; ++a) {
    const int extent = 2 * grid_.n[a] - 1;
    const int m = offset[a] + grid_.n[a] - 1;
    if (m < 0 || m >= extent) throw ConfigError("kernel offset outside the sampled lattice");
    idx = idx * static_cast<std::size_t>(extent) + static_cast<std::size_t>(m);
  }
  return idx;
}

double KernelTable::sample(const std::array<int, 3>& offset) const {
  return samples_[lattice_index(offset)];
}

double KernelTable::grad_sample(int axis, const std::array<int, 3>& offset) const {
  return grad_samples_[static_cast<std::size_t>(axis)][lattice_index(offset)];
}

KernelTable build_kernel(const KernelSpec& spec, const Grid& grid) {
  validate(spec);
  KernelTable t;
  t.grid_ = grid;
  t.spec_ = spec;
  const int dim = grid.dim;
  for (int a = 0; a < dim; ++a) {
    const int need = 2 * grid.n[a] - 1;
    const int pad = spec.padded_size > 0 ? spec.padded_size : 2 * grid.n[a];
    if (pad < need)
      throw ConfigError("kernel padding insufficient: need " + std::to_string(need) +
                        " points per axis, got " + std::to_string(pad));
    t.padded_[a] = pad;
  }

  std::size_t lattice = 1;
  std::array<int, 3> extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    extent[a] = 2 * grid.n[a] - 1;
    lattice *= static_cast<std::size_t>(extent[a]);
  }
  t.samples_.assign(lattice, 0.0);
  t.grad_samples_.assign(static_cast<std::size_t>(dim), std::vector<double>(lattice, 0.0));

  t.transform_ = std::make_shared<const KernelTable::Transform>(t.padded_, dim);
  const auto& tr = *t.transform_;
  std::vector<double> kpad(tr.real_size, 0.0);
  std::vector<std::vector<double>> gpad(static_cast<std::size_t>(dim), std::vector<double>(tr.real_size, 0.0));

  for (std::size_t idx = 0; idx < lattice; ++idx) {
    std::array<int, 3> off{0, 0, 0};
    std::size_t rest = idx;
    for (int a = dim - 1; a >= 0; --a) {
      off[a] = static_cast<int>(rest % static_cast<std::size_t>(extent[a])) - (grid.n[a] - 1);
      rest /= static_cast<std::size_t>(extent[a]);
    }
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = off[a] * grid.h[a];
    const double k = spec.value(x, dim);
    const auto g = spec.gradient(x, dim);
    t.samples_[idx] = k;
    const std::size_t p = tr.padded_index(off);
    kpad[p] = k;
    for (int a = 0; a < dim; ++a) {
      t.grad_samples_[a][idx] = g[a];
      gpad[a][p] = g[a];
    }
  }

  t.kernel_hat_ = tr.forward(std::move(kpad));
  for (int a = 0; a < dim; ++a) t.grad_hat_.push_back(tr.forward(std::move(gpad[a])));
  return t;
}

ScalarField KernelTable::apply(const std::vector<std::complex<double>>& hat, const ScalarField& f) const {
  if (f.grid() != grid_) throw ConfigError("convolution: field grid does not match kernel grid");
  const auto& tr = *transform_;
  std::vector<double> pad(tr.real_size, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = grid_.unflatten(i);
    pad[tr.padded_index(c)] = f[i];
  }
  auto fhat = tr.forward(std::move(pad));
  for (std::size_t k = 0; k < fhat.size(); ++k) fhat[k] *= hat[k];
  const auto conv = tr.backward(std::move(fhat));
  const double scale = grid_.cell_volume() / static_cast<double>(tr.real_size);
  ScalarField out(grid_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * conv[tr.padded_index(grid_.unflatten(i))];
  return out;
}

ScalarField convolve(const KernelTable& k, const ScalarField& f) { return k.apply(k.kernel_hat_, f); }

VectorField grad_convolve(const KernelTable& k, const ScalarField& f) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < k.grid_.dim; ++a) comps.push_back(k.apply(k.grad_hat_[a], f));
  return VectorField(std::move(comps));
}

}  // namespace nlch
