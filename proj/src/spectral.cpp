#include "nlch/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "fftw_planner.hpp"
#include "nlch/error.hpp"

namespace nlch {

struct NeumannSpectral::Impl {
  Grid grid;
  std::vector<double> lambda;  // eigenvalues of -Lap
  double normalisation = 1.0;  // REDFT01(REDFT10(x)) = normalisation * x
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(const Grid& g) : grid(g), lambda(g.size(), 0.0) {
    const int rank = g.dim;
    int dims[3];
    fftw_r2r_kind fk[3];
    fftw_r2r_kind bk[3];
    for (int a = 0; a < rank; ++a) {
      dims[a] = g.n[a];
      fk[a] = FFTW_REDFT10;
      bk[a] = FFTW_REDFT01;
      normalisation *= 2.0 * g.n[a];
    }
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const auto m = g.unflatten(i);
      double s = 0.0;
      for (int a = 0; a < rank; ++a) {
        const double t = std::sin(std::numbers::pi * m[a] / g.n[a]) / g.h[a];
        s += t * t;
      }
      lambda[i] = s;
    }
    std::vector<double> a(g.size()), b(g.size());
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward = fftw_plan_r2r(rank, dims, a.data(), b.data(), fk, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_r2r(rank, dims, a.data(), b.data(), bk, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward || !backward) throw ConfigError("FFTW could not plan cosine transform");
  }

  ~Impl() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

NeumannSpectral::NeumannSpectral(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
NeumannSpectral::~NeumannSpectral() = default;
NeumannSpectral::NeumannSpectral(NeumannSpectral&&) noexcept = default;
NeumannSpectral& NeumannSpectral::operator=(NeumannSpectral&&) noexcept = default;

const Grid& NeumannSpectral::grid() const { return impl_->grid; }
const std::vector<double>& NeumannSpectral::eigenvalues() const { return impl_->lambda; }

void NeumannSpectral::solve_shifted(double shift, double beta, std::span<const double> in,
                                    std::span<double> out) const {
  const std::size_t n = impl_->lambda.size();
  std::vector<double> a(in.begin(), in.end());
  std::vector<double> b(n);
  fftw_execute_r2r(impl_->forward, a.data(), b.data());
  for (std::size_t k = 0; k < n; ++k) {
    const double d = shift + beta * impl_->lambda[k];
    b[k] = d == 0.0 ? 0.0 : b[k] / (d * impl_->normalisation);
  }
  fftw_execute_r2r(impl_->backward, b.data(), out.data());
}

}  // namespace nlch
