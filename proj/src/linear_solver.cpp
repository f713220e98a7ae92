#include "nlch/linear_solver.hpp"

#include <cmath>
#include <numeric>

namespace nlch {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void remove_mean(std::span<double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

CgResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> b,
             std::span<double> x, const CgOptions& opts) {
  const std::size_t n = b.size();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);

  std::vector<double> rhs(b.begin(), b.end());
  if (opts.deflate_mean) {
    remove_mean(rhs);
    remove_mean(x);
  }
  const double bnorm = std::sqrt(dot(rhs, rhs));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), z(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  if (opts.deflate_mean) remove_mean(r);
  res.rel_residual = std::sqrt(dot(r, r)) / bnorm;
  if (res.rel_residual <= opts.rel_tol) {
    res.converged = true;
    return res;
  }
  precondition(r, z);
  if (opts.deflate_mean) remove_mean(z);
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;  // breakdown: operator not positive on p
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (opts.deflate_mean) remove_mean(r);
    res.iterations = it;
    res.rel_residual = std::sqrt(dot(r, r)) / bnorm;
    if (res.rel_residual <= opts.rel_tol) {
      res.converged = true;
      break;
    }
    precondition(r, z);
    if (opts.deflate_mean) remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (opts.deflate_mean) remove_mean(x);
  return res;
}

}  // namespace nlch
