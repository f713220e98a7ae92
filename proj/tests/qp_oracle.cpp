#include "qp_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace nlch::test {

namespace {

// Central-difference gradient with reflected ghosts along one axis, as a
// dense matrix; the divergence is minus its transpose.
Eigen::MatrixXd gradient_matrix(const Grid& g, int axis) {
  const auto N = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    auto idx = g.unflatten(static_cast<std::size_t>(k));
    const int i = idx[axis];
    auto at = [&](int j) {
      auto m = idx;
      m[axis] = std::clamp(j, 0, g.n[axis] - 1);
      Eigen::Index flat = 0;
      for (int a = 0; a < g.dim; ++a) flat = flat * g.n[a] + m[a];
      return flat;
    };
    G(k, at(i + 1)) += 0.5 / g.h[axis];
    G(k, at(i - 1)) -= 0.5 / g.h[axis];
  }
  return G;
}

}  // namespace

QpSolution project_qp(const std::vector<VectorField>& y, const ControlBounds& bounds) {
  const Grid& g = y.front().grid();
  const auto N = static_cast<Eigen::Index>(g.size());
  const int d = g.dim;
  const auto S = static_cast<Eigen::Index>(y.size());
  const Eigen::Index n_var = S * d * N;

  // Slice-block constraint matrix: rows (slice, cell), columns (slice, axis, cell).
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(S * N, n_var);
  for (int a = 0; a < d; ++a) {
    const Eigen::MatrixXd Ga = gradient_matrix(g, a);
    for (Eigen::Index s = 0; s < S; ++s) D.block(s * N, (s * d + a) * N, N, N) = -Ga.transpose();
  }
  // Constant fields per slice are in the left null space of D; drop one row per slice.
  Eigen::MatrixXd A(S * (N - 1), n_var);
  for (Eigen::Index s = 0; s < S; ++s) A.block(s * (N - 1), 0, N - 1, n_var) = D.block(s * N, 0, N - 1, n_var);

  Eigen::VectorXd yv(n_var), lo(n_var), hi(n_var);
  for (Eigen::Index s = 0; s < S; ++s)
    for (int a = 0; a < d; ++a)
      for (Eigen::Index k = 0; k < N; ++k) {
        const Eigen::Index j = (s * d + a) * N + k;
        yv(j) = y[static_cast<std::size_t>(s)][a][static_cast<std::size_t>(k)];
        lo(j) = bounds.vmin[static_cast<std::size_t>(a)];
        hi(j) = bounds.vmax[static_cast<std::size_t>(a)];
      }

  // Dual: x(l) = clip(y - A^T l) maximizes the concave dual
  //   q(l) = 1/2 |x(l) - y|^2 + l^T A x(l),  grad q = A x(l).
  // Semismooth Newton with generalized Hessian -A P A^T, P = diag(inactive),
  // globalized by Armijo backtracking on q.
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(A.rows());
  auto primal = [&](const Eigen::VectorXd& l) {
    Eigen::VectorXd x = yv - A.transpose() * l;
    return Eigen::VectorXd(x.cwiseMax(lo).cwiseMin(hi));
  };
  auto dual = [&](const Eigen::VectorXd& l) {
    const Eigen::VectorXd x = primal(l);
    return 0.5 * (x - yv).squaredNorm() + l.dot(A * x);
  };
  const double reg = 1e-12 * (A * A.transpose()).diagonal().maxCoeff();
  QpSolution out;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd z = yv - A.transpose() * lam;
    const Eigen::VectorXd x = z.cwiseMax(lo).cwiseMin(hi);
    const Eigen::VectorXd r = A * x;
    out.iterations = it;
    out.kkt_residual = r.norm();
    if (r.norm() <= 1e-12 * std::max(1.0, yv.norm())) break;
    Eigen::VectorXd inactive(n_var);
    for (Eigen::Index j = 0; j < n_var; ++j) inactive(j) = (z(j) > lo(j) && z(j) < hi(j)) ? 1.0 : 0.0;
    const Eigen::MatrixXd H =
        A * inactive.asDiagonal() * A.transpose() + reg * Eigen::MatrixXd::Identity(A.rows(), A.rows());
    const Eigen::VectorXd step = H.ldlt().solve(r);
    const double q0 = dual(lam);
    const double slope = r.dot(step);
    double t = 1.0;
    while (t > 1e-12 && dual(lam + t * step) < q0 + 1e-4 * t * slope) t *= 0.5;
    lam += t * step;
  }
  if (out.kkt_residual > 1e-9 * std::max(1.0, yv.norm())) throw std::runtime_error("QP oracle did not converge");

  const Eigen::VectorXd x = primal(lam);
  for (Eigen::Index s = 0; s < S; ++s) {
    VectorField v(g);
    for (int a = 0; a < d; ++a)
      for (Eigen::Index k = 0; k < N; ++k) v[a][static_cast<std::size_t>(k)] = x((s * d + a) * N + k);
    out.v.push_back(std::move(v));
  }
  return out;
}

}  // namespace nlch::test
