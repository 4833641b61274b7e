#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "illumkit/rng.hpp"

// Brute-force primal minimizers used as independent references for the
// dual solvers.
namespace oracle {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;
using illumkit::Rng;

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1,
                       double hi = 1) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Primal objective 1/2 ||W||^2 + C sum_i loss(||y_i - phi_i W - b||), with
// loss(u) = max(0, u - eps)^2 (eps = 0 gives the ridge loss).
inline double primal_objective(const MatrixXd& Phi, const MatrixXd& Y,
                        const MatrixXd& W, const RowVectorXd& b, double C,
                        double eps) {
  double loss = 0;
  for (Eigen::Index i = 0; i < Phi.rows(); ++i) {
    const double u = (Y.row(i) - Phi.row(i) * W - b).norm();
    if (u > eps) loss += (u - eps) * (u - eps);
  }
  return 0.5 * W.squaredNorm() + C * loss;
}

// Exact cyclic coordinate descent on the (quadratic) ridge primal.
inline double ridge_primal_cd(const MatrixXd& Phi, const MatrixXd& Y, double C) {
  const Eigen::Index d = Phi.cols(), m = Y.cols(), n = Phi.rows();
  MatrixXd W = MatrixXd::Zero(d, m);
  RowVectorXd b = RowVectorXd::Zero(m);
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double biggest = 0;
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index k = 0; k < d; ++k) {
        // d/dw: w - 2C sum_i phi_ik r_ic;  d2/dw2: 1 + 2C sum_i phi_ik^2
        const VectorXd r = Y.col(c) - Phi * W.col(c) - VectorXd::Constant(n, b(c));
        const double g = W(k, c) - 2 * C * Phi.col(k).dot(r);
        const double h = 1 + 2 * C * Phi.col(k).squaredNorm();
        W(k, c) -= g / h;
        biggest = std::max(biggest, std::abs(g / h));
      }
      const VectorXd r = Y.col(c) - Phi * W.col(c) - VectorXd::Constant(n, b(c));
      const double step = r.sum() / double(n);
      b(c) += step;
      biggest = std::max(biggest, std::abs(step));
    }
    if (biggest < 1e-15) break;
  }
  return primal_objective(Phi, Y, W, b, C, 0.0);
}

// Gradient descent with Armijo backtracking on the tube primal, started from
// several random points; returns the best objective found.
inline double tube_primal_gd(const MatrixXd& Phi, const MatrixXd& Y, double C,
                      double eps, Rng& rng, int restarts = 4) {
  const Eigen::Index d = Phi.cols(), m = Y.cols();
  double best = INFINITY;
  for (int r = 0; r < restarts; ++r) {
    MatrixXd W = r == 0 ? MatrixXd::Zero(d, m) : random_matrix(d, m, rng);
    RowVectorXd b = r == 0 ? RowVectorXd(Y.colwise().mean())
                           : RowVectorXd(random_matrix(1, m, rng));
    double f = primal_objective(Phi, Y, W, b, C, eps);
    double t = 1.0;
    for (int it = 0; it < 200000; ++it) {
      MatrixXd gW = W;
      RowVectorXd gb = RowVectorXd::Zero(m);
      for (Eigen::Index i = 0; i < Phi.rows(); ++i) {
        const RowVectorXd res = Y.row(i) - Phi.row(i) * W - b;
        const double u = res.norm();
        if (u <= eps) continue;
        const RowVectorXd g = -2 * C * (u - eps) / u * res;
        gW += Phi.row(i).transpose() * g;
        gb += g;
      }
      const double gn2 = gW.squaredNorm() + gb.squaredNorm();
      if (gn2 < 1e-26) break;
      t = std::min(1.0, t * 2);
      while (true) {
        const MatrixXd W2 = W - t * gW;
        const RowVectorXd b2 = b - t * gb;
        const double f2 = primal_objective(Phi, Y, W2, b2, C, eps);
        if (f2 <= f - 0.5 * t * gn2) {
          W = W2;
          b = b2;
          f = f2;
          break;
        }
        t *= 0.5;
        if (t < 1e-20) break;
      }
      if (t < 1e-20) break;
    }
    best = std::min(best, f);
  }
  return best;
}

// Explicit feature map of a PSD Gram matrix: K = Phi Phi'.
inline MatrixXd feature_map(const MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
  const VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

}  // namespace oracle
