#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "adaptnet/errors.hpp"

namespace adaptnet::network {

// Similarity split of the transposed combination matrix:
//
//   product^T = [ones | u_left] * diag(1, residual) * [theta^T ; u_right]
//
// theta is the positive unit-mass fixed vector; the residual block is
// diagonal (defective products are rejected) and strictly inside the unit
// circle; u_right * u_left = I by construction because the right factor is
// the exact inverse of the left one.
struct SpectralSplit {
  int n = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXcd u_left;          // n x (n-1)
  Eigen::MatrixXcd u_right;         // (n-1) x n
  Eigen::VectorXcd residual_eigs;   // sorted by descending magnitude
  double lambda2 = 0.0;             // |residual_eigs(0)|, 0 when n == 1
};

inline SpectralSplit spectral_split(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 1 || a.cols() != n)
    throw validation_error("spectral: matrix must be square");

  SpectralSplit s;
  s.n = n;
  if (n == 1) {
    s.theta = Eigen::VectorXd::Ones(1);
    s.u_left.resize(1, 0);
    s.u_right.resize(0, 1);
    s.residual_eigs.resize(0);
    s.lambda2 = 0.0;
    return s;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(a.transpose());
  if (es.info() != Eigen::Success)
    throw numeric_error("spectral: eigen decomposition failed");
  Eigen::VectorXcd d = es.eigenvalues();
  Eigen::MatrixXcd v = es.eigenvectors();

  int unit = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(d(j) - 1.0) < std::abs(d(unit) - 1.0)) unit = j;
  if (std::abs(d(unit) - 1.0) > 1e-8)
    throw numeric_error("spectral: no unit eigenvalue; matrix is not stochastic");

  std::vector<int> rest;
  for (int j = 0; j < n; ++j)
    if (j != unit) rest.push_back(j);
  std::sort(rest.begin(), rest.end(),
            [&](int x, int y) { return std::abs(d(x)) > std::abs(d(y)); });
  if (std::abs(d(rest.front())) > 1.0 - 1e-8)
    throw numeric_error(
        "spectral: residual eigenvalue within 1e-8 of unit magnitude; "
        "combination matrix is not primitive enough to split");

  Eigen::MatrixXcd u(n, n);
  u.col(0).setOnes();
  for (int j = 0; j < n - 1; ++j) u.col(j + 1) = v.col(rest[j]);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u);
  double smin = svd.singularValues()(n - 1);
  double smax = svd.singularValues()(0);
  if (!(smin > 0) || smax / smin > 1e8)
    throw numeric_error(
        "spectral: eigen-basis condition exceeds 1e8; matrix treated as "
        "defective (no clean diagonal split exists)");

  Eigen::MatrixXcd uinv = u.inverse();

  Eigen::VectorXcd theta_c = uinv.row(0).transpose();
  if (theta_c.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw numeric_error("spectral: fixed vector has a complex residue");
  Eigen::VectorXd theta = theta_c.real();
  double mass = theta.sum();
  theta /= mass;  // exact unit mass; the row of an inverse is only close
  if ((a * theta - theta).cwiseAbs().maxCoeff() > 1e-8)
    throw numeric_error("spectral: fixed-vector residual above 1e-8");
  for (int k = 0; k < n; ++k)
    if (!(theta(k) > 0.0) || !(theta(k) < 1.0))
      throw numeric_error("spectral: fixed vector leaves (0,1); matrix is "
                          "reducible or numerically degenerate");

  s.theta = theta;
  s.u_left = u.rightCols(n - 1);
  s.u_right = uinv.bottomRows(n - 1);
  s.residual_eigs.resize(n - 1);
  for (int j = 0; j < n - 1; ++j) s.residual_eigs(j) = d(rest[j]);
  s.lambda2 = std::abs(s.residual_eigs(0));
  return s;
}

// Rebuilds product^T from the split; the reconstruction error is what the
// tests pin down (1e-8 up to n = 12).
inline Eigen::MatrixXcd reconstruct_transpose(const SpectralSplit& s) {
  const int n = s.n;
  Eigen::MatrixXcd u(n, n);
  u.col(0) = Eigen::VectorXcd::Ones(n);
  if (n > 1) u.rightCols(n - 1) = s.u_left;
  Eigen::VectorXcd diag(n);
  diag(0) = 1.0;
  for (int j = 0; j < n - 1; ++j) diag(j + 1) = s.residual_eigs(j);
  Eigen::MatrixXcd uinv(n, n);
  uinv.row(0) = s.theta.cast<std::complex<double>>().transpose();
  if (n > 1) uinv.bottomRows(n - 1) = s.u_right;
  return u * diag.asDiagonal() * uinv;
}

}  // namespace adaptnet::network
