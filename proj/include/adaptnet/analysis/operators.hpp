#pragma once

#include <Eigen/Dense>
#include <complex>

#include "adaptnet/errors.hpp"

namespace adaptnet::analysis {

// Energy vector of a stacked vector: entry k is the squared Euclidean norm of
// the k-th length-`block` slice. block == 1 degenerates to entrywise |x_k|^2.
inline Eigen::VectorXd energy(const Eigen::VectorXcd& x, int block) {
  if (block < 1 || x.size() % block != 0)
    throw validation_error("energy: vector length is not a multiple of the block size");
  const int n = static_cast<int>(x.size()) / block;
  Eigen::VectorXd e(n);
  for (int k = 0; k < n; ++k) e(k) = x.segment(k * block, block).squaredNorm();
  return e;
}

inline Eigen::VectorXd energy(const Eigen::VectorXd& x, int block) {
  if (block < 1 || x.size() % block != 0)
    throw validation_error("energy: vector length is not a multiple of the block size");
  const int n = static_cast<int>(x.size()) / block;
  Eigen::VectorXd e(n);
  for (int k = 0; k < n; ++k) e(k) = x.segment(k * block, block).squaredNorm();
  return e;
}

// Norm matrix of a block matrix: entry (r, c) is the spectral norm of the
// (r, c) block. block == 1 degenerates to the entrywise modulus.
inline Eigen::MatrixXd norm_matrix(const Eigen::MatrixXcd& x, int block) {
  if (block < 1 || x.rows() % block != 0 || x.cols() % block != 0)
    throw validation_error("norm matrix: shape is not a multiple of the block size");
  const int rows = static_cast<int>(x.rows()) / block;
  const int cols = static_cast<int>(x.cols()) / block;
  Eigen::MatrixXd m(rows, cols);
  if (block == 1) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = std::abs(x(r, c));
    return m;
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
          x.block(r * block, c * block, block, block));
      m(r, c) = svd.singularValues()(0);
    }
  return m;
}

inline Eigen::MatrixXd norm_matrix(const Eigen::MatrixXd& x, int block) {
  return norm_matrix(Eigen::MatrixXcd(x.cast<std::complex<double>>()), block);
}

}  // namespace adaptnet::analysis
