#pragma once

#include <Eigen/Dense>

#include "adaptnet/analysis/operators.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/network/spectral.hpp"
#include "adaptnet/strategies/state.hpp"

namespace adaptnet::analysis {

// Network coordinates: the weighted centroid plus the stacked residual
// coefficients along the contracting eigen-directions. The residual part is
// complex whenever the residual eigen-basis is.
struct NetworkCoordinates {
  Eigen::VectorXd w_c;       // dim
  Eigen::VectorXcd w_e;      // dim * (n - 1), block j = coefficient of mode j
};

inline NetworkCoordinates transform(const Eigen::MatrixXd& w,
                                    const network::SpectralSplit& split) {
  if (w.cols() != split.n)
    throw validation_error("transform: state width does not match the split");
  const int m = static_cast<int>(w.rows());
  NetworkCoordinates c;
  c.w_c = w * split.theta;
  // Residual block j collects sum_k u_right(j,k) w_k.
  Eigen::MatrixXcd modes =
      w.cast<std::complex<double>>() * split.u_right.transpose();
  c.w_e.resize(m * (split.n - 1));
  for (int j = 0; j < split.n - 1; ++j) c.w_e.segment(j * m, m) = modes.col(j);
  return c;
}

inline Eigen::MatrixXd inverse_transform(const NetworkCoordinates& c,
                                         const network::SpectralSplit& split,
                                         double imag_tol = 1e-8) {
  const int m = static_cast<int>(c.w_c.size());
  Eigen::MatrixXcd modes(m, split.n - 1);
  for (int j = 0; j < split.n - 1; ++j) modes.col(j) = c.w_e.segment(j * m, m);
  Eigen::MatrixXcd rec = modes * split.u_left.transpose();
  rec.colwise() += c.w_c.cast<std::complex<double>>();
  if (rec.imag().cwiseAbs().maxCoeff() > imag_tol)
    throw numeric_error("inverse transform: imaginary residue above tolerance");
  return rec.real();
}

// Error split around the deterministic companion recursion:
//   ref_error     limit point minus companion iterate
//   centroid_gap  network centroid minus companion iterate
//   residual      contracting-mode coefficients
// The stacked agent errors reassemble from these three pieces exactly.
struct ErrorComponents {
  Eigen::VectorXd ref_error;
  Eigen::VectorXd centroid_gap;
  Eigen::VectorXcd residual;
};

inline ErrorComponents error_components(const strategies::NetworkState& st,
                                        const strategies::ReferenceState& ref,
                                        const network::SpectralSplit& split,
                                        const Eigen::VectorXd& w_o) {
  NetworkCoordinates c = transform(st.w, split);
  return ErrorComponents{w_o - ref.w_bar, c.w_c - ref.w_bar, c.w_e};
}

// Agent k's deviation from the limit point, rebuilt from the components:
//   w_o - w_k = ref_error - centroid_gap - sum_j u_left(k,j) residual_j
inline Eigen::MatrixXd reassemble_errors(const ErrorComponents& ec,
                                         const network::SpectralSplit& split) {
  const int m = static_cast<int>(ec.ref_error.size());
  Eigen::MatrixXcd modes(m, split.n - 1);
  for (int j = 0; j < split.n - 1; ++j) modes.col(j) = ec.residual.segment(j * m, m);
  Eigen::MatrixXcd tilde = -(modes * split.u_left.transpose());
  tilde.colwise() += (ec.ref_error - ec.centroid_gap).cast<std::complex<double>>();
  return tilde.real();
}

}  // namespace adaptnet::analysis
