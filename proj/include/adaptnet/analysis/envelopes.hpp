#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "adaptnet/analysis/theory.hpp"
#include "adaptnet/errors.hpp"

namespace adaptnet::analysis {

// Mean-energy envelopes over a horizon: row/entry i bounds the expected
// centroid-gap energy and the expected residual mode energies at iteration i.
// Asymptotically-vanishing remainder terms of the underlying statements are
// dropped, which is why downstream comparisons carry explicit slack.
struct BoundEnvelopes {
  Eigen::VectorXd bound_wc;       // horizon + 1
  Eigen::MatrixXd bound_we;       // (horizon + 1) x (n - 1)
  Eigen::VectorXd bound_we_sum;   // row sums of bound_we
  double floor_wc = 0.0;          // steady-state part of bound_wc
  Eigen::VectorXd floor_we;       // steady-state part of bound_we
  double floor_we_sum = 0.0;
};

inline BoundEnvelopes bound_envelopes(const TheoryBundle& b,
                                      const Eigen::VectorXd& w_e0_energy,
                                      long horizon) {
  if (horizon < 0) throw validation_error("envelopes: negative horizon");
  const int r = b.n - 1;
  if (w_e0_energy.size() != r)
    throw validation_error("envelopes: initial residual energy has wrong length");
  if ((w_e0_energy.array() < 0).any())
    throw validation_error("envelopes: negative initial energy");
  if (!(b.rho_gamma < 1.0))
    throw validation_error(
        "envelopes: comparison matrix is unstable at this step-size; "
        "no finite envelope exists");

  const double mu = b.mu_max;
  const double ll = b.lambda_l;
  BoundEnvelopes env;
  env.bound_wc.resize(horizon + 1);
  env.bound_we.resize(horizon + 1, r);
  env.bound_we_sum.resize(horizon + 1);

  // S = ones^T (I - gamma_e)^{-1} w_e0 drives both steady floors; the shifted
  // blocks are bidiagonal, so plain triangular solves do all the inversions.
  Eigen::MatrixXd i_minus_ge;
  Eigen::VectorXd resolvent_ones;
  double s0 = 0.0;
  if (r > 0) {
    i_minus_ge = Eigen::MatrixXd::Identity(r, r) - b.gamma_e;
    resolvent_ones = i_minus_ge.triangularView<Eigen::Upper>().solve(
        Eigen::VectorXd::Ones(r));
    Eigen::MatrixXd lower = i_minus_ge.transpose();
    Eigen::VectorXd tmp =
        lower.triangularView<Eigen::Lower>().solve(Eigen::VectorXd::Ones(r));
    s0 = tmp.dot(w_e0_energy);
  }

  const double drive = b.psi0 * (ll + b.h_c_0) * s0;
  env.floor_wc = mu * (drive + b.b_vc * ll) / (ll * ll);
  if (r > 0) {
    env.floor_we = (mu * mu * (drive + b.b_ve * ll) / ll) * resolvent_ones;
    env.floor_we_sum = env.floor_we.sum();
  }

  // Transient centroid term: mu h_c ones^T (g I - gamma_e)^{-1} (g^i I -
  // gamma_e^i) w_e0 with g nudged off the residual eigenvalue when they
  // collide, so the resolvent stays well-defined.
  double g = b.gamma_c;
  if (r > 0 && std::abs(g - b.lambda2) < 1e-12) g += 1e-9;
  Eigen::VectorXd rvec;
  if (r > 0) {
    Eigen::MatrixXd shifted =
        (g * Eigen::MatrixXd::Identity(r, r) - b.gamma_e).transpose();
    rvec = shifted.triangularView<Eigen::Lower>().solve(Eigen::VectorXd::Ones(r));
  }
  const double r_dot_w0 = r > 0 ? rvec.dot(w_e0_energy) : 0.0;

  Eigen::VectorXd q = w_e0_energy;  // gamma_e^i w_e0, by repeated multiplication
  double gpow = 1.0;
  for (long i = 0; i <= horizon; ++i) {
    double transient = r > 0 ? gpow * r_dot_w0 - rvec.dot(q) : 0.0;
    env.bound_wc(i) = mu * b.h_c_mu * std::max(0.0, transient) + env.floor_wc;
    if (r > 0) {
      env.bound_we.row(i) = (q + env.floor_we).transpose();
      env.bound_we_sum(i) = env.bound_we.row(i).sum();
    } else {
      env.bound_we_sum(i) = 0.0;
    }
    if (i < horizon) {
      if (r > 0) q = (b.gamma_e * q).cwiseMin(1e300);
      gpow *= g;
    }
  }
  return env;
}

}  // namespace adaptnet::analysis
