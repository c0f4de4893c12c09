#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>

#include "adaptnet/analysis/operators.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/models/regularity.hpp"
#include "adaptnet/network/combine.hpp"
#include "adaptnet/network/spectral.hpp"
#include "adaptnet/network/stepsize.hpp"

namespace adaptnet::analysis {

// Everything the bound machinery and the phase predictions need, computed
// once per (network, model, step-size) triple. No simulation happens here.
struct TheoryBundle {
  int n = 0;
  int m = 0;
  double mu_max = 0.0;
  double p_l1 = 0.0;
  double lambda2 = 0.0;
  double lambda_l = 0.0;
  double lambda_u = 0.0;
  double alpha = 0.0;
  double sigma_v2 = 0.0;

  double gamma_c = 0.0;        // centroid contraction modulus
  Eigen::MatrixXd gamma_e;     // residual comparison block, (n-1)^2
  double psi0 = 0.0;           // coupling constant of the full comparison matrix
  double h_c_mu = 0.0;         // residual-to-centroid leak at this step-size
  double h_c_0 = 0.0;          // same leak at vanishing step-size
  double b_vc = 0.0;           // centroid noise floor driver
  double b_ve = 0.0;           // residual noise floor driver
  Eigen::MatrixXd gamma0;      // decoupled comparison matrix, n^2
  Eigen::MatrixXd gamma;      // full comparison matrix gamma0 + mu^2 psi0 ones
  double rho_gamma = 0.0;
  bool gamma_stable = false;   // rho(gamma) < 1, decided in exact-margin form

  Eigen::VectorXd g_o;         // energies of the exact updates at the limit point
  double g_o_max = 0.0;

  double rate_phase1 = 0.0;    // |lambda2|: envelope decay of the residual energy
  double rate_phase2 = 0.0;    // squared spectral radius of (I - mu_max h_c)
  double rate_correction = 0.0;  // (mu_max * rate_epsilon)^(1/(2(m-1))), 0 if m == 1
  double rate_epsilon = 1e-3;
  double ref_rate_lb = 0.0;    // 1 - 2 mu_max ||p||_1 lambda_u
  double ref_rate_ub = 0.0;    // gamma_c^2

  double mu_stab = 0.0;        // sufficient step-size bound for rho(gamma) < 1

  double norm_first_stage = 0.0;  // inf-norm of |a1^T u_left|
  double norm_last_stage = 0.0;   // inf-norm of |u_right a2^T|
  double w_tilde_c0 = 0.0;        // distance limit point <-> initial centroid
  double w_o_norm = 0.0;
  Eigen::VectorXd u_row_norms;    // per-agent 2-norm of the u_left row
};

namespace detail {

inline double inf_norm(const Eigen::MatrixXcd& x) {
  if (x.rows() == 0 || x.cols() == 0) return 0.0;
  return x.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double spectral_radius(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(x, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

inline double gamma_c_value(double mu_max, double lambda_l, double lambda_u,
                            double p_l1) {
  return 1.0 - mu_max * lambda_l +
         0.5 * mu_max * mu_max * p_l1 * p_l1 * lambda_u * lambda_u;
}

// Leak coefficient from residual energy into the centroid recursion. The
// denominator changes sign exactly where the centroid contraction argument
// breaks down, hence the hard error instead of a clamped value.
inline double h_c_value(double mu_max, double lambda_l, double lambda_u,
                        double p_l1, double norm_first_stage) {
  double denom = lambda_l - 0.5 * mu_max * p_l1 * p_l1 * lambda_u * lambda_u;
  if (!(denom > 0))
    throw validation_error("step-size too large for bound validity");
  return p_l1 * p_l1 * norm_first_stage * norm_first_stage * lambda_u * lambda_u /
         denom;
}

inline Eigen::MatrixXd residual_comparison_block(int n, double lambda2) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    g(j, j) = lambda2;
    if (j + 1 < n - 1) g(j, j + 1) = 2.0 / (1.0 - lambda2);
  }
  return g;
}

inline TheoryBundle theory_bundle(const network::SpectralSplit& split,
                                  const network::CombinationMatrices& mats,
                                  const network::StepSizeProfile& steps,
                                  const Eigen::VectorXd& p,
                                  const models::RegularityConstants& consts,
                                  const models::AgentModel& model,
                                  const Eigen::VectorXd& w_o,
                                  const Eigen::VectorXd& w_c0,
                                  double rate_epsilon = 1e-3) {
  const int n = split.n;
  const int m = model.dim;
  if (p.size() != n || model.n_agents() != n)
    throw validation_error("bundle: agent counts disagree");
  if (w_o.size() != m || w_c0.size() != m)
    throw validation_error("bundle: parameter dimensions disagree");

  TheoryBundle b;
  b.n = n;
  b.m = m;
  b.mu_max = steps.mu_max;
  b.p_l1 = p.cwiseAbs().sum();
  b.lambda2 = split.lambda2;
  b.rate_epsilon = rate_epsilon;

  const double lu = consts.lambda_u;
  const double ll = consts.lambda_l;
  const double mu = steps.mu_max;
  const double one_minus_l2 = 1.0 - b.lambda2;
  b.lambda_l = ll;
  b.lambda_u = lu;
  b.alpha = consts.alpha;
  b.sigma_v2 = consts.sigma_v2;

  b.gamma_c = gamma_c_value(mu, ll, lu, b.p_l1);

  using C = std::complex<double>;
  b.norm_first_stage =
      detail::inf_norm(mats.a1.transpose().cast<C>() * split.u_left);
  b.norm_last_stage =
      detail::inf_norm(split.u_right * mats.a2.transpose().cast<C>());

  b.h_c_mu = h_c_value(mu, ll, lu, b.p_l1, b.norm_first_stage);
  b.h_c_0 = h_c_value(0.0, ll, lu, b.p_l1, b.norm_first_stage);

  const double n1sq = b.norm_first_stage * b.norm_first_stage;
  const double n2sq = b.norm_last_stage * b.norm_last_stage;
  const double alpha = consts.alpha;
  double t1 = 4.0 * alpha * b.p_l1 * b.p_l1;
  double t2 = t1 * n1sq;
  double t3 = 4.0 * n * n2sq * (3.0 * lu * lu / one_minus_l2 + alpha);
  double t4 = 4.0 * n * n2sq * n1sq * (lu * lu / one_minus_l2 + alpha);
  b.psi0 = std::max(std::max(t1, t2), std::max(t3, t4));

  b.gamma_e = residual_comparison_block(n, b.lambda2);

  b.w_tilde_c0 = (w_o - w_c0).norm();
  b.w_o_norm = w_o.norm();
  b.g_o.resize(n);
  for (int k = 0; k < n; ++k)
    b.g_o(k) = models::true_update(model, k, w_o).squaredNorm();
  b.g_o_max = b.g_o.maxCoeff();

  const double init_sq = b.w_tilde_c0 * b.w_tilde_c0;
  const double w_o_sq = b.w_o_norm * b.w_o_norm;
  b.b_vc = b.p_l1 * b.p_l1 *
           (4.0 * alpha * (init_sq + w_o_sq) + consts.sigma_v2);
  b.b_ve = n * n2sq *
           (12.0 * (lu * lu * init_sq + b.g_o_max) / one_minus_l2 +
            4.0 * alpha * (init_sq + w_o_sq) + consts.sigma_v2);

  b.gamma0 = Eigen::MatrixXd::Zero(n, n);
  b.gamma0(0, 0) = b.gamma_c;
  if (n > 1) {
    b.gamma0.block(0, 1, 1, n - 1).setConstant(mu * b.h_c_mu);
    b.gamma0.block(1, 1, n - 1, n - 1) = b.gamma_e;
  }
  b.gamma = b.gamma0 + Eigen::MatrixXd::Constant(n, n, mu * mu * b.psi0);
  b.rho_gamma = detail::spectral_radius(b.gamma);

  // Stability decided without forming 1 - (1 - x): near the sufficient bound
  // mu * lambda_l can drop below the resolution of double precision around
  // one, where gamma's leading diagonal rounds to exactly 1 and the spectral
  // radius saturates. gamma is nonnegative, so rho(gamma) < 1 iff I - gamma
  // is a nonsingular M-matrix, and that test only needs the raw step-size
  // products: elimination on a Z-matrix keeps every pivot positive exactly
  // when all leading principal minors are positive.
  {
    const double coup = mu * mu * b.psi0;
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, -coup);
    d(0, 0) += mu * (ll - 0.5 * mu * b.p_l1 * b.p_l1 * lu * lu);
    if (n > 1) {
      d.block(0, 1, 1, n - 1).array() -= mu * b.h_c_mu;
      for (int j = 1; j < n; ++j) d(j, j) += one_minus_l2;
      for (int j = 1; j + 1 < n; ++j) d(j, j + 1) -= 2.0 / one_minus_l2;
    }
    b.gamma_stable = true;
    for (int k = 0; k < n && b.gamma_stable; ++k) {
      if (!(d(k, k) > 0.0)) {
        b.gamma_stable = false;
        break;
      }
      for (int i = k + 1; i < n; ++i) {
        const double f = d(i, k) / d(k, k);
        d.row(i).tail(n - k - 1) -= f * d.row(k).tail(n - k - 1);
      }
    }
  }

  // modes contract at |lambda2| in norm, so their energies contract at its
  // square; that is the ratio a fit of the coordination phase should see
  b.rate_phase1 = b.lambda2 * b.lambda2;
  Eigen::MatrixXd h_c = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < n; ++k) h_c += p(k) * model.agents[k].r_u;
  double rho_ref = detail::spectral_radius(
      Eigen::MatrixXd(Eigen::MatrixXd::Identity(m, m) - mu * h_c));
  b.rate_phase2 = rho_ref * rho_ref;
  b.rate_correction =
      (m == 1) ? 0.0 : std::pow(mu * rate_epsilon, 1.0 / (2.0 * (m - 1)));
  b.ref_rate_lb = 1.0 - 2.0 * mu * b.p_l1 * lu;
  b.ref_rate_ub = b.gamma_c * b.gamma_c;

  // Sufficient stability bound: the minimum of three closed-form expressions.
  // The third one is driven by the *product* combination matrix.
  const double p1lu2 = b.p_l1 * b.p_l1 * lu * lu;
  double e1 = ll / (0.5 * p1lu2 +
                    (b.psi0 / 3.0) * std::pow(one_minus_l2 / 2.0, -2.0 * n));
  double e2 = b.psi0 > 0
                  ? std::sqrt(3.0 * std::pow(one_minus_l2, 2.0 * n + 1.0) /
                              (std::pow(2.0, 2.0 * n + 2.0) * b.psi0))
                  : std::numeric_limits<double>::infinity();
  double mA = detail::inf_norm(mats.product.transpose().cast<C>() * split.u_left);
  double e3 = ll / (p1lu2 * (mA * mA + 0.5));
  b.mu_stab = std::min(e1, std::min(e2, e3));

  b.u_row_norms.resize(n);
  for (int k = 0; k < n; ++k)
    b.u_row_norms(k) = (n > 1) ? split.u_left.row(k).norm() : 0.0;

  return b;
}

}  // namespace adaptnet::analysis
