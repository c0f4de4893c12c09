#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/models/noise_fit.hpp"

namespace adaptnet::models {

// Constants the convergence machinery consumes:
//   lambda_u  Lipschitz constant of every s_k        (max operator norm)
//   lambda_l  strong monotonicity of sum_k p(k) s_k  (min eig of sym part)
//   alpha, sigma_v2  fitted envelope of the update-perturbation power
//   lambda_h, r_h    smoothness defect and its radius; zero / infinite for
//                    linear update maps, kept explicit so callers see the
//                    assumption rather than a silent hard-coding
struct RegularityConstants {
  double lambda_u = 0.0;
  double lambda_l = 0.0;
  double alpha = 0.0;
  double sigma_v2 = 0.0;
  double lambda_h = 0.0;
  double r_h = std::numeric_limits<double>::infinity();
};

struct NoiseFitOptions {
  long sample_budget = 4000;
  double probe_radius = 0.0;  // 0 selects 10 * ||limit point|| + 1
  std::uint64_t seed = 0x6e6f6973ULL;
};

inline double operator_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

inline RegularityConstants regularity_constants(const AgentModel& model,
                                                const Eigen::VectorXd& p,
                                                const NoiseFitOptions& opts = {}) {
  if (p.size() != model.n_agents())
    throw validation_error("regularity: weight vector length mismatch");

  RegularityConstants c;
  for (const Agent& a : model.agents)
    c.lambda_u = std::max(c.lambda_u, operator_norm(a.r_u));

  Eigen::MatrixXd h_c = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int k = 0; k < model.n_agents(); ++k) h_c += p(k) * model.agents[k].r_u;
  Eigen::MatrixXd sym = 0.5 * (h_c + h_c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  c.lambda_l = eig.eigenvalues().minCoeff();
  if (!(c.lambda_l > 0))
    throw validation_error(
        "regularity: aggregate update map is not strongly monotone under the "
        "given weights (model not globally observable under p)");

  if (model.kind == ModelKind::quadratic_lms) {
    double radius = opts.probe_radius;
    if (radius <= 0) {
      // Closed-form limit point of the weighted aggregate, used only to size
      // the probe region.
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(model.dim);
      for (int k = 0; k < model.n_agents(); ++k)
        rhs += p(k) * (model.agents[k].r_u * model.agents[k].minimizer);
      Eigen::VectorXd w_o = h_c.ldlt().solve(rhs);
      radius = 10.0 * w_o.norm() + 1.0;
    }
    NoiseConstants nc =
        estimate_noise_constants(model, opts.sample_budget, radius, opts.seed);
    c.alpha = nc.alpha;
    c.sigma_v2 = nc.sigma_v2;
  }

  c.lambda_h = 0.0;
  c.r_h = std::numeric_limits<double>::infinity();
  return c;
}

}  // namespace adaptnet::models
