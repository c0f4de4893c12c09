#pragma once

#include <Eigen/Dense>
#include <string>

#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/models/regularity.hpp"

namespace adaptnet::strategies {

inline Eigen::VectorXd weighted_drift(const models::AgentModel& model,
                                      const Eigen::VectorXd& p,
                                      const Eigen::VectorXd& w) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.size());
  for (int k = 0; k < model.n_agents(); ++k)
    acc += p(k) * models::true_update(model, k, w);
  return acc;
}

// Unique zero of sum_k p(k) s_k. Solved in closed form for the quadratic
// family; otherwise by the damped fixed-point map
//   x <- x - lambda_l / (||p||_1^2 lambda_u^2) * sum_k p(k) s_k(x),
// which is a strict contraction whenever the regularity constants hold.
inline Eigen::VectorXd limit_point(const models::AgentModel& model,
                                   const Eigen::VectorXd& p,
                                   const models::RegularityConstants& consts,
                                   double tol = 1e-10, long max_iters = 1000000) {
  if (p.size() != model.n_agents())
    throw validation_error("limit point: weight vector length mismatch");

  if (model.kind == models::ModelKind::quadratic_lms) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(model.dim, model.dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(model.dim);
    for (int k = 0; k < model.n_agents(); ++k) {
      h += p(k) * model.agents[k].r_u;
      rhs += p(k) * (model.agents[k].r_u * model.agents[k].minimizer);
    }
    Eigen::VectorXd w = h.ldlt().solve(rhs);
    // one refinement pass; the residual check below is the contract
    w += h.ldlt().solve(rhs - h * w);
    double res = weighted_drift(model, p, w).norm();
    if (!(res <= tol * std::max(1.0, rhs.norm())))
      throw numeric_error("limit point: closed-form residual " +
                          std::to_string(res) + " exceeds tolerance");
    return w;
  }

  if (!(consts.lambda_l > 0) || !(consts.lambda_u > 0))
    throw validation_error("limit point: needs positive regularity constants");
  const double p1 = p.cwiseAbs().sum();
  const double step = consts.lambda_l / (p1 * p1 * consts.lambda_u * consts.lambda_u);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.dim);
  for (int k = 0; k < model.n_agents(); ++k)
    x += p(k) * model.agents[k].minimizer;
  x /= p.sum();
  for (long i = 0; i < max_iters; ++i) {
    Eigen::VectorXd g = weighted_drift(model, p, x);
    if (g.norm() <= tol) return x;
    x -= step * g;
  }
  throw numeric_error("limit point: fixed-point iteration did not reach " +
                      std::to_string(tol) + " within " +
                      std::to_string(max_iters) + " iterations");
}

}  // namespace adaptnet::strategies
