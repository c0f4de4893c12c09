#pragma once

#include <Eigen/Dense>

#include "adaptnet/errors.hpp"

namespace adaptnet::network {

// Per-agent step-sizes mu_k = mu_max * beta_k. Construction goes through
// (mu_max, beta) so the identity holds bit-exactly, not just to rounding.
struct StepSizeProfile {
  double mu_max = 0.0;
  Eigen::VectorXd beta;  // entries in [0, 1], max entry 1 unless mu_max == 0
  Eigen::VectorXd mu;    // mu(k) == mu_max * beta(k), exactly
};

inline StepSizeProfile make_steps(double mu_max, const Eigen::VectorXd& beta) {
  if (mu_max < 0) throw validation_error("steps: mu_max must be nonnegative");
  if (beta.size() < 1) throw validation_error("steps: empty beta");
  if ((beta.array() < 0.0).any() || (beta.array() > 1.0).any())
    throw validation_error("steps: beta entries must lie in [0, 1]");
  if (mu_max > 0 && std::abs(beta.maxCoeff() - 1.0) > 1e-12)
    throw validation_error("steps: max beta entry must be 1 so mu_max is attained");
  StepSizeProfile s;
  s.mu_max = mu_max;
  s.beta = beta;
  s.mu = mu_max * beta;
  return s;
}

inline StepSizeProfile uniform_steps(int n, double mu_max) {
  return make_steps(mu_max, Eigen::VectorXd::Ones(n));
}

// pi aggregates the fixed vector through the last combination stage; p folds
// in the step-size ratios. mu_max * p equals diag(mu) * a2 * theta, which is
// the identity the drift analysis leans on.
struct WeightVectors {
  Eigen::VectorXd pi;
  Eigen::VectorXd p;
};

inline WeightVectors weight_vectors(const Eigen::MatrixXd& a2,
                                    const Eigen::VectorXd& theta,
                                    const StepSizeProfile& steps) {
  if (a2.rows() != theta.size() || steps.beta.size() != theta.size())
    throw validation_error("weights: dimension mismatch");
  WeightVectors w;
  w.pi = a2 * theta;
  w.p = steps.beta.cwiseProduct(w.pi);
  return w;
}

}  // namespace adaptnet::network
