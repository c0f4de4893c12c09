#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "adaptnet/errors.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet::models {

enum class ModelKind { quadratic_lms, custom_deterministic };

// One agent's local cost data. The update map is s_k(w) = r_u * (w - minimizer);
// for the data-driven kind, r_u is the regressor covariance and sqrt_r its
// symmetric PSD square root, used to draw regressors with that covariance.
struct Agent {
  Eigen::MatrixXd r_u;
  Eigen::VectorXd minimizer;
  double noise_var = 0.0;
  Eigen::MatrixXd sqrt_r;
};

struct AgentModel {
  int dim = 0;  // shared parameter dimension
  ModelKind kind = ModelKind::quadratic_lms;
  std::vector<Agent> agents;

  int n_agents() const { return static_cast<int>(agents.size()); }
};

inline AgentModel make_quadratic_model(std::vector<Eigen::MatrixXd> r_u,
                                       std::vector<Eigen::VectorXd> minimizers,
                                       std::vector<double> noise_vars) {
  const int n = static_cast<int>(r_u.size());
  if (n < 1 || minimizers.size() != r_u.size() || noise_vars.size() != r_u.size())
    throw validation_error("model: agent lists have inconsistent lengths");
  const int m = static_cast<int>(r_u[0].rows());
  AgentModel model;
  model.dim = m;
  model.kind = ModelKind::quadratic_lms;
  model.agents.resize(n);
  for (int k = 0; k < n; ++k) {
    if (r_u[k].rows() != m || r_u[k].cols() != m || minimizers[k].size() != m)
      throw validation_error("model: agent " + std::to_string(k) +
                             " has mismatched dimensions");
    if ((r_u[k] - r_u[k].transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw validation_error("model: covariance of agent " + std::to_string(k) +
                             " is not symmetric");
    if (noise_vars[k] < 0)
      throw validation_error("model: negative noise variance at agent " +
                             std::to_string(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r_u[k]);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      throw validation_error("model: covariance of agent " + std::to_string(k) +
                             " is not positive semidefinite");
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    Agent& a = model.agents[k];
    a.r_u = r_u[k];
    a.minimizer = std::move(minimizers[k]);
    a.noise_var = noise_vars[k];
    a.sqrt_r = eig.eigenvectors() *
               clipped.cwiseSqrt().asDiagonal() *
               eig.eigenvectors().transpose();
  }
  return model;
}

// Deterministic family: r_u may be any matrix (in particular asymmetric), so
// only the exact map s_k is available; there is no data stream behind it.
inline AgentModel make_custom_model(std::vector<Eigen::MatrixXd> maps,
                                    std::vector<Eigen::VectorXd> minimizers) {
  const int n = static_cast<int>(maps.size());
  if (n < 1 || minimizers.size() != maps.size())
    throw validation_error("model: agent lists have inconsistent lengths");
  const int m = static_cast<int>(maps[0].rows());
  AgentModel model;
  model.dim = m;
  model.kind = ModelKind::custom_deterministic;
  model.agents.resize(n);
  for (int k = 0; k < n; ++k) {
    if (maps[k].rows() != m || maps[k].cols() != m || minimizers[k].size() != m)
      throw validation_error("model: agent " + std::to_string(k) +
                             " has mismatched dimensions");
    model.agents[k].r_u = std::move(maps[k]);
    model.agents[k].minimizer = std::move(minimizers[k]);
  }
  return model;
}

inline Eigen::VectorXd true_update(const AgentModel& model, int k,
                                   const Eigen::VectorXd& w) {
  const Agent& a = model.agents.at(k);
  return a.r_u * (w - a.minimizer);
}

// One streaming-data realization: regressor u with covariance r_u, observation
// d = u . minimizer + noise, returned value u^T (u . w - d). Consumes exactly
// dim + 1 Gaussian draws, in coordinate order then noise.
inline Eigen::VectorXd stochastic_update(const AgentModel& model, int k,
                                         const Eigen::VectorXd& w,
                                         RngStream& rng) {
  if (model.kind != ModelKind::quadratic_lms)
    throw validation_error("model: only the data-driven kind has a stochastic update");
  const Agent& a = model.agents.at(k);
  Eigen::VectorXd z(model.dim);
  for (int j = 0; j < model.dim; ++j) z(j) = rng.gauss();
  double noise = std::sqrt(a.noise_var) * rng.gauss();
  Eigen::VectorXd u = a.sqrt_r * z;
  double residual = u.dot(w) - (u.dot(a.minimizer) + noise);
  return residual * u;
}

// Update-map Jacobians: constant in w for this family.
struct HessianBundle {
  std::vector<Eigen::MatrixXd> h;  // per agent
  Eigen::MatrixXd h_c;             // sum_k p(k) h[k]
  double min_sym_eig = 0.0;        // smallest eigenvalue of sym(h_c)
};

inline HessianBundle hessian_bundle(const AgentModel& model,
                                    const Eigen::VectorXd& p) {
  if (p.size() != model.n_agents())
    throw validation_error("hessians: weight vector length mismatch");
  HessianBundle b;
  b.h.reserve(model.agents.size());
  b.h_c = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int k = 0; k < model.n_agents(); ++k) {
    b.h.push_back(model.agents[k].r_u);
    b.h_c += p(k) * model.agents[k].r_u;
  }
  Eigen::MatrixXd sym = 0.5 * (b.h_c + b.h_c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  b.min_sym_eig = eig.eigenvalues().minCoeff();
  return b;
}

}  // namespace adaptnet::models
