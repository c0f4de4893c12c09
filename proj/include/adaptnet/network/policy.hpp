#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>

#include "adaptnet/errors.hpp"
#include "adaptnet/network/topology.hpp"

namespace adaptnet::network {

enum class PolicyRule {
  uniform_averaging,
  metropolis,
  relative_degree,
  identity,
  explicit_matrix
};

// Entry (l, k) is the weight agent k puts on the value received from agent l.
// Columns sum to one (left-stochastic), entries are nonnegative, and the
// support never leaves the neighborhood structure.
inline void validate_policy(const Topology& t, const Eigen::MatrixXd& a,
                            double tol = 1e-12) {
  const int n = t.n_agents;
  if (a.rows() != n || a.cols() != n)
    throw validation_error("policy: matrix shape does not match topology");
  for (int k = 0; k < n; ++k) {
    double col = 0.0;
    for (int l = 0; l < n; ++l) {
      double v = a(l, k);
      if (v < 0)
        throw validation_error("policy: negative weight at (" +
                               std::to_string(l) + "," + std::to_string(k) + ")");
      if (v > 0 && !t.adjacency(l, k))
        throw validation_error("policy: weight outside neighborhood at (" +
                               std::to_string(l) + "," + std::to_string(k) + ")");
      col += v;
    }
    if (std::abs(col - 1.0) > tol)
      throw validation_error("policy: column " + std::to_string(k) +
                             " sums to " + std::to_string(col));
  }
}

inline Eigen::MatrixXd make_policy(const Topology& t, PolicyRule rule,
                                   const Eigen::MatrixXd* explicit_weights = nullptr) {
  const int n = t.n_agents;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);

  switch (rule) {
    case PolicyRule::uniform_averaging:
      for (int k = 0; k < n; ++k) {
        const auto& nb = t.neighbors[k];
        for (int l : nb) a(l, k) = 1.0 / static_cast<double>(nb.size());
      }
      break;

    case PolicyRule::metropolis: {
      // max-degree pairwise rule; the leftover mass stays on the diagonal,
      // which makes the matrix symmetric and hence doubly stochastic.
      std::vector<int> deg(n);
      for (int k = 0; k < n; ++k) deg[k] = static_cast<int>(t.neighbors[k].size());
      for (int k = 0; k < n; ++k) {
        double self = 1.0;
        for (int l : t.neighbors[k]) {
          if (l == k) continue;
          double w = 1.0 / std::max(deg[k], deg[l]);
          a(l, k) = w;
          self -= w;
        }
        a(k, k) = self;
      }
      break;
    }

    case PolicyRule::relative_degree: {
      std::vector<double> deg(n);
      for (int k = 0; k < n; ++k) deg[k] = static_cast<double>(t.neighbors[k].size());
      for (int k = 0; k < n; ++k) {
        double total = 0.0;
        for (int l : t.neighbors[k]) total += deg[l];
        for (int l : t.neighbors[k]) a(l, k) = deg[l] / total;
      }
      break;
    }

    case PolicyRule::identity:
      a.setIdentity();
      break;

    case PolicyRule::explicit_matrix:
      if (!explicit_weights)
        throw validation_error("policy: explicit rule requires a weight matrix");
      a = *explicit_weights;
      break;
  }

  validate_policy(t, a);
  return a;
}

}  // namespace adaptnet::network
