#pragma once

#include <Eigen/Dense>

#include "adaptnet/errors.hpp"

namespace adaptnet::strategies {

// Column k holds agent k's iterate; one matrix is the whole network state.
struct NetworkState {
  Eigen::MatrixXd w;  // dim x n_agents
  long iteration = 0;
};

inline NetworkState make_state(const Eigen::MatrixXd& w0) {
  if (w0.rows() < 1 || w0.cols() < 1)
    throw validation_error("state: empty initial iterates");
  return NetworkState{w0, 0};
}

// Deterministic companion recursion driven by the exact update maps; starts
// from the weighted centroid of the initial iterates.
struct ReferenceState {
  Eigen::VectorXd w_bar;
  long iteration = 0;
};

inline ReferenceState make_reference(const Eigen::MatrixXd& w0,
                                     const Eigen::VectorXd& theta) {
  if (w0.cols() != theta.size())
    throw validation_error("reference: centroid weights do not match state");
  return ReferenceState{w0 * theta, 0};
}

inline void check_finite(const Eigen::MatrixXd& w, long iteration,
                         long trial = -1) {
  if (!w.allFinite() || w.cwiseAbs().maxCoeff() > 1e12)
    throw divergence_error(
        "iterates diverged (entry above 1e12 or non-finite); the step-size "
        "exceeds the sufficient stability bound for this network/model pair",
        iteration, trial);
}

}  // namespace adaptnet::strategies
