#pragma once

#include <Eigen/Dense>

#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/network/combine.hpp"
#include "adaptnet/network/stepsize.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/strategies/state.hpp"

namespace adaptnet::strategies {

enum class StrategyKind { general, consensus, cta, atc };

// One synchronous step of the three-stage recursion
//
//   phi_k = sum_l a1(l,k) w_l
//   psi_k = sum_l a0(l,k) phi_l - mu_k * shat_k(phi_k)
//   w_k   = sum_l a2(l,k) psi_l
//
// Every agent draws exactly one stochastic update per step, evaluated at its
// own first-stage iterate, in ascending agent order; this fixes the RNG
// consumption pattern all engines share.
inline void general_step(NetworkState& st, const network::CombinationMatrices& m,
                         const network::StepSizeProfile& steps,
                         const models::AgentModel& model, RngStream& rng,
                         long trial = -1) {
  const int n = static_cast<int>(st.w.cols());
  Eigen::MatrixXd phi = st.w * m.a1;
  Eigen::MatrixXd shat(st.w.rows(), n);
  for (int k = 0; k < n; ++k)
    shat.col(k) = models::stochastic_update(model, k, phi.col(k), rng);
  Eigen::MatrixXd psi = phi * m.a0 - shat * steps.mu.asDiagonal();
  st.w = psi * m.a2;
  ++st.iteration;
  check_finite(st.w, st.iteration, trial);
}

// Named single-matrix forms. The consensus update is evaluated at the iterate
// *before* aggregation; that asymmetry is the defining difference from cta.
inline void named_step(NetworkState& st, StrategyKind kind,
                       const Eigen::MatrixXd& a,
                       const network::StepSizeProfile& steps,
                       const models::AgentModel& model, RngStream& rng,
                       long trial = -1) {
  const int n = static_cast<int>(st.w.cols());
  Eigen::MatrixXd shat(st.w.rows(), n);
  switch (kind) {
    case StrategyKind::consensus: {
      for (int k = 0; k < n; ++k)
        shat.col(k) = models::stochastic_update(model, k, st.w.col(k), rng);
      st.w = st.w * a - shat * steps.mu.asDiagonal();
      break;
    }
    case StrategyKind::cta: {
      Eigen::MatrixXd phi = st.w * a;
      for (int k = 0; k < n; ++k)
        shat.col(k) = models::stochastic_update(model, k, phi.col(k), rng);
      st.w = phi - shat * steps.mu.asDiagonal();
      break;
    }
    case StrategyKind::atc: {
      for (int k = 0; k < n; ++k)
        shat.col(k) = models::stochastic_update(model, k, st.w.col(k), rng);
      st.w = (st.w - shat * steps.mu.asDiagonal()) * a;
      break;
    }
    case StrategyKind::general:
      throw validation_error("named_step: the general kind needs three matrices");
  }
  ++st.iteration;
  check_finite(st.w, st.iteration, trial);
}

// Three-matrix layout equivalent to each named form.
inline network::CombinationMatrices specialize(StrategyKind kind,
                                               const Eigen::MatrixXd& a) {
  network::check_left_stochastic(a, "combination matrix");
  const auto n = a.rows();
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  switch (kind) {
    case StrategyKind::consensus:
      return network::CombinationMatrices{eye, a, eye, a};
    case StrategyKind::cta:
      return network::CombinationMatrices{a, eye, eye, a};
    case StrategyKind::atc:
      return network::CombinationMatrices{eye, eye, a, a};
    case StrategyKind::general:
      break;
  }
  throw validation_error("specialize: pass explicit matrices for the general kind");
}

// Deterministic companion recursion: w_bar <- w_bar - mu_max * sum_k p_k s_k(w_bar).
inline void reference_step(ReferenceState& ref, const Eigen::VectorXd& p,
                           double mu_max, const models::AgentModel& model) {
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(ref.w_bar.size());
  for (int k = 0; k < model.n_agents(); ++k)
    drift += p(k) * models::true_update(model, k, ref.w_bar);
  ref.w_bar -= mu_max * drift;
  ++ref.iteration;
  if (!ref.w_bar.allFinite() || ref.w_bar.cwiseAbs().maxCoeff() > 1e12)
    throw divergence_error("reference recursion diverged", ref.iteration);
}

}  // namespace adaptnet::strategies
