#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "adaptnet/analysis/operators.hpp"
#include "adaptnet/analysis/transform.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/models/regularity.hpp"
#include "adaptnet/network/combine.hpp"
#include "adaptnet/network/spectral.hpp"
#include "adaptnet/network/stepsize.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/strategies/state.hpp"
#include "adaptnet/strategies/strategy.hpp"

namespace adaptnet::experiments {

// Assembled and validated ingredients of one run. Construction of the pieces
// is the caller's job (or the pipeline's); this struct only carries them.
struct ExperimentSetup {
  strategies::StrategyKind kind = strategies::StrategyKind::atc;
  network::CombinationMatrices matrices;
  network::SpectralSplit split;
  network::StepSizeProfile steps;
  network::WeightVectors weights;
  models::AgentModel model;
  models::RegularityConstants consts;
  Eigen::VectorXd w_o;
};

enum class InitKind { common_zero, dispersed };

struct ExperimentConfig {
  long horizon = 0;  // 0 selects ceil(20 / (mu_max * lambda_l))
  long trials = 100;
  InitKind init = InitKind::common_zero;
  double init_spread = 1.0;
  std::uint64_t init_seed = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

// Monte Carlo averages over trials, one row per recorded iteration 0..horizon.
// The reference curve is shared by all trials (it is deterministic), so it
// carries no standard error by construction.
struct LearningCurves {
  Eigen::MatrixXd mse, mse_stderr;                    // per agent
  Eigen::VectorXd ref_mse;                            // deterministic
  Eigen::VectorXd centroid_gap, centroid_gap_stderr;  // energy vs reference
  Eigen::MatrixXd residual, residual_stderr;          // per contracting mode
  Eigen::VectorXd residual_sum, residual_sum_stderr;
  Eigen::VectorXd w_e0_energy;  // exact initial residual energies
  long trials = 0;
  long horizon = 0;
};

inline long default_horizon(const ExperimentSetup& setup) {
  double denom = setup.steps.mu_max * setup.consts.lambda_l;
  if (!(denom > 0))
    throw validation_error("experiment: cannot size a horizon at zero step-size");
  return static_cast<long>(std::ceil(20.0 / denom));
}

// Initial iterates: either every agent at the origin, or agents scattered in
// a ball of the given spread. The scatter depends only on init_seed, never on
// the trial, so the reference recursion stays shared across trials.
inline Eigen::MatrixXd make_initial_state(const ExperimentSetup& setup,
                                          const ExperimentConfig& cfg) {
  const int m = setup.model.dim;
  const int n = setup.model.n_agents();
  if (cfg.init == InitKind::common_zero) return Eigen::MatrixXd::Zero(m, n);
  RngStream rng = RngStream::derive(cfg.init_seed, tag::init);
  Eigen::MatrixXd w0(m, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd dir(m);
    double norm = 0.0;
    do {
      for (int j = 0; j < m; ++j) dir(j) = rng.gauss();
      norm = dir.norm();
    } while (norm < 1e-12);
    double radius = std::pow(rng.uniform(), 1.0 / m);
    w0.col(k) = cfg.init_spread * radius / norm * dir;
  }
  return w0;
}

namespace detail {

struct TrialBuffers {
  Eigen::MatrixXd mse;
  Eigen::VectorXd gap;
  Eigen::MatrixXd resid;

  void resize(long rows, int n, int r) {
    mse.resize(rows, n);
    gap.resize(rows);
    resid.resize(rows, r);
  }
};

inline void run_single_trial(const ExperimentSetup& setup, long horizon,
                             const Eigen::MatrixXd& w0,
                             const Eigen::MatrixXd& ref_traj,
                             std::uint64_t master_seed, long trial,
                             TrialBuffers& out) {
  const int n = setup.model.n_agents();
  const int m = setup.model.dim;
  const int r = n - 1;
  out.resize(horizon + 1, n, r);

  RngStream rng = RngStream::derive(master_seed, tag::trial,
                                    static_cast<std::uint64_t>(trial));
  strategies::NetworkState st = strategies::make_state(w0);
  for (long i = 0; i <= horizon; ++i) {
    for (int k = 0; k < n; ++k)
      out.mse(i, k) = (setup.w_o - st.w.col(k)).squaredNorm();
    analysis::NetworkCoordinates coords = analysis::transform(st.w, setup.split);
    out.gap(i) = (coords.w_c - ref_traj.col(i)).squaredNorm();
    if (r > 0) out.resid.row(i) = analysis::energy(coords.w_e, m).transpose();
    if (i < horizon) {
      if (setup.kind == strategies::StrategyKind::general)
        strategies::general_step(st, setup.matrices, setup.steps, setup.model,
                                 rng, trial);
      else
        strategies::named_step(st, setup.kind, setup.matrices.product,
                               setup.steps, setup.model, rng, trial);
    }
  }
}

}  // namespace detail

inline LearningCurves run_experiment(const ExperimentSetup& setup,
                                     const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw validation_error("experiment: needs at least one trial");
  const long horizon = cfg.horizon > 0 ? cfg.horizon : default_horizon(setup);
  const int n = setup.model.n_agents();
  const int m = setup.model.dim;
  const int r = n - 1;
  const long rows = horizon + 1;

  Eigen::MatrixXd w0 = make_initial_state(setup, cfg);

  // Shared deterministic reference trajectory and its error curve.
  Eigen::MatrixXd ref_traj(m, rows);
  Eigen::VectorXd ref_mse(rows);
  {
    strategies::ReferenceState ref = strategies::make_reference(w0, setup.split.theta);
    for (long i = 0; i < rows; ++i) {
      ref_traj.col(i) = ref.w_bar;
      ref_mse(i) = (setup.w_o - ref.w_bar).squaredNorm();
      if (i + 1 < rows)
        strategies::reference_step(ref, setup.weights.p, setup.steps.mu_max,
                                   setup.model);
    }
  }

  LearningCurves out;
  out.trials = cfg.trials;
  out.horizon = horizon;
  out.ref_mse = ref_mse;
  out.w_e0_energy =
      r > 0 ? analysis::energy(analysis::transform(w0, setup.split).w_e, m)
            : Eigen::VectorXd();

  // Running mean and centered second moment per statistic; the centered form
  // keeps the variance exactly zero when every trial produces the same value.
  Eigen::MatrixXd mean_mse = Eigen::MatrixXd::Zero(rows, n);
  Eigen::MatrixXd m2_mse = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd mean_gap = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd m2_gap = Eigen::VectorXd::Zero(rows);
  Eigen::MatrixXd mean_resid = Eigen::MatrixXd::Zero(rows, r);
  Eigen::MatrixXd m2_resid = Eigen::MatrixXd::Zero(rows, r);
  Eigen::VectorXd mean_rsum = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd m2_rsum = Eigen::VectorXd::Zero(rows);
  long folded = 0;
  auto fold = [&folded](auto& mean, auto& m2, const auto& x) {
    auto delta = (x - mean).eval();
    mean += delta / static_cast<double>(folded);
    m2 += delta.cwiseProduct(x - mean);
  };

  int n_threads = cfg.threads > 0
                      ? cfg.threads
                      : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<int>(
      std::min<long>(std::min(n_threads, 16), cfg.trials));

  // Trials run in blocks of n_threads; the fold happens on the main thread in
  // ascending trial order, so results are independent of the thread count.
  std::vector<detail::TrialBuffers> block(n_threads);
  std::optional<divergence_error> failure;
  for (long base = 0; base < cfg.trials && !failure; base += n_threads) {
    const int width = static_cast<int>(std::min<long>(n_threads, cfg.trials - base));
    if (width == 1) {
      try {
        detail::run_single_trial(setup, horizon, w0, ref_traj, cfg.seed, base,
                                 block[0]);
      } catch (const divergence_error& e) {
        failure.emplace(e);
      }
    } else {
      std::vector<std::thread> pool;
      std::vector<std::optional<divergence_error>> errs(width);
      for (int t = 0; t < width; ++t)
        pool.emplace_back([&, t] {
          try {
            detail::run_single_trial(setup, horizon, w0, ref_traj, cfg.seed,
                                     base + t, block[t]);
          } catch (const divergence_error& e) {
            errs[t].emplace(e);
          }
        });
      for (auto& th : pool) th.join();
      for (int t = 0; t < width && !failure; ++t)
        if (errs[t]) failure.emplace(*errs[t]);
    }
    if (failure) break;
    for (int t = 0; t < width; ++t) {
      const detail::TrialBuffers& b = block[t];
      ++folded;
      fold(mean_mse, m2_mse, b.mse);
      fold(mean_gap, m2_gap, b.gap);
      if (r > 0) {
        fold(mean_resid, m2_resid, b.resid);
        Eigen::VectorXd rsum = b.resid.rowwise().sum();
        fold(mean_rsum, m2_rsum, rsum);
      }
    }
  }
  if (failure)
    throw divergence_error(
        "Monte Carlo trial " + std::to_string(failure->trial) +
            " diverged at iteration " + std::to_string(failure->iteration) +
            "; the step-size exceeds the sufficient stability bound for this "
            "network/model pair",
        failure->iteration, failure->trial);

  const double tn = static_cast<double>(cfg.trials);
  auto stderr_of = [&](double m2) {
    if (cfg.trials < 2) return 0.0;
    return std::sqrt(std::max(0.0, m2 / (tn - 1.0)) / tn);
  };

  out.mse = mean_mse;
  out.centroid_gap = mean_gap;
  out.mse_stderr.resize(rows, n);
  out.centroid_gap_stderr.resize(rows);
  out.residual = mean_resid;
  out.residual_stderr.resize(rows, r);
  out.residual_sum = mean_rsum;
  out.residual_sum_stderr.resize(rows);
  for (long i = 0; i < rows; ++i) {
    for (int k = 0; k < n; ++k) out.mse_stderr(i, k) = stderr_of(m2_mse(i, k));
    out.centroid_gap_stderr(i) = stderr_of(m2_gap(i));
    for (int j = 0; j < r; ++j)
      out.residual_stderr(i, j) = stderr_of(m2_resid(i, j));
    out.residual_sum_stderr(i) = stderr_of(m2_rsum(i));
  }
  return out;
}

}  // namespace adaptnet::experiments
