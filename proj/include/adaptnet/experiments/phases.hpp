#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "adaptnet/analysis/envelopes.hpp"
#include "adaptnet/analysis/theory.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/experiments/experiment.hpp"

namespace adaptnet::experiments {

struct RateFit {
  double ratio = 0.0;  // per-iteration geometric factor
  double r2 = 0.0;
};

// Least-squares slope of log(series) over the inclusive window [lo, hi].
inline RateFit fit_rate(const Eigen::VectorXd& series, long lo, long hi) {
  if (lo < 0 || hi >= series.size() || hi - lo + 1 < 10)
    throw validation_error("rate fit: window shorter than 10 samples");
  const long len = hi - lo + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (long i = lo; i <= hi; ++i) {
    if (!(series(i) > 0))
      throw validation_error("rate fit: series must be strictly positive");
    double x = static_cast<double>(i - lo);
    double y = std::log(series(i));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(len);
  double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  double intercept = (sy - slope * sx) / dn;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / dn;
  for (long i = lo; i <= hi; ++i) {
    double x = static_cast<double>(i - lo);
    double y = std::log(series(i));
    ss_res += (y - (intercept + slope * x)) * (y - (intercept + slope * x));
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  RateFit f;
  f.ratio = std::exp(slope);
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Empirical three-phase decomposition of a learning curve plus the matching
// predictions. Rates that cannot be fitted (window too short, or the curve is
// identically at its floor) come out as NaN.
struct PhaseReport {
  long phase1_end = 0;  // coordination transient settled
  long phase2_end = 0;  // reference decay reached the noise floor
  double fitted_rate_phase1 = std::numeric_limits<double>::quiet_NaN();
  double fitted_rate_phase2 = std::numeric_limits<double>::quiet_NaN();
  double r2_phase1 = 0.0;
  double r2_phase2 = 0.0;
  Eigen::VectorXd steady_state_mse;  // per agent, tail average
  double steady_state_mse_mean = 0.0;
  double steady_residual_sum = 0.0;
  double predicted_rate_phase1 = 0.0;  // lambda2^2: energy decay of the slowest mode
  double predicted_rate_phase2 = 0.0;
  Eigen::VectorXd predicted_steady_mse;  // envelope-derived per-agent cap
};

inline PhaseReport detect_phases(const LearningCurves& curves,
                                 const analysis::TheoryBundle& bundle) {
  const long rows = curves.mse.rows();
  const int n = static_cast<int>(curves.mse.cols());
  if (rows < 2) throw validation_error("phases: curve has fewer than 2 samples");

  PhaseReport rep;
  rep.predicted_rate_phase1 = bundle.rate_phase1;
  rep.predicted_rate_phase2 = bundle.rate_phase2;

  const long tail = std::max<long>(1, (rows + 9) / 10);  // last ~10%
  const long tail_lo = rows - tail;
  rep.steady_state_mse = curves.mse.bottomRows(tail).colwise().mean().transpose();
  rep.steady_state_mse_mean = rep.steady_state_mse.mean();
  rep.steady_residual_sum =
      curves.residual_sum.size() > 0
          ? curves.residual_sum.tail(tail).mean()
          : 0.0;

  // Horizon sufficiency: the tail of the agent-averaged curve must be flat.
  // Trial-correlated wander on a settled tail fits ratios within a tenth of
  // a percent of one; a curve that is still decaying sits well below 0.995.
  Eigen::VectorXd mean_mse = curves.mse.rowwise().mean();
  if (tail < 10)
    throw validation_error("phases: horizon " + std::to_string(rows - 1) +
                           " is too short to measure a steady-state tail");
  RateFit tail_fit = fit_rate(mean_mse, tail_lo, rows - 1);
  if (tail_fit.ratio < 0.995)
    throw validation_error(
        "phases: horizon insufficient; learning curve still decaying at "
        "ratio " + std::to_string(tail_fit.ratio) + " in the final window");

  // Phase I ends when the residual energy stops its free decay: either it
  // has dropped four orders of magnitude, or the next step no longer
  // contracts (the curve has reached its transient floor, which can sit
  // above the long-run steady value while the drift is still large). A start
  // at or below the steady floor has no coordination phase at all.
  rep.phase1_end = 0;
  if (curves.residual_sum.size() > 0 && n > 1 &&
      curves.residual_sum(0) > 4.0 * rep.steady_residual_sum) {
    const double deep = 1e-4 * curves.residual_sum(0);
    rep.phase1_end = rows - 1;
    for (long i = 1; i < rows; ++i)
      if (curves.residual_sum(i) <= deep ||
          (i + 1 < rows &&
           curves.residual_sum(i + 1) > 0.95 * curves.residual_sum(i))) {
        rep.phase1_end = i;
        break;
      }
  }

  // Phase II ends when the reference error meets the measured noise floor.
  rep.phase2_end = rows - 1;
  for (long i = rep.phase1_end; i < rows; ++i)
    if (curves.ref_mse(i) <= 2.0 * rep.steady_state_mse_mean) {
      rep.phase2_end = i;
      break;
    }

  if (rep.phase1_end > rep.phase2_end) rep.phase2_end = rep.phase1_end;

  if (rep.phase1_end >= 10 && curves.residual_sum.size() > 0 &&
      (curves.residual_sum.head(rep.phase1_end + 1).array() > 0).all()) {
    RateFit f = fit_rate(curves.residual_sum, 0, rep.phase1_end);
    rep.fitted_rate_phase1 = f.ratio;
    rep.r2_phase1 = f.r2;
  }
  if (rep.phase2_end - rep.phase1_end >= 10) {
    RateFit f = fit_rate(mean_mse, rep.phase1_end, rep.phase2_end);
    rep.fitted_rate_phase2 = f.ratio;
    rep.r2_phase2 = f.r2;
  }

  // Envelope-derived per-agent caps on the steady MSE; infinite when the
  // comparison matrix is unstable and no finite envelope exists.
  rep.predicted_steady_mse.resize(n);
  try {
    analysis::BoundEnvelopes env = analysis::bound_envelopes(
        bundle, curves.w_e0_energy.size() > 0
                    ? curves.w_e0_energy
                    : Eigen::VectorXd::Zero(std::max(0, bundle.n - 1)),
        0);
    for (int k = 0; k < n; ++k) {
      double u = bundle.u_row_norms(k);
      rep.predicted_steady_mse(k) =
          2.0 * env.floor_wc + 2.0 * u * u * env.floor_we_sum;
    }
  } catch (const validation_error&) {
    rep.predicted_steady_mse.setConstant(std::numeric_limits<double>::infinity());
  }
  return rep;
}

}  // namespace adaptnet::experiments
