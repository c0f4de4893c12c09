#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "adaptnet/analysis/envelopes.hpp"
#include "adaptnet/analysis/theory.hpp"
#include "adaptnet/experiments/experiment.hpp"
#include "adaptnet/experiments/phases.hpp"

namespace adaptnet::experiments {

struct VerdictRow {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ComparisonReport {
  std::vector<VerdictRow> rows;
  bool all_pass = false;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

// Five verdicts tying measurement to prediction. `env` may be null when the
// comparison matrix is unstable (then the band/envelope verdicts fail with an
// explanation rather than pretending to pass); `steady_mse_half` carries the
// steady MSE of a companion run at half the step-size, when available.
inline ComparisonReport compare_to_theory(const PhaseReport& phases,
                                          const LearningCurves& curves,
                                          const analysis::TheoryBundle& bundle,
                                          const analysis::BoundEnvelopes* env,
                                          const double* steady_mse_half) {
  ComparisonReport rep;
  const long rows = curves.mse.rows();
  const int n = static_cast<int>(curves.mse.cols());

  {  // (a) coordination-phase rate sits at or under the slowest-mode rate
    VerdictRow row{"a", "coordination rate at the network mode", false, ""};
    const double tol = 0.02;
    if (std::isnan(phases.fitted_rate_phase1)) {
      row.pass = true;
      row.detail = "no coordination phase to fit (residual starts at its floor)";
    } else {
      row.pass = phases.fitted_rate_phase1 <= bundle.rate_phase1 + tol;
      row.detail = "fitted " + detail::fmt(phases.fitted_rate_phase1) +
                   " vs mode rate " + detail::fmt(bundle.rate_phase1) +
                   " + " + detail::fmt(tol);
    }
    rep.rows.push_back(row);
  }

  {  // (b) convergence-phase rate matches the reference prediction
    VerdictRow row{"b", "convergence rate matches prediction", false, ""};
    if (std::isnan(phases.fitted_rate_phase2)) {
      row.detail = "phase-II window too short to fit a rate";
    } else {
      double rel = std::abs(phases.fitted_rate_phase2 / bundle.rate_phase2 - 1.0);
      row.pass = rel <= 0.05;
      row.detail = "fitted " + detail::fmt(phases.fitted_rate_phase2) + " vs " +
                   detail::fmt(bundle.rate_phase2) + " (rel err " +
                   detail::fmt(rel) + ")";
    }
    rep.rows.push_back(row);
  }

  {  // (c) per-agent curves hug the reference curve within the uniform band
    VerdictRow row{"c", "per-agent band around reference", false, ""};
    if (!env) {
      row.detail = "no finite envelopes at this step-size";
    } else {
      double worst = -1.0;
      long worst_i = 0;
      int worst_k = 0;
      bool ok = true;
      for (long i = phases.phase1_end; i <= phases.phase2_end && i < rows; ++i) {
        double bwc = env->bound_wc(i);
        double bwe = env->bound_we_sum(i);
        double ref = std::sqrt(curves.ref_mse(i));
        for (int k = 0; k < n; ++k) {
          double u = bundle.u_row_norms(k);
          double band = 2.0 * bwc + 2.0 * u * u * bwe +
                        2.0 * ref * (std::sqrt(bwc) + u * std::sqrt(bwe));
          double diff = std::abs(curves.mse(i, k) - curves.ref_mse(i));
          double slack = band + 3.0 * curves.mse_stderr(i, k);
          if (diff - slack > worst) {
            worst = diff - slack;
            worst_i = i;
            worst_k = k;
          }
          if (diff > slack) ok = false;
        }
      }
      row.pass = ok;
      row.detail = ok ? "all agents inside the band over the convergence phase"
                      : "agent " + std::to_string(worst_k) + " leaves the band at "
                        "iteration " + std::to_string(worst_i) + " by " +
                        detail::fmt(worst);
    }
    rep.rows.push_back(row);
  }

  {  // (d) measured mean energies stay under the envelopes
    VerdictRow row{"d", "mean energies under envelopes", false, ""};
    if (!env) {
      row.detail = "no finite envelopes at this step-size";
    } else {
      bool ok = true;
      std::string where;
      for (long i = 0; i < rows && ok; ++i) {
        if (curves.centroid_gap(i) >
            1.25 * env->bound_wc(i) + 3.0 * curves.centroid_gap_stderr(i)) {
          ok = false;
          where = "centroid gap at iteration " + std::to_string(i);
        }
        if (ok && curves.residual_sum.size() > 0 &&
            curves.residual_sum(i) > 1.25 * env->bound_we_sum(i) +
                                         3.0 * curves.residual_sum_stderr(i)) {
          ok = false;
          where = "residual energy at iteration " + std::to_string(i);
        }
      }
      row.pass = ok;
      row.detail = ok ? "centroid gap and residual energy dominated at every "
                        "recorded iteration"
                      : where + " exceeds its envelope";
    }
    rep.rows.push_back(row);
  }

  {  // (e) steady MSE scales linearly with the step-size
    VerdictRow row{"e", "steady error scales with step-size", false, ""};
    if (!steady_mse_half) {
      row.detail = "no half step-size companion run supplied";
    } else {
      double ratio = phases.steady_state_mse_mean / *steady_mse_half;
      row.pass = ratio >= 1.6 && ratio <= 2.4;
      row.detail = "ratio " + detail::fmt(ratio) + " (expected in [1.6, 2.4])";
    }
    rep.rows.push_back(row);
  }

  rep.all_pass = true;
  for (const auto& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

}  // namespace adaptnet::experiments
