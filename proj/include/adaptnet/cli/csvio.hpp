#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "adaptnet/analysis/envelopes.hpp"
#include "adaptnet/experiments/experiment.hpp"

namespace adaptnet::cli {

namespace detail {

// 17 significant digits: enough for bit-exact round-trips of any double.
inline void append_num(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace detail

// Long format, one row per (iteration, agent). Network-level columns repeat
// across the agent rows of an iteration.
inline std::string curves_csv(const experiments::LearningCurves& c,
                              const analysis::BoundEnvelopes* env) {
  std::string out =
      "iter,agent,mse,stderr,ref_mse,centroid_gap_energy,"
      "residual_energy_sum,bound_wc,bound_we\n";
  const long rows = c.mse.rows();
  const int n = static_cast<int>(c.mse.cols());
  const double inf = std::numeric_limits<double>::infinity();
  for (long i = 0; i < rows; ++i) {
    for (int k = 0; k < n; ++k) {
      out += std::to_string(i);
      out += ',';
      out += std::to_string(k);
      out += ',';
      detail::append_num(out, c.mse(i, k));
      out += ',';
      detail::append_num(out, c.mse_stderr(i, k));
      out += ',';
      detail::append_num(out, c.ref_mse(i));
      out += ',';
      detail::append_num(out, c.centroid_gap(i));
      out += ',';
      detail::append_num(out, c.residual_sum.size() > 0 ? c.residual_sum(i) : 0.0);
      out += ',';
      detail::append_num(out, env ? env->bound_wc(i) : inf);
      out += ',';
      detail::append_num(out, env ? env->bound_we_sum(i) : inf);
      out += '\n';
    }
  }
  return out;
}

}  // namespace adaptnet::cli
