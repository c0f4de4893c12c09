#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "adaptnet/analysis/envelopes.hpp"
#include "adaptnet/experiments/experiment.hpp"

namespace adaptnet::cli {

namespace detail {

struct SvgCanvas {
  std::string body;
  double x0 = 70, y0 = 20, w = 700, h = 420;
  long max_iter = 1;
  double lo = -1, hi = 1;  // log10 range

  double px(double iter) const { return x0 + w * iter / static_cast<double>(max_iter); }
  double py(double logv) const {
    double t = (logv - lo) / (hi - lo);
    return y0 + h * (1.0 - std::clamp(t, 0.0, 1.0));
  }

  void polyline(const Eigen::VectorXd& series, const char* style) {
    // decimate long series; the plot cannot resolve more than ~1400 points
    const long len = series.size();
    const long stride = std::max<long>(1, len / 1400);
    std::string pts;
    char buf[64];
    for (long i = 0; i < len; i += stride) {
      double v = series(i);
      if (!(v > 0) || !std::isfinite(v)) continue;
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(static_cast<double>(i)),
                    py(std::log10(v)));
      pts += buf;
    }
    if (pts.empty()) return;
    body += "<polyline fill=\"none\" ";
    body += style;
    body += " points=\"" + pts + "\"/>\n";
  }
};

}  // namespace detail

// Log-scale learning curves: per-agent MSE, the deterministic reference curve,
// and (when available) the two mean-energy envelopes.
inline std::string curves_svg(const experiments::LearningCurves& c,
                              const analysis::BoundEnvelopes* env) {
  detail::SvgCanvas cv;
  cv.max_iter = std::max<long>(1, c.mse.rows() - 1);

  double lo = 0.0, hi = -300.0;
  auto widen = [&](double v) {
    if (v > 0 && std::isfinite(v)) {
      lo = std::min(lo, std::log10(v));
      hi = std::max(hi, std::log10(v));
    }
  };
  for (long i = 0; i < c.mse.rows(); ++i) {
    for (int k = 0; k < c.mse.cols(); ++k) widen(c.mse(i, k));
    widen(c.ref_mse(i));
  }
  cv.lo = std::floor(lo) - 0.5;
  cv.hi = std::ceil(hi) + 0.5;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
      "font-family=\"monospace\" font-size=\"12\">\n"
      "<rect x=\"70\" y=\"20\" width=\"700\" height=\"420\" fill=\"white\" "
      "stroke=\"black\"/>\n";

  for (int k = 0; k < c.mse.cols(); ++k)
    cv.polyline(c.mse.col(k), "stroke=\"steelblue\" stroke-width=\"1\" opacity=\"0.6\"");
  cv.polyline(c.ref_mse, "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"");
  if (env) {
    cv.polyline(env->bound_wc, "stroke=\"crimson\" stroke-width=\"1\"");
    cv.polyline(env->bound_we_sum, "stroke=\"darkorange\" stroke-width=\"1\"");
  }
  if (c.centroid_gap.size() > 0)
    cv.polyline(c.centroid_gap, "stroke=\"crimson\" stroke-width=\"1\" stroke-dasharray=\"2 2\"");
  if (c.residual_sum.size() > 0)
    cv.polyline(c.residual_sum, "stroke=\"darkorange\" stroke-width=\"1\" stroke-dasharray=\"2 2\"");

  svg += cv.body;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "<text x=\"8\" y=\"28\">1e%.0f</text>"
                "<text x=\"8\" y=\"440\">1e%.0f</text>"
                "<text x=\"70\" y=\"465\">0</text>"
                "<text x=\"720\" y=\"465\">%ld</text>\n",
                cv.hi, cv.lo, cv.max_iter);
  svg += buf;
  svg +=
      "<text x=\"350\" y=\"490\">iteration</text>\n"
      "<text x=\"600\" y=\"38\" fill=\"steelblue\">agent mse</text>\n"
      "<text x=\"600\" y=\"54\" fill=\"black\">reference</text>\n"
      "<text x=\"600\" y=\"70\" fill=\"crimson\">centroid gap / cap</text>\n"
      "<text x=\"600\" y=\"86\" fill=\"darkorange\">residual / cap</text>\n"
      "</svg>\n";
  return svg;
}

}  // namespace adaptnet::cli
