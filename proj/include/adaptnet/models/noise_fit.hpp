#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "adaptnet/errors.hpp"
#include "adaptnet/models/model.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet::models {

struct NoiseConstants {
  double alpha = 0.0;
  double sigma_v2 = 0.0;
};

namespace detail {

// 8 seeded random unit directions followed by the coordinate axes; the axes
// catch eigen-aligned growth the random draws can miss at small dim.
inline Eigen::VectorXd probe_direction(int dim, std::uint64_t seed, int agent,
                                       int dir) {
  if (dir >= 8) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(dir - 8) = 1.0;
    return v;
  }
  RngStream rng = RngStream::derive(
      seed, tag::noise_fit, (static_cast<std::uint64_t>(agent) << 20) |
                                static_cast<std::uint64_t>(dir));
  Eigen::VectorXd v(dim);
  for (;;) {
    for (int j = 0; j < dim; ++j) v(j) = rng.gauss();
    double n = v.norm();
    if (n > 1e-3) return v / n;
  }
}

inline double empirical_excess(const AgentModel& model, int k,
                               const Eigen::VectorXd& w, long samples,
                               RngStream& rng) {
  Eigen::VectorXd mean_map = true_update(model, k, w);
  double acc = 0.0;
  for (long s = 0; s < samples; ++s)
    acc += (stochastic_update(model, k, w, rng) - mean_map).squaredNorm();
  return acc / static_cast<double>(samples);
}

}  // namespace detail

// Fits (alpha, sigma_v2) so that the measured conditional second moment of the
// update perturbation stays under alpha * ||w - minimizer_k||^2 + sigma_v2 at
// every probe point; distances are taken from each agent's own minimizer, the
// point where that agent's exact update vanishes, which is the form the
// closed-form constants consume. sigma_v2 is fitted at the minimizers
// themselves; alpha on spheres around each minimizer whose radii are the
// powers of two inside [1, probe_radius]. Sub-unit spheres are deliberately
// excluded: the slope of a quadratic envelope is radius-independent, while
// the sampling noise of (excess - sigma) / radius^2 grows like 1/radius^2.
// Each (agent, direction, radius-exponent) triple owns its own derived
// stream, so doubling probe_radius only appends new spheres and never
// reshuffles existing measurements: the fitted alpha is monotone in the
// radius by construction.
inline NoiseConstants estimate_noise_constants(const AgentModel& model,
                                               long sample_budget,
                                               double probe_radius,
                                               std::uint64_t seed = 0x6e6f6973ULL) {
  if (sample_budget < 1000)
    throw validation_error(
        "noise fit: sample budget below 1000 is too noisy to trust");
  if (!(probe_radius > 0))
    throw validation_error("noise fit: probe radius must be positive");
  if (model.kind != ModelKind::quadratic_lms) return {0.0, 0.0};

  const int n_dirs = 8 + model.dim;
  constexpr int kMinExp = 0;  // smallest sphere radius 1
  const int max_exp =
      std::max(kMinExp, static_cast<int>(std::floor(std::log2(probe_radius))));

  Eigen::VectorXd sigma_k(model.n_agents());
  for (int k = 0; k < model.n_agents(); ++k) {
    RngStream rng = RngStream::derive(seed, tag::noise_fit,
                                      0xFFFF0000ULL + static_cast<std::uint64_t>(k));
    sigma_k(k) = detail::empirical_excess(model, k, model.agents[k].minimizer,
                                          sample_budget, rng);
  }
  double sigma_hat = sigma_k.maxCoeff();

  // Each agent's baseline is subtracted before dividing by the squared radius,
  // so a quiet agent's slope is not polluted by a noisy neighbour's floor.
  double alpha_hat = 0.0;
  for (int k = 0; k < model.n_agents(); ++k) {
    for (int d = 0; d < n_dirs; ++d) {
      Eigen::VectorXd dir = detail::probe_direction(model.dim, seed, k, d);
      for (int e = kMinExp; e <= max_exp; ++e) {
        double radius = std::ldexp(1.0, e);
        RngStream rng = RngStream::derive(
            seed, tag::noise_fit,
            (static_cast<std::uint64_t>(k) << 40) |
                (static_cast<std::uint64_t>(d) << 32) |
                static_cast<std::uint64_t>(static_cast<std::uint32_t>(e + 64)));
        double excess = detail::empirical_excess(
            model, k, model.agents[k].minimizer + radius * dir, sample_budget,
            rng);
        alpha_hat = std::max(alpha_hat, (excess - sigma_k(k)) / (radius * radius));
      }
    }
  }

  // 1.5x headroom so the fitted pair stays an upper bound on fresh draws.
  return {1.5 * alpha_hat, 1.5 * sigma_hat};
}

}  // namespace adaptnet::models
