#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "adaptnet/cli/pipeline.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/version.hpp"

namespace adaptnet::cli {

using nlohmann::json;

namespace detail {

inline json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int j = 0; j < v.size(); ++j) {
    // non-finite values have no JSON number form; null keeps the slot visible
    if (std::isfinite(v(j))) a.push_back(v(j));
    else a.push_back(nullptr);
  }
  return a;
}

inline json num_json(double v) {
  if (std::isfinite(v)) return json(v);
  return json(nullptr);
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace detail

inline json bundle_json(const experiments::ExperimentSetup& s,
                        const analysis::TheoryBundle& b) {
  json j;
  j["schema"] = kSchema;
  j["kind"] = "analysis";
  j["version"] = kVersion;
  j["network"] = {
      {"n_agents", b.n},
      {"lambda2", b.lambda2},
      {"theta", detail::vec_json(s.split.theta)},
      {"pi", detail::vec_json(s.weights.pi)},
      {"p", detail::vec_json(s.weights.p)},
      {"p_l1", b.p_l1},
  };
  j["model"] = {
      {"dim", b.m},
      {"lambda_u", b.lambda_u},
      {"lambda_l", b.lambda_l},
      {"alpha", b.alpha},
      {"sigma_v2", b.sigma_v2},
  };
  j["limit_point"] = detail::vec_json(s.w_o);
  j["step"] = {
      {"mu_max", b.mu_max},
      {"mu_stab", detail::num_json(b.mu_stab)},
      {"gamma_c", b.gamma_c},
      {"rho_gamma", b.rho_gamma},
      {"stable", b.gamma_stable},
  };
  j["rates"] = {
      {"phase1", b.rate_phase1},
      {"phase2", b.rate_phase2},
      {"correction", b.rate_correction},
      {"epsilon", b.rate_epsilon},
      {"ref_lb", b.ref_rate_lb},
      {"ref_ub", b.ref_rate_ub},
  };
  j["constants"] = {
      {"psi0", b.psi0},
      {"h_c_mu", b.h_c_mu},
      {"h_c_0", b.h_c_0},
      {"b_vc", b.b_vc},
      {"b_ve", b.b_ve},
      {"norm_first_stage", b.norm_first_stage},
      {"norm_last_stage", b.norm_last_stage},
      {"g_o", detail::vec_json(b.g_o)},
      {"u_row_norms", detail::vec_json(b.u_row_norms)},
      {"w_tilde_c0", b.w_tilde_c0},
  };
  return j;
}

inline json report_json(const PipelineArtifacts& art, std::uint64_t digest) {
  json j;
  j["schema"] = kSchema;
  j["kind"] = "report";
  j["version"] = kVersion;
  j["config_digest"] = detail::hex64(digest);
  j["seed"] = art.excfg.seed;
  j["experiment"] = {
      {"horizon", art.curves.horizon},
      {"trials", art.curves.trials},
      {"init", art.excfg.init == experiments::InitKind::common_zero
                   ? "common_zero"
                   : "dispersed"},
      {"scaling_check", art.steady_half.has_value()},
  };
  j["analysis"] = bundle_json(art.setup, art.bundle);
  j["phases"] = {
      {"phase1_end", art.phases.phase1_end},
      {"phase2_end", art.phases.phase2_end},
      {"fitted_rate_phase1", detail::num_json(art.phases.fitted_rate_phase1)},
      {"fitted_rate_phase2", detail::num_json(art.phases.fitted_rate_phase2)},
      {"r2_phase1", art.phases.r2_phase1},
      {"r2_phase2", art.phases.r2_phase2},
      {"predicted_rate_phase1", art.phases.predicted_rate_phase1},
      {"predicted_rate_phase2", art.phases.predicted_rate_phase2},
      {"steady_state_mse", detail::vec_json(art.phases.steady_state_mse)},
      {"steady_state_mse_mean", art.phases.steady_state_mse_mean},
      {"steady_residual_sum", art.phases.steady_residual_sum},
      {"predicted_steady_mse", detail::vec_json(art.phases.predicted_steady_mse)},
  };
  json rows = json::array();
  for (const auto& r : art.verdicts.rows)
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"detail", r.detail}});
  j["verdicts"] = rows;
  j["all_pass"] = art.verdicts.all_pass;
  if (art.steady_half) j["steady_mse_half_step"] = *art.steady_half;
  return j;
}

// Timings vary run to run, so the manifest is exempt from the byte-identical
// guarantee the data artifacts carry.
inline json manifest_json(std::uint64_t digest, std::uint64_t seed,
                          const std::vector<std::string>& outputs,
                          const std::vector<std::pair<std::string, double>>&
                              timings_ms) {
  json j;
  j["schema"] = kSchema;
  j["kind"] = "manifest";
  j["version"] = kVersion;
  j["config_digest"] = detail::hex64(digest);
  j["seed"] = seed;
  j["outputs"] = outputs;
  json t = json::object();
  for (const auto& [name, ms] : timings_ms) t[name] = ms;
  j["timings_ms"] = t;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw validation_error("short write to '" + path + "'");
}

}  // namespace adaptnet::cli
