#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adaptnet/analysis/envelopes.hpp"
#include "adaptnet/analysis/theory.hpp"
#include "adaptnet/analysis/transform.hpp"
#include "adaptnet/cli/config.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/experiments/compare.hpp"
#include "adaptnet/experiments/experiment.hpp"
#include "adaptnet/experiments/phases.hpp"
#include "adaptnet/models/regularity.hpp"
#include "adaptnet/network/combine.hpp"
#include "adaptnet/network/policy.hpp"
#include "adaptnet/network/spectral.hpp"
#include "adaptnet/network/stepsize.hpp"
#include "adaptnet/network/topology.hpp"
#include "adaptnet/strategies/limit_point.hpp"

namespace adaptnet::cli {

inline network::TopologyKind topology_kind(const Config& cfg) {
  std::string k = cfg.get_string("topology.kind", "ring");
  if (k == "ring") return network::TopologyKind::ring;
  if (k == "complete") return network::TopologyKind::complete;
  if (k == "random_geometric") return network::TopologyKind::random_geometric;
  if (k == "explicit") return network::TopologyKind::explicit_adjacency;
  throw validation_error(cfg.origin() + ": unknown topology kind '" + k + "'");
}

inline network::PolicyRule policy_rule(const Config& cfg) {
  std::string r = cfg.get_string("policy.rule", "metropolis");
  if (r == "uniform_averaging") return network::PolicyRule::uniform_averaging;
  if (r == "metropolis") return network::PolicyRule::metropolis;
  if (r == "relative_degree") return network::PolicyRule::relative_degree;
  if (r == "identity") return network::PolicyRule::identity;
  if (r == "explicit") return network::PolicyRule::explicit_matrix;
  throw validation_error(cfg.origin() + ": unknown policy rule '" + r + "'");
}

inline strategies::StrategyKind strategy_kind(const Config& cfg) {
  std::string k = cfg.get_string("strategy.kind", "atc");
  if (k == "atc") return strategies::StrategyKind::atc;
  if (k == "cta") return strategies::StrategyKind::cta;
  if (k == "consensus") return strategies::StrategyKind::consensus;
  if (k == "general") return strategies::StrategyKind::general;
  throw validation_error(cfg.origin() + ": unknown strategy kind '" + k + "'");
}

inline models::AgentModel build_model(const Config& cfg, int n) {
  std::string kind = cfg.get_string("model.kind", "quadratic_lms");
  const int m = static_cast<int>(cfg.get_long("model.dim", 1));
  if (m < 1) throw validation_error(cfg.origin() + ": model.dim must be >= 1");

  auto agent_matrix = [&](int k) -> Eigen::MatrixXd {
    std::string per = "model.r_diag." + std::to_string(k);
    if (cfg.has(per)) {
      Eigen::VectorXd d = cfg.get_vector(per);
      if (d.size() != m)
        throw validation_error(cfg.origin() + ": " + per + " has wrong length");
      return d.asDiagonal();
    }
    std::string full = "model.r." + std::to_string(k);
    if (cfg.has(full)) return cfg.get_matrix(full);
    if (cfg.has("model.r")) return cfg.get_matrix("model.r");
    if (cfg.has("model.r_diag")) {
      Eigen::VectorXd d = cfg.get_vector("model.r_diag");
      if (d.size() != m)
        throw validation_error(cfg.origin() + ": model.r_diag has wrong length");
      return d.asDiagonal();
    }
    return Eigen::MatrixXd::Identity(m, m);
  };
  auto agent_minimizer = [&](int k) -> Eigen::VectorXd {
    std::string per = "model.minimizer." + std::to_string(k);
    if (cfg.has(per)) {
      Eigen::VectorXd v = cfg.get_vector(per);
      if (v.size() != m)
        throw validation_error(cfg.origin() + ": " + per + " has wrong length");
      return v;
    }
    if (cfg.has("model.minimizer")) {
      Eigen::VectorXd v = cfg.get_vector("model.minimizer");
      if (v.size() != m)
        throw validation_error(cfg.origin() + ": model.minimizer has wrong length");
      return v;
    }
    return Eigen::VectorXd::Zero(m);
  };
  auto agent_noise = [&](int k) -> double {
    std::string per = "model.noise_var." + std::to_string(k);
    if (cfg.has(per)) return cfg.get_double(per, 0.0);
    return cfg.get_double("model.noise_var", 0.1);
  };

  std::vector<Eigen::MatrixXd> rs;
  std::vector<Eigen::VectorXd> mins;
  std::vector<double> nvars;
  for (int k = 0; k < n; ++k) {
    rs.push_back(agent_matrix(k));
    mins.push_back(agent_minimizer(k));
    nvars.push_back(agent_noise(k));
  }
  if (kind == "quadratic_lms")
    return models::make_quadratic_model(rs, mins, nvars);
  if (kind == "custom_deterministic")
    return models::make_custom_model(rs, mins);
  throw validation_error(cfg.origin() + ": unknown model kind '" + kind + "'");
}

inline experiments::ExperimentSetup build_setup(const Config& cfg) {
  experiments::ExperimentSetup s;

  const int n = static_cast<int>(cfg.get_long("topology.n_agents", 0));
  if (n < 1)
    throw validation_error(cfg.origin() + ": topology.n_agents must be >= 1");
  network::TopologyParams tp;
  tp.radius = cfg.get_double("topology.radius", 0.4);
  if (cfg.has("topology.adjacency")) {
    Eigen::MatrixXd a = cfg.get_matrix("topology.adjacency");
    tp.adjacency.resize(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) tp.adjacency(r, c) = a(r, c) != 0.0;
  }
  network::Topology topo = network::build_topology(
      topology_kind(cfg), n, tp, cfg.get_u64("topology.seed", 0));

  Eigen::MatrixXd weights_mat;
  const Eigen::MatrixXd* wm = nullptr;
  if (policy_rule(cfg) == network::PolicyRule::explicit_matrix) {
    weights_mat = cfg.get_matrix("policy.weights");
    wm = &weights_mat;
  }
  Eigen::MatrixXd a = network::make_policy(topo, policy_rule(cfg), wm);

  s.kind = strategy_kind(cfg);
  if (s.kind == strategies::StrategyKind::general) {
    auto stage = [&](const char* key) -> Eigen::MatrixXd {
      std::string sel = cfg.get_string(key, "identity");
      if (sel == "identity") return Eigen::MatrixXd::Identity(n, n);
      if (sel == "policy") return a;
      throw validation_error(cfg.origin() + ": " + key +
                             " must be 'identity' or 'policy'");
    };
    s.matrices =
        network::compose(stage("strategy.a1"), stage("strategy.a0"),
                         stage("strategy.a2"));
  } else {
    s.matrices = strategies::specialize(s.kind, a);
  }

  network::PrimitivityReport prim = network::check_primitive(s.matrices.product);
  if (!prim.primitive)
    throw validation_error(
        cfg.origin() +
        ": combination matrix is not primitive; pick a policy with "
        "self-loops on a connected topology");
  s.split = network::spectral_split(s.matrices.product);

  double mu_max = cfg.require_double("strategy.mu_max");
  Eigen::VectorXd beta = cfg.has("strategy.beta")
                             ? cfg.get_vector("strategy.beta")
                             : Eigen::VectorXd::Ones(n);
  if (beta.size() != n)
    throw validation_error(cfg.origin() + ": strategy.beta has wrong length");
  s.steps = network::make_steps(mu_max, beta);
  s.weights = network::weight_vectors(s.matrices.a2, s.split.theta, s.steps);

  s.model = build_model(cfg, n);

  models::NoiseFitOptions nf;
  nf.sample_budget = cfg.get_long("model.sample_budget", 4000);
  nf.probe_radius = cfg.get_double("model.probe_radius", 0.0);
  nf.seed = cfg.get_u64("model.noise_fit_seed", 0x6e6f6973ULL);
  s.consts = models::regularity_constants(s.model, s.weights.p, nf);

  s.w_o = strategies::limit_point(s.model, s.weights.p, s.consts);
  return s;
}

inline experiments::ExperimentConfig build_experiment_config(const Config& cfg) {
  experiments::ExperimentConfig e;
  e.horizon = cfg.get_long("experiment.horizon", 0);
  e.trials = cfg.get_long("experiment.trials", 100);
  std::string init = cfg.get_string("experiment.init", "common_zero");
  if (init == "common_zero") {
    e.init = experiments::InitKind::common_zero;
  } else if (init == "dispersed") {
    e.init = experiments::InitKind::dispersed;
  } else {
    throw validation_error(cfg.origin() + ": unknown experiment.init '" + init +
                           "'");
  }
  e.init_spread = cfg.get_double("experiment.init_spread", 1.0);
  e.init_seed = cfg.get_u64("experiment.init_seed", 1);
  e.seed = cfg.get_u64("experiment.seed", 0);
  e.threads = static_cast<int>(cfg.get_long("experiment.threads", 0));
  return e;
}

struct PipelineArtifacts {
  experiments::ExperimentSetup setup;
  experiments::ExperimentConfig excfg;
  analysis::TheoryBundle bundle;
  std::optional<analysis::BoundEnvelopes> envelopes;
  experiments::LearningCurves curves;
  experiments::PhaseReport phases;
  experiments::ComparisonReport verdicts;
  std::optional<double> steady_half;
};

inline analysis::TheoryBundle bundle_for(const experiments::ExperimentSetup& s,
                                         const experiments::ExperimentConfig& e) {
  Eigen::MatrixXd w0 = experiments::make_initial_state(s, e);
  Eigen::VectorXd w_c0 = w0 * s.split.theta;
  return analysis::theory_bundle(s.split, s.matrices, s.steps, s.weights.p,
                                 s.consts, s.model, s.w_o, w_c0);
}

inline PipelineArtifacts run_pipeline(const Config& cfg) {
  PipelineArtifacts art;
  art.setup = build_setup(cfg);
  art.excfg = build_experiment_config(cfg);
  if (art.excfg.horizon <= 0)
    art.excfg.horizon = experiments::default_horizon(art.setup);

  art.bundle = bundle_for(art.setup, art.excfg);

  Eigen::MatrixXd w0 = experiments::make_initial_state(art.setup, art.excfg);
  Eigen::VectorXd w_e0 =
      art.setup.split.n > 1
          ? analysis::energy(
                analysis::transform(w0, art.setup.split).w_e,
                art.setup.model.dim)
          : Eigen::VectorXd();
  try {
    art.envelopes.emplace(
        analysis::bound_envelopes(art.bundle, w_e0, art.excfg.horizon));
  } catch (const validation_error&) {
    art.envelopes.reset();
  }

  art.curves = experiments::run_experiment(art.setup, art.excfg);
  art.phases = experiments::detect_phases(art.curves, art.bundle);

  if (cfg.get_bool("experiment.scaling_check", true)) {
    experiments::ExperimentSetup half = art.setup;
    half.steps = network::make_steps(art.setup.steps.mu_max / 2.0,
                                     art.setup.steps.beta);
    half.weights =
        network::weight_vectors(half.matrices.a2, half.split.theta, half.steps);
    experiments::ExperimentConfig hcfg = art.excfg;
    hcfg.horizon = art.excfg.horizon * 2;
    experiments::LearningCurves hcurves = experiments::run_experiment(half, hcfg);
    const long rows = hcurves.mse.rows();
    const long tail = std::max<long>(1, (rows + 9) / 10);
    art.steady_half =
        hcurves.mse.bottomRows(tail).colwise().mean().mean();
  }

  art.verdicts = experiments::compare_to_theory(
      art.phases, art.curves, art.bundle,
      art.envelopes ? &*art.envelopes : nullptr,
      art.steady_half ? &*art.steady_half : nullptr);
  return art;
}

}  // namespace adaptnet::cli
