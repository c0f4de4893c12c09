// Command-line front end: simulate / analyze / proptest.
//
// Exit codes: 0 success, 2 a verdict or property check failed, 1 any error
// (bad config, invalid arguments, divergence, numeric failure).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaptnet/analysis/property_suite.hpp"
#include "adaptnet/cli/config.hpp"
#include "adaptnet/cli/csvio.hpp"
#include "adaptnet/cli/jsonio.hpp"
#include "adaptnet/cli/pipeline.hpp"
#include "adaptnet/cli/svgplot.hpp"
#include "adaptnet/version.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int env_threads() {
  const char* v = std::getenv("ADAPTNET_THREADS");
  if (!v) return -1;
  try {
    return std::max(0, std::stoi(v));
  } catch (...) {
    return -1;
  }
}

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = -1;
};

adaptnet::cli::Config load_config(const CommonOpts& o) {
  adaptnet::cli::Config cfg = adaptnet::cli::Config::parse_file(o.config_path);
  for (const std::string& s : o.sets) cfg.apply_override(s);
  if (o.seed_given)
    cfg.apply_override("experiment.seed=" + std::to_string(o.seed));
  int th = o.threads >= 0 ? o.threads : env_threads();
  if (th >= 0) cfg.apply_override("experiment.threads=" + std::to_string(th));
  return cfg;
}

int cmd_simulate(const CommonOpts& o) {
  auto t0 = Clock::now();
  adaptnet::cli::Config cfg = load_config(o);
  const std::uint64_t digest = cfg.digest();

  adaptnet::cli::PipelineArtifacts art;
  try {
    art = adaptnet::cli::run_pipeline(cfg);
  } catch (const adaptnet::divergence_error& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    // Name the sufficient bound if the analysis half is still computable.
    try {
      auto setup = adaptnet::cli::build_setup(cfg);
      auto excfg = adaptnet::cli::build_experiment_config(cfg);
      auto bundle = adaptnet::cli::bundle_for(setup, excfg);
      std::cerr << "simulate: sufficient step-size bound for stable envelopes: "
                << bundle.mu_stab << " (configured mu_max = "
                << setup.steps.mu_max << ")\n";
    } catch (...) {
    }
    return 1;
  }
  double t_run = ms_since(t0);

  auto t1 = Clock::now();
  fs::create_directories(o.out_dir);
  const std::string csv_path = (fs::path(o.out_dir) / "curves.csv").string();
  const std::string json_path = (fs::path(o.out_dir) / "report.json").string();
  const std::string svg_path = (fs::path(o.out_dir) / "curves.svg").string();
  const std::string manifest_path =
      (fs::path(o.out_dir) / "manifest.json").string();

  const adaptnet::analysis::BoundEnvelopes* env =
      art.envelopes ? &*art.envelopes : nullptr;
  adaptnet::cli::write_text(csv_path, adaptnet::cli::curves_csv(art.curves, env));
  adaptnet::cli::write_text(json_path,
                            adaptnet::cli::report_json(art, digest).dump(2) + "\n");
  adaptnet::cli::write_text(svg_path, adaptnet::cli::curves_svg(art.curves, env));
  double t_write = ms_since(t1);

  adaptnet::cli::write_text(
      manifest_path,
      adaptnet::cli::manifest_json(digest, art.excfg.seed,
                                   {csv_path, json_path, svg_path},
                                   {{"pipeline", t_run}, {"write", t_write}})
              .dump(2) +
          "\n");

  for (const auto& row : art.verdicts.rows)
    std::cout << "verdict " << row.id << " [" << (row.pass ? "pass" : "FAIL")
              << "] " << row.name << ": " << row.detail << "\n";
  std::cout << (art.verdicts.all_pass ? "all verdicts passed"
                                      : "some verdicts failed")
            << "; outputs in " << o.out_dir << "\n";
  return art.verdicts.all_pass ? 0 : 2;
}

int cmd_analyze(const CommonOpts& o) {
  adaptnet::cli::Config cfg = load_config(o);
  auto setup = adaptnet::cli::build_setup(cfg);
  auto excfg = adaptnet::cli::build_experiment_config(cfg);
  auto bundle = adaptnet::cli::bundle_for(setup, excfg);
  std::cout << adaptnet::cli::bundle_json(setup, bundle).dump(2) << "\n";
  return 0;
}

int cmd_proptest(long instances, int max_n, int max_m, std::uint64_t seed,
                 int threads, const std::string& corrupt) {
  if (instances == 0) {
    std::cerr << "proptest: nothing tested (zero instances requested)\n";
    return 1;
  }
  adaptnet::analysis::PropertySuiteOptions opts;
  opts.instances = instances;
  opts.max_n = max_n;
  opts.max_m = max_m;
  opts.seed = seed;
  opts.threads = threads >= 0 ? threads : std::max(0, env_threads());
  opts.corrupt = corrupt;
  auto report = adaptnet::analysis::operator_property_suite(opts);
  constexpr double tol = 1e-9;
  bool pass = true;
  for (const auto& r : report.results) {
    bool ok = r.max_violation <= tol;
    pass = pass && ok;
    std::cout << (ok ? "ok   " : "FAIL ") << r.name << ": max violation "
              << r.max_violation << " over " << r.instances
              << " instances (worst seed " << r.worst_seed << ")\n";
  }
  std::cout << (pass ? "all properties hold" : "property violations found")
            << "\n";
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-network simulation and bound-checking toolkit"};
  app.set_version_flag("--version", adaptnet::kVersion);
  app.require_subcommand(1);

  CommonOpts sim_o, ana_o;

  auto add_common = [](CLI::App* sub, CommonOpts& o, bool with_out) {
    sub->add_option("--config", o.config_path, "configuration file")->required();
    sub->add_option("--set", o.sets,
                    "override key=value (dotted or bare keys); repeatable");
    if (with_out) sub->add_option("--out", o.out_dir, "output directory");
    auto* seed_opt = sub->add_option("--seed", o.seed, "master seed override");
    sub->callback([&o, seed_opt] { o.seed_given = seed_opt->count() > 0; });
    sub->add_option("--threads", o.threads, "worker threads (0 = auto)");
  };

  CLI::App* sim = app.add_subcommand("simulate",
                                     "run the experiment pipeline and write "
                                     "curves, report, manifest and plot");
  add_common(sim, sim_o, true);

  CLI::App* ana = app.add_subcommand(
      "analyze", "print the closed-form analysis bundle as JSON (no simulation)");
  add_common(ana, ana_o, false);

  long pt_instances = 200;
  int pt_max_n = 8, pt_max_m = 4, pt_threads = -1;
  std::uint64_t pt_seed = 2026;
  std::string pt_corrupt;
  CLI::App* pt = app.add_subcommand(
      "proptest", "randomized checks of the energy-operator algebra");
  pt->add_option("--instances", pt_instances, "instances per property");
  pt->add_option("--max-n", pt_max_n, "largest network size");
  pt->add_option("--max-m", pt_max_m, "largest parameter dimension");
  pt->add_option("--prop-seed", pt_seed, "suite seed");
  pt->add_option("--threads", pt_threads, "worker threads (0 = auto)");
  pt->add_option("--corrupt", pt_corrupt,
                 "sabotage one property by name (self-test hook)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_o);
    if (ana->parsed()) return cmd_analyze(ana_o);
    if (pt->parsed())
      return cmd_proptest(pt_instances, pt_max_n, pt_max_m, pt_seed, pt_threads,
                          pt_corrupt);
  } catch (const adaptnet::divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const adaptnet::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const adaptnet::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
