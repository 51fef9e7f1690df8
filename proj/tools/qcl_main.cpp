// Command-line harness: one subcommand per experiment, a key = value config
// file per run, flags overriding file fields. Results land in
// <out>/rows.csv, <out>/summary.json and <out>/config.json.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qcl/experiments.hpp"

namespace {

struct Overrides {
  CLI::Option* opt(const std::string& name) const {
    return app->get_option(name);
  }
  CLI::App* app = nullptr;
  std::string config_path;
  int models = 0, runs = 0, dimension = 0, segments = 0, threads = 0;
  int max_tries = 0, ode_steps = 0;
  long max_iters = 0;
  double horizon = 0.0, ratio = 0.0, threshold = 0.0, step = 0.0;
  std::uint64_t seed = 0;
  std::string polarizability, out;
  bool confirm_traps = false;
};

void add_common_options(CLI::App* sub, Overrides& o) {
  o.app = sub;
  sub->add_option("--config", o.config_path,
                  "config file (single [experiment] section)");
  sub->add_option("--seed", o.seed, "root RNG seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--threads", o.threads,
                  "worker threads (0 = all hardware threads)");
  sub->add_option("--models", o.models, "number of models / tuples / seeds");
  sub->add_option("--runs", o.runs, "runs per model");
  sub->add_option("--dimension", o.dimension, "Hilbert space dimension");
  sub->add_option("--segments", o.segments, "control segments");
  sub->add_option("--horizon", o.horizon, "total evolution time");
  sub->add_option("--polarizability", o.polarizability,
                  "quadratic coupling: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--ratio", o.ratio, "|iH2| / |iH1| norm ratio");
  sub->add_option("--threshold", o.threshold, "success fidelity threshold");
  sub->add_option("--max-tries", o.max_tries,
                  "consecutive rejections before a stall verdict");
  sub->add_option("--max-iters", o.max_iters, "accepted-iteration budget");
  sub->add_option("--step", o.step, "fixed step size (0 = adaptive)");
  sub->add_option("--ode-steps", o.ode_steps,
                  "grid steps for singular trajectories");
  sub->add_flag("--confirm-traps", o.confirm_traps,
                "re-run failed ascents with a 10x smaller step");
}

void apply(const Overrides& o, qcl::ExperimentConfig& cfg) {
  if (o.opt("--seed")->count()) cfg.seed = o.seed;
  if (o.opt("--out")->count()) cfg.output_path = o.out;
  if (o.opt("--threads")->count()) cfg.threads = o.threads;
  if (o.opt("--models")->count()) cfg.n_models = o.models;
  if (o.opt("--runs")->count()) cfg.n_runs_per_model = o.runs;
  if (o.opt("--dimension")->count()) cfg.dimension = o.dimension;
  if (o.opt("--segments")->count()) cfg.segments = o.segments;
  if (o.opt("--horizon")->count()) cfg.horizon = o.horizon;
  if (o.opt("--polarizability")->count()) {
    cfg.polarizability = o.polarizability == "on";
  }
  if (o.opt("--ratio")->count()) cfg.h2_ratio = o.ratio;
  if (o.opt("--threshold")->count()) cfg.success_threshold = o.threshold;
  if (o.opt("--max-tries")->count()) cfg.max_tries = o.max_tries;
  if (o.opt("--max-iters")->count()) cfg.max_total_iterations = o.max_iters;
  if (o.opt("--step")->count()) cfg.step_size = o.step;
  if (o.opt("--ode-steps")->count()) cfg.ode_steps = o.ode_steps;
  if (o.opt("--confirm-traps")->count()) cfg.confirm_traps = true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qcl-lab: control-landscape experiments for n-level systems with a "
      "polarizability term"};
  app.require_subcommand(1);

  std::vector<std::pair<qcl::Experiment, Overrides>> subs;
  subs.reserve(7);
  for (auto e :
       {qcl::Experiment::trap_census_heisenberg,
        qcl::Experiment::trap_census_generic, qcl::Experiment::fluence_study,
        qcl::Experiment::singular_census,
        qcl::Experiment::singular_critical_search,
        qcl::Experiment::system_e_study, qcl::Experiment::zero_field_start}) {
    subs.emplace_back(e, Overrides{});
  }
  for (auto& [e, o] : subs) {
    CLI::App* sub = app.add_subcommand(qcl::to_string(e));
    add_common_options(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& [e, o] : subs) {
      if (!o.app->parsed()) continue;
      qcl::ExperimentConfig cfg = qcl::ExperimentConfig::defaults(e);
      if (!o.config_path.empty()) {
        cfg = qcl::ExperimentConfig::from_ini(read_file(o.config_path));
        if (cfg.experiment != e) {
          throw std::invalid_argument(
              "config file section does not match the subcommand");
        }
      }
      apply(o, cfg);
      cfg.validate();

      const qcl::ResultsTable table = qcl::run_experiment(cfg);
      qcl::write_results(table, cfg, cfg.output_path);
      std::cout << table.summary.dump(2) << "\n";
      std::cout << "wrote " << cfg.output_path << "/rows.csv ("
                << table.rows.size() << " rows)\n";
      return 0;
    }
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}
