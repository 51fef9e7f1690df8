// Compares the serial reference runner against the OpenMP runner on a small
// census workload and checks that both produce identical rows.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>

#include "qcl/experiments.hpp"
#include "qcl/runner.hpp"

namespace {

double timed_run(qcl::ExperimentConfig cfg, int threads,
                 qcl::ResultsTable& out) {
  cfg.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  out = qcl::run_generic_census(cfg);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcl-bench: serial reference vs OpenMP runner"};
  int models = 6, runs = 2, segments = 60, dimension = 3, threads = 0;
  app.add_option("--models", models, "census models");
  app.add_option("--runs", runs, "runs per model");
  app.add_option("--segments", segments, "control segments");
  app.add_option("--dimension", dimension, "Hilbert space dimension");
  app.add_option("--threads", threads, "parallel thread count (0 = all)");
  CLI11_PARSE(app, argc, argv);

  qcl::ExperimentConfig cfg =
      qcl::ExperimentConfig::defaults(qcl::Experiment::trap_census_generic);
  cfg.n_models = models;
  cfg.n_runs_per_model = runs;
  cfg.segments = segments;
  cfg.dimension = dimension;
  cfg.horizon = 5.0;
  cfg.success_threshold = 0.9;
  cfg.seed = 7;

  const int nthreads = threads > 0 ? threads : qcl::hardware_threads();
  std::printf("workload: %d models x %d runs, %d segments, n = %d\n", models,
              runs, segments, dimension);

  qcl::ResultsTable serial, parallel;
  const double t_serial = timed_run(cfg, 1, serial);
  std::printf("serial reference : %8.3f s\n", t_serial);
  const double t_parallel = timed_run(cfg, nthreads, parallel);
  std::printf("openmp x%-8d : %8.3f s  (speedup %.2fx)\n", nthreads,
              t_parallel, t_serial / t_parallel);

  const bool identical =
      qcl::rows_to_csv(serial) == qcl::rows_to_csv(parallel);
  std::printf("rows identical   : %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
