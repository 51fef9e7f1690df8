#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcl/experiments.hpp"
#include "qcl/runner.hpp"

using namespace qcl;

namespace {

ExperimentConfig small_census_config() {
  ExperimentConfig cfg = ExperimentConfig::defaults(
      Experiment::trap_census_generic);
  cfg.n_models = 2;
  cfg.n_runs_per_model = 2;
  cfg.dimension = 3;
  cfg.segments = 40;
  cfg.horizon = 5.0;
  cfg.h2_ratio = 0.1;
  cfg.success_threshold = 0.9;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("experiment names round-trip") {
  for (auto e : {Experiment::trap_census_heisenberg,
                 Experiment::trap_census_generic, Experiment::fluence_study,
                 Experiment::singular_census,
                 Experiment::singular_critical_search,
                 Experiment::system_e_study, Experiment::zero_field_start}) {
    const auto back = experiment_from_string(to_string(e));
    REQUIRE(back.has_value());
    CHECK(*back == e);
  }
  CHECK_FALSE(experiment_from_string("nope").has_value());
}

TEST_CASE("config serializes and parses back to itself") {
  for (auto e : {Experiment::trap_census_heisenberg,
                 Experiment::fluence_study, Experiment::system_e_study}) {
    ExperimentConfig cfg = ExperimentConfig::defaults(e);
    cfg.seed = 123456789;
    cfg.n_models = 7;
    cfg.h2_ratio = 0.037;
    cfg.output_path = "results/run1";
    cfg.threads = 3;
    cfg.confirm_traps = true;
    const ExperimentConfig parsed = ExperimentConfig::from_ini(cfg.to_ini());
    CHECK(parsed == cfg);
  }
}

TEST_CASE("config parser rejects malformed input") {
  CHECK_THROWS_AS(ExperimentConfig::from_ini("n_models = 3\n"),
                  std::invalid_argument);  // key outside a section
  CHECK_THROWS_AS(ExperimentConfig::from_ini("[unknown_thing]\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::from_ini("[fluence_study]\nbogus_key = 1\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::from_ini("[fluence_study]\nn_models = -2\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::from_ini("[fluence_study]\nhorizon = abc\n"),
      std::invalid_argument);

  // comments and blank lines are fine
  const ExperimentConfig cfg = ExperimentConfig::from_ini(
      "# census\n\n[trap_census_generic]\n; note\nn_models = 3\n");
  CHECK(cfg.n_models == 3);
}

TEST_CASE("runner: parallel path equals the serial reference") {
  std::vector<double> serial(200), parallel(200);
  auto work = [](int i) {
    double x = 0.0;
    for (int k = 1; k <= 50 + i; ++k) x += std::sin(static_cast<double>(k * i));
    return x;
  };
  run_indexed_serial(200, [&](int i) { serial[i] = work(i); });
  run_indexed(200, 0, [&](int i) { parallel[i] = work(i); });
  CHECK(serial == parallel);
}

TEST_CASE("runner: exceptions inside workers surface to the caller") {
  CHECK_THROWS_AS(
      run_indexed(8, 2,
                  [](int i) {
                    if (i == 5) throw std::runtime_error("boom");
                  }),
      std::runtime_error);
}

TEST_CASE("census rows are byte-identical across thread counts") {
  ExperimentConfig cfg = small_census_config();
  cfg.threads = 1;
  const ResultsTable serial = run_generic_census(cfg);
  cfg.threads = 2;
  const ResultsTable parallel = run_generic_census(cfg);
  const ResultsTable again = run_generic_census(cfg);

  CHECK(rows_to_csv(serial) == rows_to_csv(parallel));
  CHECK(rows_to_csv(parallel) == rows_to_csv(again));
  CHECK(serial.summary == parallel.summary);
}

TEST_CASE("summary fractions are recomputable from the emitted rows") {
  const ResultsTable table = run_generic_census(small_census_config());
  REQUIRE(table.rows.size() == 4);

  long converged = 0;
  for (const auto& row : table.rows) {
    REQUIRE(row.size() == table.header.size());
    if (row[2] == "1") ++converged;
  }
  const double expected = static_cast<double>(converged) / 4.0;
  CHECK(table.summary.at("convergence_fraction").get<double>() == expected);
}

TEST_CASE("write_results lays out the output directory") {
  namespace fs = std::filesystem;
  const ExperimentConfig cfg = small_census_config();
  const ResultsTable table = run_generic_census(cfg);
  const fs::path dir =
      fs::temp_directory_path() / "qcl_test_out" / "census";
  fs::remove_all(dir.parent_path());
  write_results(table, cfg, dir.string());

  REQUIRE(fs::exists(dir / "rows.csv"));
  REQUIRE(fs::exists(dir / "summary.json"));
  REQUIRE(fs::exists(dir / "config.json"));

  std::ifstream rows(dir / "rows.csv");
  std::string header;
  std::getline(rows, header);
  CHECK(header ==
        "model_id,run_id,success,final_fidelity,iterations,fluence_final");

  std::ifstream cfg_in(dir / "config.json");
  const auto echoed = nlohmann::json::parse(cfg_in);
  CHECK(echoed.at("experiment") == "trap_census_generic");
  CHECK(echoed.at("seed") == 99);
  fs::remove_all(dir.parent_path());
}

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, 2.5e-17, 123456.789, -0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("median_of") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median_of({}) == 0.0);
}
