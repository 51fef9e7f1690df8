#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qcl {

enum class Experiment {
  trap_census_heisenberg,
  trap_census_generic,
  fluence_study,
  singular_census,
  singular_critical_search,
  system_e_study,
  zero_field_start,
};

const char* to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& name);

// One config drives every experiment; unused knobs are ignored by the ones
// that do not need them. Serializes to a single [experiment] section of
// key = value pairs and back.
struct ExperimentConfig {
  Experiment experiment = Experiment::trap_census_generic;
  int n_models = 20;
  int n_runs_per_model = 20;
  std::uint64_t seed = 1;
  int dimension = 4;
  int segments = 500;
  double horizon = 10.0;
  bool polarizability = true;
  double h2_ratio = 0.1;
  std::string output_path = "out";
  int threads = 1;

  double success_threshold = 0.95;
  int max_tries = 1000;
  long max_total_iterations = 200000;
  double step_size = 0.0;  // 0 = adaptive
  int ode_steps = 2000;
  bool confirm_traps = false;

  // throws std::invalid_argument on a bad combination
  void validate() const;

  std::string to_ini() const;
  static ExperimentConfig from_ini(const std::string& text);

  // defaults tuned per experiment (segment counts, thresholds, horizons)
  static ExperimentConfig defaults(Experiment e);

  bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace qcl
