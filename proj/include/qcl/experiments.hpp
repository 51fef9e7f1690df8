#pragma once

#include "qcl/config.hpp"
#include "qcl/results.hpp"

namespace qcl {

// Seeded, thread-count-invariant experiment drivers. Rows come out sorted by
// (model_id, run_id); every run derives its own RNG stream from the root
// seed, so re-runs with the same config are byte-identical.
ResultsTable run_trap_census(const ExperimentConfig& config);
ResultsTable run_generic_census(const ExperimentConfig& config);
ResultsTable run_fluence_study(const ExperimentConfig& config);
ResultsTable run_singular_census(const ExperimentConfig& config);
ResultsTable run_singular_critical_search(const ExperimentConfig& config);
ResultsTable run_system_e_study(const ExperimentConfig& config);

ResultsTable run_experiment(const ExperimentConfig& config);

}  // namespace qcl
