#include "qcl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qcl/landscape.hpp"
#include "qcl/models.hpp"
#include "qcl/rng.hpp"
#include "qcl/runner.hpp"
#include "qcl/singular.hpp"

namespace qcl {

namespace {

AscentConfig ascent_from(const ExperimentConfig& cfg) {
  AscentConfig a;
  a.max_tries = cfg.max_tries;
  a.success_threshold = cfg.success_threshold;
  a.max_total_iterations = cfg.max_total_iterations;
  a.step_size = cfg.step_size;
  a.segments = cfg.segments;
  a.horizon = cfg.horizon;
  a.record_traces = false;
  return a;
}

ControlField scaled_sphere_field(int segments, double horizon, double norm,
                                 RandomStream& rng) {
  auto dir = rng.sphere_vector(segments);
  for (auto& x : dir) x *= norm;
  return ControlField(std::move(dir), horizon);
}

// Failed run restarted from its final field with the step reduced 10x; only
// a second failure confirms the trap verdict.
bool confirm_trap(const HamiltonianModel& model, const GoalGate& goal,
                  AscentConfig cfg, const RunRecord& failed,
                  std::uint64_t seed) {
  cfg.rng_seed = seed;
  if (cfg.step_size > 0.0) {
    cfg.step_size *= 0.1;
  } else {
    cfg.step_rel *= 0.1;
    cfg.step_floor *= 0.1;
  }
  const RunRecord retry =
      randomized_ascent(model, goal, cfg, &*failed.final_field);
  return !retry.success;
}

struct CensusUnit {
  bool success = false;
  double final_fidelity = 0.0;
  long iterations = 0;
  double fluence_final = 0.0;
  int confirmed = -1;  // -1: not checked
};

}  // namespace

ResultsTable run_trap_census(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_models = cfg.n_models;
  const int n_runs = cfg.n_runs_per_model;

  struct ModelEntry {
    HamiltonianModel model;
    GoalGate goal;
  };
  std::vector<ModelEntry> models;
  models.reserve(n_models);
  for (int m = 0; m < n_models; ++m) {
    const auto params =
        random_heisenberg_params(derive_stream(cfg.seed, 0x10, m));
    HamiltonianModel base = heisenberg_model(params);
    if (cfg.polarizability) {
      const double norm = cfg.h2_ratio * base.dipole().norm();
      base = with_polarizability(base, derive_stream(cfg.seed, 0x11, m), norm);
    }
    models.push_back(ModelEntry{
        std::move(base),
        GoalGate::special(
            random_unitary_goal(4, derive_stream(cfg.seed, 0x12, m)))});
  }

  const AscentConfig acfg = ascent_from(cfg);
  const int total = n_models * n_runs;
  std::vector<CensusUnit> units(total);
  run_indexed(total, cfg.threads, [&](int idx) {
    const int m = idx / n_runs;
    const int r = idx % n_runs;
    AscentConfig run_cfg = acfg;
    run_cfg.rng_seed = derive_stream(cfg.seed, 0x13, m, r);
    const RunRecord rec =
        randomized_ascent(models[m].model, models[m].goal, run_cfg);
    CensusUnit& u = units[idx];
    u.success = rec.success;
    u.final_fidelity = rec.final_fidelity;
    u.iterations = rec.iterations;
    u.fluence_final = rec.final_field->norm();
    if (!rec.success && cfg.confirm_traps) {
      u.confirmed = confirm_trap(models[m].model, models[m].goal, acfg, rec,
                                 derive_stream(cfg.seed, 0x14, m, r))
                        ? 1
                        : 0;
    }
  });

  ResultsTable table;
  table.header = {"model_id",   "run_id",         "success",
                  "final_fidelity", "iterations", "fluence_final",
                  "confirmed_trap"};
  int models_all_converged = 0;
  int imperfect_models = 0;
  long failed_runs_in_imperfect = 0;
  for (int m = 0; m < n_models; ++m) {
    int failures = 0;
    for (int r = 0; r < n_runs; ++r) {
      const CensusUnit& u = units[m * n_runs + r];
      if (!u.success) ++failures;
      table.rows.push_back({std::to_string(m), std::to_string(r),
                            format_bool(u.success),
                            format_double(u.final_fidelity),
                            std::to_string(u.iterations),
                            format_double(u.fluence_final),
                            std::to_string(u.confirmed)});
    }
    if (failures == 0) {
      ++models_all_converged;
    } else {
      ++imperfect_models;
      failed_runs_in_imperfect += failures;
    }
  }
  const double frac_all =
      static_cast<double>(models_all_converged) / n_models;
  const double failed_frac =
      imperfect_models > 0
          ? static_cast<double>(failed_runs_in_imperfect) /
                (static_cast<double>(imperfect_models) * n_runs)
          : 0.0;
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"models", n_models},
      {"runs_per_model", n_runs},
      {"polarizability", cfg.polarizability ? "on" : "off"},
      {"fraction_models_all_converged", frac_all},
      {"imperfect_models", imperfect_models},
      {"failed_fraction_among_imperfect", failed_frac},
  };
  return table;
}

ResultsTable run_generic_census(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool zero_start = cfg.experiment == Experiment::zero_field_start;
  const int n_models = cfg.n_models;
  const int n_runs = cfg.n_runs_per_model;

  std::vector<RandomTuple> tuples;
  tuples.reserve(n_models);
  for (int m = 0; m < n_models; ++m) {
    tuples.push_back(random_tuple(
        cfg.dimension, derive_stream(cfg.seed, 0x20, m), 1.0, 1.0,
        cfg.polarizability ? std::optional<double>(cfg.h2_ratio)
                           : std::nullopt));
  }

  const AscentConfig acfg = ascent_from(cfg);
  const int total = n_models * n_runs;
  std::vector<CensusUnit> units(total);
  run_indexed(total, cfg.threads, [&](int idx) {
    const int m = idx / n_runs;
    const int r = idx % n_runs;
    AscentConfig run_cfg = acfg;
    run_cfg.rng_seed = derive_stream(cfg.seed, 0x21, m, r);
    RunRecord rec;
    if (zero_start) {
      const ControlField zeros =
          ControlField::zeros(cfg.segments, cfg.horizon);
      rec = randomized_ascent(tuples[m].model, tuples[m].goal, run_cfg,
                              &zeros);
    } else {
      rec = randomized_ascent(tuples[m].model, tuples[m].goal, run_cfg);
    }
    CensusUnit& u = units[idx];
    u.success = rec.success;
    u.final_fidelity = rec.final_fidelity;
    u.iterations = rec.iterations;
    u.fluence_final = rec.final_field->norm();
  });

  ResultsTable table;
  table.header = {"model_id",       "run_id",     "success",
                  "final_fidelity", "iterations", "fluence_final"};
  long converged = 0;
  for (int idx = 0; idx < total; ++idx) {
    const CensusUnit& u = units[idx];
    if (u.success) ++converged;
    table.rows.push_back(
        {std::to_string(idx / n_runs), std::to_string(idx % n_runs),
         format_bool(u.success), format_double(u.final_fidelity),
         std::to_string(u.iterations), format_double(u.fluence_final)});
  }
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"models", n_models},
      {"runs_per_model", n_runs},
      {"threshold", cfg.success_threshold},
      {"zero_field_start", zero_start},
      {"convergence_fraction", static_cast<double>(converged) / total},
  };
  return table;
}

ResultsTable run_fluence_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> cases{1.0, 0.1, 0.01};
  const int n_models = cfg.n_models;
  // per (case, model): n_runs default starts plus one small/large pair
  const int kinds = cfg.n_runs_per_model + 2;

  struct Unit {
    std::vector<double> fluence_trace;
    bool success = false;
  };
  struct Key {
    int case_idx, model, kind;
  };
  const int total = static_cast<int>(cases.size()) * n_models * kinds;
  auto key_of = [&](int idx) {
    const int per_case = n_models * kinds;
    return Key{idx / per_case, (idx % per_case) / kinds,
               (idx % per_case) % kinds};
  };

  std::vector<RandomTuple> tuples;
  tuples.reserve(cases.size() * n_models);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (int m = 0; m < n_models; ++m) {
      tuples.push_back(random_tuple(
          cfg.dimension,
          derive_stream(cfg.seed, 0x30, static_cast<std::uint64_t>(c), m),
          1.0, 1.0, cases[c]));
    }
  }

  AscentConfig acfg = ascent_from(cfg);
  acfg.record_traces = true;

  std::vector<Unit> units(total);
  run_indexed(total, cfg.threads, [&](int idx) {
    const Key key = key_of(idx);
    const RandomTuple& tuple = tuples[key.case_idx * n_models + key.model];
    AscentConfig run_cfg = acfg;
    run_cfg.rng_seed = derive_stream(cfg.seed, 0x31, idx);
    RunRecord rec;
    if (key.kind < cfg.n_runs_per_model) {
      rec = randomized_ascent(tuple.model, tuple.goal, run_cfg);
    } else {
      const double norm = key.kind == cfg.n_runs_per_model ? 0.1 : 1.0;
      RandomStream rng(derive_stream(cfg.seed, 0x32, idx));
      const ControlField start =
          scaled_sphere_field(cfg.segments, cfg.horizon, norm, rng);
      rec = randomized_ascent(tuple.model, tuple.goal, run_cfg, &start);
    }
    units[idx].fluence_trace = std::move(rec.fluence_trace);
    units[idx].success = rec.success;
  });

  ResultsTable table;
  table.header = {"case_ratio", "model_id", "run_kind", "iteration",
                  "field_norm"};
  auto kind_name = [&](int kind) -> std::string {
    if (kind < cfg.n_runs_per_model) {
      return "default" + std::to_string(kind);
    }
    return kind == cfg.n_runs_per_model ? "init_small" : "init_large";
  };

  std::vector<int> within3_per_case(cases.size(), 0);
  std::vector<int> runs_per_case(cases.size(), 0);
  int paired_within3 = 0, paired_total = 0;

  std::vector<double> final_small(cases.size() * n_models, 0.0);
  std::vector<double> final_large(cases.size() * n_models, 0.0);

  for (int idx = 0; idx < total; ++idx) {
    const Key key = key_of(idx);
    const auto& trace = units[idx].fluence_trace;
    for (std::size_t it = 0; it < trace.size(); ++it) {
      table.rows.push_back({format_double(cases[key.case_idx]),
                            std::to_string(key.model), kind_name(key.kind),
                            std::to_string(it), format_double(trace[it])});
    }
    if (trace.empty()) continue;
    const double initial = trace.front();
    const double final_norm = trace.back();
    ++runs_per_case[key.case_idx];
    if (initial > 0.0 && final_norm <= 3.0 * initial &&
        final_norm >= initial / 3.0) {
      ++within3_per_case[key.case_idx];
    }
    const int cm = key.case_idx * n_models + key.model;
    if (key.kind == cfg.n_runs_per_model) final_small[cm] = final_norm;
    if (key.kind == cfg.n_runs_per_model + 1) final_large[cm] = final_norm;
  }
  for (std::size_t cm = 0; cm < final_small.size(); ++cm) {
    if (final_small[cm] > 0.0 && final_large[cm] > 0.0) {
      ++paired_total;
      const double ratio = final_small[cm] / final_large[cm];
      if (ratio <= 3.0 && ratio >= 1.0 / 3.0) ++paired_within3;
    }
  }

  nlohmann::json per_case = nlohmann::json::array();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    per_case.push_back(
        {{"ratio", cases[c]},
         {"runs", runs_per_case[c]},
         {"final_within_3x_of_initial",
          runs_per_case[c] > 0
              ? static_cast<double>(within3_per_case[c]) / runs_per_case[c]
              : 0.0}});
  }
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"cases", per_case},
      {"paired_final_within_3x",
       paired_total > 0 ? static_cast<double>(paired_within3) / paired_total
                        : 0.0},
      {"paired_runs", paired_total},
  };
  return table;
}

ResultsTable run_singular_census(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_models = cfg.n_models;
  const int n_generic = n_models / 2;
  const int saddle_budget = 500;
  // A singular control is only trusted on the grid while the closed-form
  // denominator stays clear of zero; below this (relative to |iH2|_F) a
  // graze cannot be told from a crossing and the run joins the blow-up class.
  const double resolvable_den = 0.01;

  struct Unit {
    bool blow_up = false;
    SaddleClass cls = SaddleClass::candidate_trap;
    int trials = 0;
    double defect = 0.0;
    double den_floor = 0.0;
  };
  std::vector<Unit> units(n_models);

  run_indexed(n_models, cfg.threads, [&](int m) {
    const bool generic = m < n_generic;
    HamiltonianModel model = [&]() {
      if (generic) {
        return random_tuple(cfg.dimension, derive_stream(cfg.seed, 0x40, m),
                            1.0, 1.0, cfg.h2_ratio)
            .model;
      }
      const auto params =
          random_heisenberg_params(derive_stream(cfg.seed, 0x41, m));
      HamiltonianModel base = heisenberg_model(params);
      return with_polarizability(base, derive_stream(cfg.seed, 0x42, m),
                                 cfg.h2_ratio * base.dipole().norm());
    }();
    const GoalGate goal = GoalGate::special(random_unitary_goal(
        generic ? cfg.dimension : 4, derive_stream(cfg.seed, 0x43, m)));
    const SingularProbe probe = SingularProbe::unit(
        random_su(model.dim(), derive_stream(cfg.seed, 0x44, m), 1.0));

    Unit& u = units[m];
    try {
      const SingularSolution sol =
          integrate_singular(model, probe, cfg.horizon, cfg.ode_steps);
      u.defect = sol.defect;
      u.den_floor = sol.denominator_floor;
      u.blow_up =
          sol.blew_up() ||
          sol.denominator_floor <
              resolvable_den * model.polarizability()->norm();
      if (!u.blow_up) {
        const SaddleVerdict verdict =
            saddle_probe(model, goal, sol.control, saddle_budget,
                         derive_stream(cfg.seed, 0x45, m));
        u.cls = verdict.classification;
        u.trials = verdict.trials_used;
      }
    } catch (const DegenerateProbeError&) {
      u.blow_up = true;  // unusable probe, recorded like a blow-up run
    }
  });

  ResultsTable table;
  table.header = {"model_class", "model_id",    "blow_up",
                  "classification", "trials_used", "defect",
                  "denominator_floor"};
  auto cls_name = [](SaddleClass c) -> std::string {
    switch (c) {
      case SaddleClass::saddle:
        return "saddle";
      case SaddleClass::regular_maximum:
        return "regular_maximum";
      default:
        return "candidate_trap";
    }
  };
  int blow_ups = 0, traps = 0, assessed = 0;
  std::vector<double> trials;
  for (int m = 0; m < n_models; ++m) {
    const Unit& u = units[m];
    const bool generic = m < n_generic;
    table.rows.push_back(
        {generic ? "generic" : "heisenberg_h2", std::to_string(m),
         format_bool(u.blow_up),
         u.blow_up ? "excluded" : cls_name(u.cls),
         std::to_string(u.trials), format_double(u.defect),
         format_double(u.den_floor)});
    if (u.blow_up) {
      ++blow_ups;
      continue;
    }
    ++assessed;
    if (u.cls == SaddleClass::candidate_trap) ++traps;
    trials.push_back(static_cast<double>(u.trials));
  }
  double trials_max = 0.0;
  for (double t : trials) trials_max = std::max(trials_max, t);
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"tuples", n_models},
      {"assessed", assessed},
      {"blow_up_count", blow_ups},
      {"trap_count", traps},
      {"trials_median", median_of(trials)},
      {"trials_max", trials_max},
  };
  return table;
}

ResultsTable run_singular_critical_search(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_models = cfg.n_models;

  struct Unit {
    bool found = false;
    double angle = -1.0;
    double escape_fraction = -1.0;
  };
  std::vector<Unit> units(n_models);

  SeekOptions seek;
  seek.total_time = cfg.horizon;
  seek.steps = cfg.ode_steps;

  AscentConfig acfg = ascent_from(cfg);

  // searches run one after another; the escape runs inside each hit are the
  // expensive part and are parallelized
  for (int m = 0; m < n_models; ++m) {
    const RandomTuple tuple = random_tuple(
        cfg.dimension, derive_stream(cfg.seed, 0x50, m), 1.0, 1.0,
        cfg.h2_ratio);
    const auto hit = seek_singular_critical(
        tuple.model, tuple.goal, derive_stream(cfg.seed, 0x51, m), seek);
    if (!hit) continue;
    Unit& u = units[m];
    u.found = true;
    u.angle = singular_critical_angle(hit->second, hit->first, tuple.goal);
    u.escape_fraction = neighborhood_escape(
        tuple.model, tuple.goal, hit->second.control, cfg.n_runs_per_model,
        derive_stream(cfg.seed, 0x52, m), acfg, cfg.threads);
  }

  ResultsTable table;
  table.header = {"model_id", "search_success", "angle", "escape_fraction"};
  int found = 0;
  double min_escape = 2.0;
  for (int m = 0; m < n_models; ++m) {
    const Unit& u = units[m];
    if (u.found) {
      ++found;
      min_escape = std::min(min_escape, u.escape_fraction);
    }
    table.rows.push_back({std::to_string(m), format_bool(u.found),
                          format_double(u.angle),
                          format_double(u.escape_fraction)});
  }
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"searches", n_models},
      {"successes", found},
      {"success_fraction", static_cast<double>(found) / n_models},
      {"min_escape_fraction", found > 0 ? min_escape : -1.0},
  };
  return table;
}

ResultsTable run_system_e_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_seeds = cfg.n_models;        // with-H2 arm
  const int n_plain = cfg.n_runs_per_model;  // without-H2 arm

  struct Unit {
    long h2_seed = -1;
    double initial_norm = 0.0;
    bool success = false;
    double final_fidelity = 0.0;
    long iterations = 0;
  };
  const int total = n_plain + n_seeds;
  std::vector<Unit> units(total);

  // initial norms decrease geometrically toward the zero field
  auto initial_norm = [](int i, int count) {
    const double hi = 1e-2, lo = 1e-5;
    if (count <= 1) return lo;
    return hi * std::pow(lo / hi, static_cast<double>(i) / (count - 1));
  };

  AscentConfig acfg = ascent_from(cfg);

  run_indexed(total, cfg.threads, [&](int idx) {
    Unit& u = units[idx];
    const bool with_h2 = idx >= n_plain;
    const int i = with_h2 ? idx - n_plain : idx;
    const int count = with_h2 ? n_seeds : n_plain;
    u.initial_norm = initial_norm(i, count);

    const std::optional<std::uint64_t> h2_seed =
        with_h2 ? std::optional<std::uint64_t>(
                      derive_stream(cfg.seed, 0x60, i))
                : std::nullopt;
    u.h2_seed = with_h2 ? static_cast<long>(*h2_seed) : -1;
    const SystemESetup setup = system_e(h2_seed);

    RandomStream rng(derive_stream(cfg.seed, 0x61, idx));
    const ControlField start = scaled_sphere_field(
        cfg.segments, setup.total_time, u.initial_norm, rng);

    AscentConfig run_cfg = acfg;
    run_cfg.horizon = setup.total_time;
    run_cfg.rng_seed = derive_stream(cfg.seed, 0x62, idx);
    const RunRecord rec =
        randomized_ascent(setup.model, setup.goal, run_cfg, &start);
    u.success = rec.success;
    u.final_fidelity = rec.final_fidelity;
    u.iterations = rec.iterations;
  });

  ResultsTable table;
  table.header = {"h2_seed",        "run_id",     "initial_norm",
                  "success",        "final_fidelity", "iterations"};
  int plain_below = 0;
  double with_h2_min = 1.0;
  for (int idx = 0; idx < total; ++idx) {
    const Unit& u = units[idx];
    const bool with_h2 = idx >= n_plain;
    table.rows.push_back(
        {std::to_string(u.h2_seed),
         std::to_string(with_h2 ? idx - n_plain : idx),
         format_double(u.initial_norm), format_bool(u.success),
         format_double(u.final_fidelity), std::to_string(u.iterations)});
    if (with_h2) {
      with_h2_min = std::min(with_h2_min, u.final_fidelity);
    } else if (u.final_fidelity < cfg.success_threshold) {
      ++plain_below;
    }
  }
  table.summary = {
      {"experiment", to_string(cfg.experiment)},
      {"threshold", cfg.success_threshold},
      {"with_h2_runs", n_seeds},
      {"with_h2_min_fidelity", with_h2_min},
      {"without_h2_runs", n_plain},
      {"without_h2_fraction_below",
       n_plain > 0 ? static_cast<double>(plain_below) / n_plain : 0.0},
  };
  return table;
}

ResultsTable run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::trap_census_heisenberg:
      return run_trap_census(cfg);
    case Experiment::trap_census_generic:
    case Experiment::zero_field_start:
      return run_generic_census(cfg);
    case Experiment::fluence_study:
      return run_fluence_study(cfg);
    case Experiment::singular_census:
      return run_singular_census(cfg);
    case Experiment::singular_critical_search:
      return run_singular_critical_search(cfg);
    case Experiment::system_e_study:
      return run_system_e_study(cfg);
  }
  throw std::invalid_argument("run_experiment: unknown experiment");
}

}  // namespace qcl
