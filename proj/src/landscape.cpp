#include "qcl/landscape.hpp"

#include <cmath>
#include <stdexcept>

#include "qcl/rng.hpp"

namespace qcl {

GoalGate GoalGate::special(Unitary w) {
  if (std::abs(w.mat().determinant() - Complex(1.0, 0.0)) > 1e-9) {
    throw std::invalid_argument("GoalGate: determinant must be 1");
  }
  return GoalGate(std::move(w));
}

GoalGate GoalGate::general(Unitary w) { return GoalGate(std::move(w)); }

double fidelity_raw(const Matrix& u, const Matrix& w) {
  const Complex c = w.conjugate().cwiseProduct(u).sum();  // Tr(W^+ U)
  const double n = static_cast<double>(u.rows());
  return std::norm(c) / (n * n);
}

double fidelity(const Unitary& u, const GoalGate& goal) {
  if (u.dim() != goal.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  return fidelity_raw(u.mat(), goal.mat());
}

Matrix fidelity_gradient_left(const Matrix& u, const Matrix& w) {
  const Matrix m = w.adjoint() * u;
  const Complex c = m.trace();
  const double n = static_cast<double>(u.rows());
  return (c * m.adjoint() - std::conj(c) * m) / (n * n);
}

std::vector<double> fidelity_gradient(const HamiltonianModel& model,
                                      const ControlField& field,
                                      const GoalGate& goal) {
  if (model.dim() != goal.dim()) {
    throw std::invalid_argument("fidelity_gradient: dimension mismatch");
  }
  auto [endpoint, traj] = propagate(model, field, true);
  const auto basis = endpoint_variation_basis(model, field, *traj);
  const Matrix g = fidelity_gradient_left(endpoint.mat(), goal.mat());
  std::vector<double> grad(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    grad[k] = trace_inner_raw(basis[k].mat(), g);
  }
  return grad;
}

void AscentConfig::validate() const {
  if (max_tries < 1) {
    throw std::invalid_argument("AscentConfig: max_tries must be >= 1");
  }
  if (!(success_threshold > 0.0) || success_threshold > 1.0) {
    throw std::invalid_argument(
        "AscentConfig: success_threshold must be in (0, 1]");
  }
  if (segments < 1 || !(horizon > 0.0)) {
    throw std::invalid_argument("AscentConfig: bad field shape");
  }
  if (step_size < 0.0 || step_rel <= 0.0 || step_floor <= 0.0) {
    throw std::invalid_argument("AscentConfig: step sizes must be positive");
  }
  if (max_total_iterations < 1) {
    throw std::invalid_argument(
        "AscentConfig: max_total_iterations must be >= 1");
  }
}

namespace {

ControlField draw_initial(const AscentConfig& cfg, RandomStream& rng) {
  std::vector<double> e(cfg.segments);
  for (auto& x : e) x = rng.uniform(cfg.initial_lo, cfg.initial_hi);
  return ControlField(std::move(e), cfg.horizon);
}

// The stall-halving multiplies the (floored) base without a lower bound:
// once proposals shrink past the resolution of the fidelity the strict
// improvement test cannot pass and the rejection streak terminates the run.
double step_size_now(const AscentConfig& cfg, double field_norm,
                     double shrink) {
  if (cfg.step_size > 0.0) return cfg.step_size * shrink;
  return std::max(cfg.step_rel * field_norm, cfg.step_floor) * shrink;
}

}  // namespace

RunRecord randomized_ascent(const HamiltonianModel& model,
                            const GoalGate& goal, const AscentConfig& config,
                            const ControlField* initial) {
  config.validate();
  if (model.dim() != goal.dim()) {
    throw std::invalid_argument("randomized_ascent: dimension mismatch");
  }
  RandomStream rng(config.rng_seed);
  ControlField field = initial ? *initial : draw_initial(config, rng);
  const int k = field.count();

  Propagator prop(model.dim());
  RunRecord rec;
  double fid = fidelity_raw(prop.endpoint(model, field), goal.mat());
  rec.evaluations = 1;
  if (config.record_traces) {
    rec.fidelity_trace.push_back(fid);
    rec.fluence_trace.push_back(field.norm());
  }

  double shrink = 1.0;
  const int half_streak = std::max(1, config.max_tries / 2);

  std::vector<double> trial(k);
  bool stalled = false;
  while (fid <= config.success_threshold &&
         rec.iterations < config.max_total_iterations) {
    int tries = 0;
    bool accepted = false;
    double trial_fid = 0.0;
    const double field_norm = field.norm();
    while (tries < config.max_tries) {
      const double eps = step_size_now(config, field_norm, shrink);
      for (int i = 0; i < k; ++i) {
        trial[i] = field.segments()[i] + eps * rng.uniform(-1.0, 1.0);
      }
      const ControlField trial_field(trial, field.total_time());
      trial_fid = fidelity_raw(prop.endpoint(model, trial_field), goal.mat());
      ++rec.evaluations;
      ++tries;
      if (trial_fid > fid) {
        field = trial_field;
        accepted = true;
        break;
      }
      if (tries % half_streak == 0 && tries < config.max_tries) {
        shrink *= 0.5;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    fid = trial_fid;
    ++rec.iterations;
    if (config.record_traces) {
      rec.fidelity_trace.push_back(fid);
      rec.fluence_trace.push_back(field.norm());
    }
  }

  rec.final_fidelity = fid;
  rec.success = fid > config.success_threshold;
  rec.outcome = rec.success ? AscentOutcome::converged
                            : (stalled ? AscentOutcome::stalled
                                       : AscentOutcome::iteration_budget);
  rec.final_field = std::move(field);
  return rec;
}

RunRecord gradient_ascent(const HamiltonianModel& model, const GoalGate& goal,
                          const AscentConfig& config,
                          const ControlField* initial) {
  config.validate();
  RandomStream rng(config.rng_seed);
  ControlField field = initial ? *initial : draw_initial(config, rng);
  const int k = field.count();

  Propagator prop(model.dim());
  RunRecord rec;
  double fid = fidelity_raw(prop.endpoint(model, field), goal.mat());
  rec.evaluations = 1;
  if (config.record_traces) {
    rec.fidelity_trace.push_back(fid);
    rec.fluence_trace.push_back(field.norm());
  }

  std::vector<double> trial(k);
  bool stalled = false;
  while (fid <= config.success_threshold &&
         rec.iterations < config.max_total_iterations) {
    const auto grad = fidelity_gradient(model, field, goal);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-14) {
      stalled = true;
      break;
    }
    // backtracking line search along the normalized gradient
    double step = std::max(0.5, 0.1 * field.norm());
    bool accepted = false;
    while (step > 1e-12) {
      for (int i = 0; i < k; ++i) {
        trial[i] = field.segments()[i] + step * grad[i] / gnorm;
      }
      const ControlField trial_field(trial, field.total_time());
      const double trial_fid =
          fidelity_raw(prop.endpoint(model, trial_field), goal.mat());
      ++rec.evaluations;
      if (trial_fid > fid) {
        field = trial_field;
        fid = trial_fid;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    ++rec.iterations;
    if (config.record_traces) {
      rec.fidelity_trace.push_back(fid);
      rec.fluence_trace.push_back(field.norm());
    }
  }

  rec.final_fidelity = fid;
  rec.success = fid > config.success_threshold;
  rec.outcome = rec.success ? AscentOutcome::converged
                            : (stalled ? AscentOutcome::stalled
                                       : AscentOutcome::iteration_budget);
  rec.final_field = std::move(field);
  return rec;
}

}  // namespace qcl
