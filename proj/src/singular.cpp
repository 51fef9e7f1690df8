#include "qcl/singular.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qcl/rng.hpp"
#include "qcl/runner.hpp"

namespace qcl {

SingularProbe SingularProbe::unit(const SuGenerator& b) {
  const double nrm = b.norm();
  if (!(nrm > 0.0)) {
    throw std::invalid_argument("SingularProbe: zero direction");
  }
  return SingularProbe(b * (1.0 / nrm));
}

namespace {

// pairings <U^+ X U, B> for X = iH1, iH2. Uses the adjoint-orbit identity
// <U^+ X U, B> = <X, U B U^+> so B is conjugated once per state.
struct PairingEvaluator {
  PairingEvaluator(const HamiltonianModel& model, const Matrix& b)
      : h1(model.dipole().mat()),
        h2(model.polarizability()->mat()),
        bmat(b),
        tmp(model.dim(), model.dim()),
        orbit(model.dim(), model.dim()) {}

  void at(const Matrix& u, double& num, double& den) {
    tmp.noalias() = u * bmat;
    orbit.noalias() = tmp * u.adjoint();
    num = trace_inner_raw(h1, orbit);
    den = trace_inner_raw(h2, orbit);
  }

  const Matrix& h1;
  const Matrix& h2;
  const Matrix& bmat;
  Matrix tmp, orbit;
};

struct ControlSample {
  double value = 0.0;
  bool clamped = false;
};

ControlSample extract_control(PairingEvaluator& pe, const Matrix& u,
                              double den_floor, double cap, double* den_out) {
  double num = 0.0, den = 0.0;
  pe.at(u, num, den);
  if (den_out) *den_out = std::abs(den);
  ControlSample s;
  double den_eff = den;
  if (std::abs(den) < den_floor) {
    den_eff = (den >= 0.0) ? den_floor : -den_floor;
    s.clamped = true;
  }
  s.value = -0.5 * num / den_eff;
  if (std::abs(s.value) > cap) {
    s.value = (s.value > 0.0) ? cap : -cap;
    s.clamped = true;
  }
  return s;
}

void polar_project(Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u.noalias() = svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

SingularSolution integrate_singular(const HamiltonianModel& model,
                                    const SingularProbe& probe,
                                    double total_time, int steps,
                                    const SingularIntegrationOptions& opts) {
  if (!model.has_polarizability()) {
    throw UnsupportedModelError(
        "integrate_singular: model has no polarizability term");
  }
  if (model.dim() != probe.dim()) {
    throw std::invalid_argument("integrate_singular: dimension mismatch");
  }
  if (steps < 100) {
    throw std::invalid_argument("integrate_singular: steps must be >= 100");
  }
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw std::invalid_argument("integrate_singular: bad total_time");
  }

  const int n = model.dim();
  const Matrix& h0 = model.drift().mat();
  const Matrix& h1 = model.dipole().mat();
  const Matrix& h2 = model.polarizability()->mat();
  const Matrix& b = probe.direction().mat();

  PairingEvaluator pe(model, b);
  const double den_floor = opts.blow_up_rel * h2.norm();
  const double cap = opts.control_cap;

  // degenerate probe: the closed form is undefined from the very start
  {
    double num0 = 0.0, den0 = 0.0;
    pe.at(Matrix::Identity(n, n), num0, den0);
    if (std::abs(den0) < den_floor) {
      throw DegenerateProbeError(
          "integrate_singular: denominator vanishes at t = 0");
    }
  }

  const int half_steps = 2 * steps;
  const double h = total_time / half_steps;

  SingularSolution sol{
      Trajectory{}, ControlField::zeros(steps, total_time), 0.0, {}, 0.0};
  sol.trajectory.samples.reserve(steps + 1);
  sol.trajectory.times.reserve(steps + 1);
  sol.denominator_floor = std::numeric_limits<double>::infinity();
  std::vector<double> control(steps, 0.0);

  Matrix u = Matrix::Identity(n, n);
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n), gen(n, n);
  Matrix drift_check(n, n);
  double prev_den = 0.0;
  {
    double num0 = 0.0;
    pe.at(u, num0, prev_den);
  }

  auto rhs = [&](const Matrix& state, Matrix& out, bool* clamped) {
    double den_abs = 0.0;
    const ControlSample s =
        extract_control(pe, state, den_floor, cap, &den_abs);
    if (clamped && s.clamped) *clamped = true;
    const double e = s.value;
    gen = h0;
    gen.noalias() += e * h1;
    gen.noalias() += (e * e) * h2;
    out.noalias() = gen * state;
  };

  auto record_boundary = [&](const Matrix& state, double t) {
    double num = 0.0, den = 0.0;
    pe.at(state, num, den);
    sol.denominator_floor = std::min(sol.denominator_floor, std::abs(den));
    double den_eff = den;
    if (std::abs(den) < den_floor) {
      den_eff = (den >= 0.0) ? den_floor : -den_floor;
    }
    const double e = std::clamp(-0.5 * num / den_eff, -cap, cap);
    // residual of the singularity condition with the (possibly clamped)
    // pointwise control: <U^+ (iH1 + 2 E iH2) U, B> = num + 2 E den
    sol.defect = std::max(sol.defect, std::abs(num + 2.0 * e * den));
    sol.trajectory.samples.push_back(Unitary::checked(state));
    sol.trajectory.times.push_back(t);
  };

  record_boundary(u, 0.0);

  for (int j = 0; j < half_steps; ++j) {
    const double t = h * j;
    bool clamped = false;

    rhs(u, k1, &clamped);
    stage = u + (0.5 * h) * k1;
    rhs(stage, k2, &clamped);
    stage = u + (0.5 * h) * k2;
    rhs(stage, k3, &clamped);
    stage = u + h * k3;
    rhs(stage, k4, &clamped);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    drift_check.noalias() = u.adjoint() * u;
    drift_check -= Matrix::Identity(n, n);
    if (drift_check.norm() > 1e-10) {
      polar_project(u);
    }

    // half-grid bookkeeping: blow-up flags and the denominator floor
    double num_here = 0.0, den_here = 0.0;
    pe.at(u, num_here, den_here);
    sol.denominator_floor =
        std::min(sol.denominator_floor, std::abs(den_here));
    double den_eff = den_here;
    bool grid_clamped = false;
    if (std::abs(den_here) < den_floor) {
      den_eff = (den_here >= 0.0) ? den_floor : -den_floor;
      grid_clamped = true;
    }
    double e_here = -0.5 * num_here / den_eff;
    if (std::abs(e_here) > cap) {
      e_here = (e_here > 0.0) ? cap : -cap;
      grid_clamped = true;
    }
    // a denominator sign change means the closed-form control diverged
    // somewhere inside this step: an unbounded, discontinuous stretch
    const bool crossed = den_here * prev_den < 0.0;
    prev_den = den_here;
    if (grid_clamped || clamped || crossed) {
      const double tb = t + h;
      if (sol.blow_up_times.empty() ||
          tb - sol.blow_up_times.back() > 2.5 * h) {
        sol.blow_up_times.push_back(tb);
      }
    }

    if (j % 2 == 0) {
      // odd half-grid index = midpoint of control segment j/2
      control[j / 2] = e_here;
    } else {
      record_boundary(u, t + h);
    }
  }

  sol.control = ControlField(std::move(control), total_time);
  return sol;
}

double verify_singularity(const HamiltonianModel& model,
                          const SingularSolution& solution,
                          const SingularProbe& probe) {
  if (!model.has_polarizability()) {
    throw UnsupportedModelError(
        "verify_singularity: model has no polarizability term");
  }
  const ControlField& control = solution.control;
  const int k = control.count();

  // refined grid: each segment split in half, same values
  std::vector<double> refined(2 * k);
  for (int i = 0; i < k; ++i) {
    refined[2 * i] = control.segments()[i];
    refined[2 * i + 1] = control.segments()[i];
  }
  const ControlField refined_field(std::move(refined), control.total_time());
  auto [endpoint, traj] = propagate(model, refined_field, true);
  (void)endpoint;

  PairingEvaluator pe(model, probe.direction().mat());
  double worst = 0.0;
  for (int i = 0; i < k; ++i) {
    // sample 2i+1 sits at the midpoint of segment i
    const Matrix& u = traj->samples[static_cast<std::size_t>(2 * i + 1)].mat();
    double num = 0.0, den = 0.0;
    pe.at(u, num, den);
    const double residual =
        std::abs(num + 2.0 * control.segments()[i] * den);
    worst = std::max(worst, residual);
  }
  return worst;
}

double singular_critical_angle(const SingularSolution& solution,
                               const SingularProbe& probe,
                               const GoalGate& goal) {
  const Matrix& u_t = solution.trajectory.samples.back().mat();
  const Matrix g = fidelity_gradient_left(u_t, goal.mat());
  const double gnorm = g.norm();
  if (gnorm < 1e-14) {
    // endpoint is a critical point of the gate fidelity itself; the angle is
    // undefined, report the worst case
    return 1.5707963267948966;
  }
  double cosang =
      std::abs(trace_inner_raw(probe.direction().mat(), g)) / gnorm;
  cosang = std::min(1.0, cosang);
  return std::acos(cosang);
}

std::optional<std::pair<SingularProbe, SingularSolution>>
seek_singular_critical(const HamiltonianModel& model, const GoalGate& goal,
                       std::uint64_t seed, const SeekOptions& opts) {
  if (!model.has_polarizability()) {
    throw UnsupportedModelError(
        "seek_singular_critical: model has no polarizability term");
  }
  const int n = model.dim();

  auto objective =
      [&](const SingularProbe& probe,
          std::optional<SingularSolution>& out) -> double {
    try {
      out.emplace(integrate_singular(model, probe, opts.total_time,
                                     opts.steps));
    } catch (const DegenerateProbeError&) {
      out.reset();
      return std::numeric_limits<double>::infinity();
    }
    if (out->blew_up() ||
        out->denominator_floor <
            0.01 * model.polarizability()->norm()) {
      return std::numeric_limits<double>::infinity();
    }
    return singular_critical_angle(*out, probe, goal);
  };

  int spent = 0;
  for (int restart = 0; restart < opts.restarts && spent < opts.budget;
       ++restart) {
    RandomStream rng(derive_stream(seed, 0xB0, restart));
    SingularProbe probe = SingularProbe::unit(
        random_su(n, derive_stream(seed, 0xB1, restart), 1.0));
    std::optional<SingularSolution> best_sol;
    double best = objective(probe, best_sol);
    ++spent;

    double eps = 0.5;
    int stall = 0;
    while (spent < opts.budget) {
      // random tangent proposal on the unit sphere of su(n)
      SuGenerator dir = random_su(n, rng.bits(), 1.0);
      SingularProbe trial =
          SingularProbe::unit(probe.direction() + dir * eps);
      std::optional<SingularSolution> trial_sol;
      const double val = objective(trial, trial_sol);
      ++spent;
      if (val < best) {
        best = val;
        probe = trial;
        best_sol = std::move(trial_sol);
        stall = 0;
        if (best <= opts.angle_tol) {
          return std::make_pair(probe, std::move(*best_sol));
        }
      } else {
        if (++stall >= opts.stall_limit) {
          eps *= 0.5;
          stall = 0;
          if (eps < 1e-6) break;  // converged to a non-critical minimum
        }
      }
    }
    if (best <= opts.angle_tol && best_sol) {
      return std::make_pair(probe, std::move(*best_sol));
    }
  }
  return std::nullopt;
}

SaddleVerdict saddle_probe(const HamiltonianModel& model, const GoalGate& goal,
                           const ControlField& field, int budget,
                           std::uint64_t seed) {
  if (budget < 2) {
    throw std::invalid_argument("saddle_probe: budget must be >= 2");
  }
  SaddleVerdict verdict;
  Propagator prop(model.dim());
  const double base = fidelity_raw(prop.endpoint(model, field), goal.mat());
  if (base >= 1.0 - 1e-9) {
    verdict.classification = SaddleClass::regular_maximum;
    return verdict;
  }

  RandomStream rng(derive_stream(seed, 0x5A));
  const int k = field.count();
  const double scale = 1e-3 * std::max(1.0, field.norm());
  std::vector<double> trial(k);

  for (int t = 0; t < budget; ++t) {
    const auto dir = rng.sphere_vector(k);
    for (int i = 0; i < k; ++i) {
      trial[i] = field.segments()[i] + scale * dir[i];
    }
    const ControlField trial_field(trial, field.total_time());
    const double df =
        fidelity_raw(prop.endpoint(model, trial_field), goal.mat()) - base;
    verdict.trials_used = t + 1;
    if (df > 0.0 && !verdict.positive_direction) {
      std::vector<double> scaled(dir);
      for (auto& x : scaled) x *= scale;
      verdict.positive_direction = std::move(scaled);
    } else if (df < 0.0 && !verdict.negative_direction) {
      std::vector<double> scaled(dir);
      for (auto& x : scaled) x *= scale;
      verdict.negative_direction = std::move(scaled);
    }
    if (verdict.positive_direction && verdict.negative_direction) {
      verdict.classification = SaddleClass::saddle;
      return verdict;
    }
  }
  verdict.classification = SaddleClass::candidate_trap;
  return verdict;
}

double neighborhood_escape(const HamiltonianModel& model, const GoalGate& goal,
                           const ControlField& field, int count,
                           std::uint64_t seed, const AscentConfig& ascent,
                           int threads) {
  if (count < 1) {
    throw std::invalid_argument("neighborhood_escape: count must be >= 1");
  }
  const int k = field.count();
  std::vector<int> success(count, 0);
  run_indexed(count, threads, [&](int i) {
    RandomStream rng(derive_stream(seed, 0xE5, static_cast<std::uint64_t>(i)));
    const auto dir = rng.sphere_vector(k);
    const double r = rng.uniform(0.0, 0.001);
    std::vector<double> start(field.segments());
    for (int j = 0; j < k; ++j) start[j] += r * dir[j];
    const ControlField start_field(std::move(start), field.total_time());
    AscentConfig cfg = ascent;
    cfg.rng_seed = derive_stream(seed, 0xE6, static_cast<std::uint64_t>(i));
    cfg.record_traces = false;
    const RunRecord rec = randomized_ascent(model, goal, cfg, &start_field);
    success[i] = rec.success ? 1 : 0;
  });
  int total = 0;
  for (int s : success) total += s;
  return static_cast<double>(total) / count;
}

}  // namespace qcl
