#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcl/dynamics.hpp"

namespace qcl {

// Target gate W. The `special` factory enforces det(W) = 1 (SU(n) goals, the
// census default); `general` admits an arbitrary determinant phase, which the
// phase-invariant fidelity absorbs.
class GoalGate {
 public:
  static GoalGate special(Unitary w);
  static GoalGate general(Unitary w);

  const Matrix& mat() const { return w_.mat(); }
  int dim() const { return w_.dim(); }

 private:
  explicit GoalGate(Unitary w) : w_(std::move(w)) {}
  Unitary w_;
};

// |Tr(W^+ U)|^2 / n^2, in [0, 1], equal to 1 iff U = e^{i phi} W.
double fidelity(const Unitary& u, const GoalGate& goal);
double fidelity_raw(const Matrix& u, const Matrix& w);

// Left-trivialized gradient of the fidelity at U: the skew-Hermitian G with
// dJ = <Omega, G> for perturbations U -> U(1 + Omega). With M = W^+ U and
// c = Tr M this is (c M^+ - conj(c) M) / n^2.
Matrix fidelity_gradient_left(const Matrix& u, const Matrix& w);

// Chain-rule gradient of the landscape F[E] = J[V_T[E]] with respect to each
// segment amplitude, exact for the discrete product propagator.
std::vector<double> fidelity_gradient(const HamiltonianModel& model,
                                      const ControlField& field,
                                      const GoalGate& goal);

struct AscentConfig {
  // 0 selects the adaptive rule eps = max(step_rel*|E|, step_floor); a
  // positive value fixes eps (still subject to the stall-halving below).
  double step_size = 0.0;
  double step_rel = 0.02;
  double step_floor = 0.002;
  int max_tries = 1000;
  double success_threshold = 0.95;
  long max_total_iterations = 200000;
  double initial_lo = -1.0;
  double initial_hi = 1.0;
  std::uint64_t rng_seed = 0;
  // used to draw the initial field when none is supplied
  int segments = 500;
  double horizon = 10.0;
  bool record_traces = true;

  void validate() const;
};

enum class AscentOutcome { converged, stalled, iteration_budget };

struct RunRecord {
  bool success = false;
  double final_fidelity = 0.0;
  std::vector<double> fidelity_trace;  // initial value, then accepted steps
  std::vector<double> fluence_trace;
  std::optional<ControlField> final_field;
  long iterations = 0;
  long evaluations = 0;
  AscentOutcome outcome = AscentOutcome::stalled;
};

// Random-proposal hill climb over the control amplitudes: a trial move
// eps*(uniform vector) is accepted only if it strictly improves the fidelity;
// max_tries consecutive rejections end the run as a stall. Step size halves
// at each half-streak (never below step_floor in adaptive mode) and the
// shrink persists for the rest of the run. Deterministic for a fixed seed.
RunRecord randomized_ascent(const HamiltonianModel& model,
                            const GoalGate& goal, const AscentConfig& config,
                            const ControlField* initial = nullptr);

// Line-search ascent along the analytic gradient. Faster on smooth stretches
// of a census; the randomized climber above is the reference algorithm.
RunRecord gradient_ascent(const HamiltonianModel& model, const GoalGate& goal,
                          const AscentConfig& config,
                          const ControlField* initial = nullptr);

}  // namespace qcl
