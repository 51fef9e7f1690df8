#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcl/landscape.hpp"

namespace qcl {

struct UnsupportedModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateProbeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unreachable direction B in su(n); normalized to unit Frobenius norm (the
// closed-form singular control is invariant under rescaling B).
class SingularProbe {
 public:
  static SingularProbe unit(const SuGenerator& b);
  const SuGenerator& direction() const { return b_; }
  int dim() const { return b_.dim(); }

 private:
  explicit SingularProbe(SuGenerator b) : b_(std::move(b)) {}
  SuGenerator b_;
};

// A singular trajectory together with the control extracted from it.
// `defect` is the largest residual of the singularity condition over the
// boundary grid of the integrator's own trajectory; it is reported, not
// assumed small, because runs that hit a denominator blow-up are continued
// with the control clamped and are flagged as non-physical.
struct SingularSolution {
  Trajectory trajectory;
  ControlField control;
  double defect = 0.0;
  std::vector<double> blow_up_times;
  double denominator_floor = 0.0;

  bool blew_up() const { return !blow_up_times.empty(); }
};

struct SingularIntegrationOptions {
  // |denominator| below blow_up_rel * |iH2|_F marks a blow-up point
  double blow_up_rel = 1e-8;
  // clamp applied to the extracted control on blow-up stretches
  double control_cap = 1e4;
};

// Solves the singular-trajectory initial value problem from U_0 = I with a
// classical fixed-step 4th-order scheme (two internal half-steps per control
// segment), re-projecting onto the unitary manifold when drift exceeds 1e-10.
// The control value stored for segment k is the closed-form extraction at the
// segment midpoint, which makes the piecewise field a second-order-accurate
// stand-in for the continuous singular control.
SingularSolution integrate_singular(
    const HamiltonianModel& model, const SingularProbe& probe,
    double total_time, int steps,
    const SingularIntegrationOptions& opts = {});

// Cross-module consistency check: re-propagates the extracted control through
// the product-formula dynamics on a refined grid (2x steps) and returns the
// largest absolute singularity pairing, evaluated at the segment midpoints
// where the piecewise control attains the underlying continuous one.
double verify_singularity(const HamiltonianModel& model,
                          const SingularSolution& solution,
                          const SingularProbe& probe);

struct SeekOptions {
  double angle_tol = 0.001;  // radians
  double total_time = 10.0;
  int steps = 400;
  int budget = 2500;   // objective evaluations across all restarts
  int restarts = 4;
  int stall_limit = 60;  // consecutive rejections before the step shrinks
};

// Randomized descent over unit-norm B minimizing the angle between B and the
// left-trivialized fidelity gradient at the singular endpoint. Failure (no
// probe within the budget) is a legitimate outcome.
std::optional<std::pair<SingularProbe, SingularSolution>>
seek_singular_critical(const HamiltonianModel& model, const GoalGate& goal,
                       std::uint64_t seed, const SeekOptions& opts = {});

// Angle between the probe direction and the left-trivialized fidelity
// gradient at the endpoint of the solution trajectory, folded to [0, pi/2]
// (B and -B define the same singular control).
double singular_critical_angle(const SingularSolution& solution,
                               const SingularProbe& probe,
                               const GoalGate& goal);

enum class SaddleClass { saddle, candidate_trap, regular_maximum };

struct SaddleVerdict {
  SaddleClass classification = SaddleClass::candidate_trap;
  int trials_used = 0;
  std::optional<std::vector<double>> positive_direction;
  std::optional<std::vector<double>> negative_direction;
};

// Samples random control perturbations of norm 1e-3 * max(1, |E|) until
// fidelity variations of both signs have been seen (saddle), the budget is
// exhausted (candidate_trap), or the field already sits at the global top.
SaddleVerdict saddle_probe(const HamiltonianModel& model, const GoalGate& goal,
                           const ControlField& field, int budget,
                           std::uint64_t seed);

// Fraction of `count` random-ascent runs, started from perturbations of the
// field with |dE| uniform in [0, 0.001], that reach the success threshold.
double neighborhood_escape(const HamiltonianModel& model, const GoalGate& goal,
                           const ControlField& field, int count,
                           std::uint64_t seed, const AscentConfig& ascent,
                           int threads = 1);

}  // namespace qcl
