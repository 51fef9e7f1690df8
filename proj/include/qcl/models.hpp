#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qcl/landscape.hpp"

namespace qcl {

// Two-qubit exchange couplings (Jx, Jy, Jz).
struct HeisenbergParams {
  std::array<double, 3> j{1.0, 1.0, 1.0};
};

// Uniform on the unit sphere, |J| = 1.
HeisenbergParams random_heisenberg_params(std::uint64_t seed);

// Four-level family with drift Jx sx(x)sx + Jy sy(x)sy + Jz sz(x)sz and a
// z-field coupling on the second qubit. Not controllable through the dipole
// term alone.
HamiltonianModel heisenberg_model(const HeisenbergParams& params);

// Adds a seeded random su(n) polarizability of the given Frobenius norm.
HamiltonianModel with_polarizability(const HamiltonianModel& model,
                                     std::uint64_t seed, double norm);

// The three-level benchmark system with a second-order trap at the zero
// field. Values are fixed; use `variant` only to study deliberate changes.
class SystemEParams {
 public:
  static SystemEParams canonical();
  static SystemEParams variant(double a, double b, double c, double theta,
                               double phi, double total_time, double alpha);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  double total_time() const { return total_time_; }
  double alpha() const { return alpha_; }

 private:
  SystemEParams() = default;
  double a_, b_, c_, theta_, phi_, total_time_, alpha_;
};

struct SystemESetup {
  HamiltonianModel model;
  GoalGate goal;
  double total_time;
};

// Assembles system E. The Hamiltonians carry a nonzero trace and are stored
// verbatim (u(n) mode); the phase-invariant fidelity absorbs the trace part.
// An optional seed adds a random polarizability at 1/10 the dipole norm.
SystemESetup system_e(std::optional<std::uint64_t> with_h2_seed = std::nullopt,
                      const SystemEParams& params = SystemEParams::canonical());

struct RandomTuple {
  HamiltonianModel model;
  GoalGate goal;
};

// Seeded random (H0, H1, [H2], G) tuple with the requested Frobenius norms.
RandomTuple random_tuple(int n, std::uint64_t seed, double norm_h0,
                         double norm_h1,
                         std::optional<double> norm_h2 = std::nullopt);

}  // namespace qcl
