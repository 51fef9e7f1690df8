#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qcl/linalg.hpp"

namespace qcl {

// Piecewise-constant real control on [0, total_time], uniform segments.
class ControlField {
 public:
  ControlField(std::vector<double> segments, double total_time);

  int count() const { return static_cast<int>(segments_.size()); }
  double total_time() const { return total_time_; }
  double dt() const { return total_time_ / count(); }
  const std::vector<double>& segments() const { return segments_; }
  double operator[](int k) const { return segments_[k]; }

  // Euclidean norm of the amplitude vector (the fluence proxy).
  double norm() const;

  static ControlField zeros(int count, double total_time);
  static ControlField constant(int count, double total_time, double value);

 private:
  std::vector<double> segments_;
  double total_time_;
};

// Control-dependent generator i(H0 + e*H1 + e^2*H2); the quadratic coupling
// is optional (absent = dipole approximation).
class HamiltonianModel {
 public:
  HamiltonianModel(SuGenerator drift, SuGenerator dipole,
                   std::optional<SuGenerator> polarizability = std::nullopt);

  int dim() const { return drift_.dim(); }
  const SuGenerator& drift() const { return drift_; }
  const SuGenerator& dipole() const { return dipole_; }
  const std::optional<SuGenerator>& polarizability() const { return pol_; }
  bool has_polarizability() const { return pol_.has_value(); }

  // model with the quadratic coupling replaced (or added)
  HamiltonianModel with_polarizability_term(SuGenerator pol) const;
  HamiltonianModel without_polarizability_term() const;

 private:
  SuGenerator drift_, dipole_;
  std::optional<SuGenerator> pol_;
};

SuGenerator generator_at(const HamiltonianModel& model, double e);

// Propagator samples at the segment boundaries; samples[0] is the identity
// and samples[k] is the partial product through segment k-1.
struct Trajectory {
  std::vector<Unitary> samples;
  std::vector<double> times;
};

std::pair<Unitary, std::optional<Trajectory>> propagate(
    const HamiltonianModel& model, const ControlField& field,
    bool keep_trajectory = false);

// Reusable-buffer endpoint kernel for optimizer loops. Returns a reference to
// an internal matrix that is overwritten by the next call.
class Propagator {
 public:
  explicit Propagator(int dim);
  const Matrix& endpoint(const HamiltonianModel& model,
                         const ControlField& field);

 private:
  int dim_;
  ExpmWorkspace expm_;
  Matrix gen_, u_, next_;
};

// Derivative of the end-point map in the left-trivialized frame: element k is
// d/dE_k of U_T, pulled back as U_T^+ dU_T, an element of the Lie algebra.
// Computed exactly for the discrete product formula via the integral
//   U_k^+ [ int_0^dt e^{-sA_k} (iH1 + 2 E_k iH2) e^{sA_k} ds ] U_k
// evaluated in the eigenbasis of A_k; it reduces to the familiar
// dt * U_k^+ (iH1 + 2 E_k iH2) U_k as dt -> 0.
std::vector<SuGenerator> endpoint_variation_basis(const HamiltonianModel& model,
                                                  const ControlField& field,
                                                  const Trajectory& traj);

}  // namespace qcl
