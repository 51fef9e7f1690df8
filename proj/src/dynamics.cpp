#include "qcl/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace qcl {

ControlField::ControlField(std::vector<double> segments, double total_time)
    : segments_(std::move(segments)), total_time_(total_time) {
  if (segments_.empty()) {
    throw std::invalid_argument("ControlField: needs at least one segment");
  }
  if (!(total_time_ > 0.0) || !std::isfinite(total_time_)) {
    throw std::invalid_argument("ControlField: total_time must be positive");
  }
  for (double a : segments_) {
    if (!std::isfinite(a)) {
      throw std::invalid_argument("ControlField: amplitudes must be finite");
    }
  }
}

double ControlField::norm() const {
  double s = 0.0;
  for (double a : segments_) s += a * a;
  return std::sqrt(s);
}

ControlField ControlField::zeros(int count, double total_time) {
  return ControlField(std::vector<double>(count, 0.0), total_time);
}

ControlField ControlField::constant(int count, double total_time,
                                    double value) {
  return ControlField(std::vector<double>(count, value), total_time);
}

HamiltonianModel::HamiltonianModel(SuGenerator drift, SuGenerator dipole,
                                   std::optional<SuGenerator> polarizability)
    : drift_(std::move(drift)),
      dipole_(std::move(dipole)),
      pol_(std::move(polarizability)) {
  if (drift_.dim() != dipole_.dim() ||
      (pol_ && pol_->dim() != drift_.dim())) {
    throw std::invalid_argument("HamiltonianModel: dimension mismatch");
  }
}

HamiltonianModel HamiltonianModel::with_polarizability_term(
    SuGenerator pol) const {
  return HamiltonianModel(drift_, dipole_, std::move(pol));
}

HamiltonianModel HamiltonianModel::without_polarizability_term() const {
  return HamiltonianModel(drift_, dipole_, std::nullopt);
}

SuGenerator generator_at(const HamiltonianModel& model, double e) {
  if (!std::isfinite(e)) {
    throw std::invalid_argument("generator_at: non-finite amplitude");
  }
  SuGenerator g = model.drift() + model.dipole() * e;
  if (model.has_polarizability()) {
    g = g + (*model.polarizability()) * (e * e);
  }
  return g;
}

namespace {

// gen = drift + e*dipole + e^2*pol, written into a preallocated buffer
inline void generator_into(const HamiltonianModel& model, double e,
                           Matrix& gen) {
  gen = model.drift().mat();
  gen.noalias() += e * model.dipole().mat();
  if (model.has_polarizability()) {
    gen.noalias() += (e * e) * model.polarizability()->mat();
  }
}

// diagonal [6/6] Pade exponential with scaling and squaring; for
// skew-Hermitian input the approximant is itself unitary (D = N^+), so the
// product of segment factors cannot drift off the group
template <typename M>
M expm_pade66(M x) {
  constexpr double b1 = 1.0 / 2.0, b2 = 5.0 / 44.0, b3 = 1.0 / 66.0,
                   b4 = 1.0 / 792.0, b5 = 1.0 / 15840.0, b6 = 1.0 / 665280.0;
  int squarings = 0;
  double nrm = x.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  while (nrm > 0.5) {
    x *= 0.5;
    nrm *= 0.5;
    ++squarings;
  }
  const M x2 = x * x;
  const M x4 = x2 * x2;
  const M odd = x * (b1 * M::Identity() + b3 * x2 + b5 * x4);
  const M even =
      M::Identity() + b2 * x2 + b4 * x4 + b6 * (x4 * x2);
  M p = (even - odd).partialPivLu().solve(even + odd);
  for (int s = 0; s < squarings; ++s) p = (p * p).eval();
  return p;
}

// stack-allocated product kernel for the small dimensions the experiments
// actually use; the optimizer loops spend nearly all their time here
template <int N>
void endpoint_fixed(const HamiltonianModel& model, const ControlField& field,
                    Matrix& out) {
  using M = Eigen::Matrix<Complex, N, N>;
  const M drift = model.drift().mat();
  const M dipole = model.dipole().mat();
  M pol;
  const bool has_pol = model.has_polarizability();
  if (has_pol) pol = model.polarizability()->mat();

  const double dt = field.dt();
  M u = M::Identity();
  M gen;
  for (int k = 0; k < field.count(); ++k) {
    const double e = field[k];
    gen = drift + e * dipole;
    if (has_pol) gen += (e * e) * pol;
    gen *= dt;
    u = (expm_pade66(gen) * u).eval();
  }
  out = u;
}

}  // namespace

Propagator::Propagator(int dim)
    : dim_(dim), expm_(dim), gen_(dim, dim), u_(dim, dim), next_(dim, dim) {}

const Matrix& Propagator::endpoint(const HamiltonianModel& model,
                                   const ControlField& field) {
  switch (dim_) {
    case 2:
      endpoint_fixed<2>(model, field, u_);
      return u_;
    case 3:
      endpoint_fixed<3>(model, field, u_);
      return u_;
    case 4:
      endpoint_fixed<4>(model, field, u_);
      return u_;
    default:
      break;
  }
  const double dt = field.dt();
  u_ = Matrix::Identity(dim_, dim_);
  for (int k = 0; k < field.count(); ++k) {
    generator_into(model, field[k], gen_);
    // next_ = exp(dt*gen) applied to u_, fused through the eigenbasis
    expm_.herm = gen_ * Complex(0.0, -1.0);
    expm_.es.compute(expm_.herm);
    const auto& evals = expm_.es.eigenvalues();
    const auto& v = expm_.es.eigenvectors();
    expm_.phased = v;
    for (int j = 0; j < dim_; ++j) {
      const double ang = dt * evals(j);
      expm_.phased.col(j) *= Complex(std::cos(ang), std::sin(ang));
    }
    gen_.noalias() = v.adjoint() * u_;
    next_.noalias() = expm_.phased * gen_;
    u_.swap(next_);
  }
  return u_;
}

std::pair<Unitary, std::optional<Trajectory>> propagate(
    const HamiltonianModel& model, const ControlField& field,
    bool keep_trajectory) {
  if (field.count() < 1) {
    throw std::invalid_argument("propagate: empty field");
  }
  const int n = model.dim();
  const double dt = field.dt();

  Matrix u = Matrix::Identity(n, n);
  Matrix seg(n, n), gen(n, n);
  ExpmWorkspace ws(n);

  std::optional<Trajectory> traj;
  if (keep_trajectory) {
    traj.emplace();
    traj->samples.reserve(field.count() + 1);
    traj->times.reserve(field.count() + 1);
    traj->samples.push_back(Unitary::identity(n));
    traj->times.push_back(0.0);
  }

  for (int k = 0; k < field.count(); ++k) {
    generator_into(model, field[k], gen);
    expm_skew_ws(gen, dt, ws, seg);
    u = (seg * u).eval();
    if (keep_trajectory) {
      traj->samples.push_back(Unitary::checked(u));
      traj->times.push_back(dt * (k + 1));
    }
  }
  return {Unitary::checked(std::move(u)), std::move(traj)};
}

std::vector<SuGenerator> endpoint_variation_basis(const HamiltonianModel& model,
                                                  const ControlField& field,
                                                  const Trajectory& traj) {
  const int n = model.dim();
  const int count = field.count();
  if (static_cast<int>(traj.samples.size()) != count + 1) {
    throw std::invalid_argument(
        "endpoint_variation_basis: trajectory does not match the field");
  }
  const double dt = field.dt();

  std::vector<SuGenerator> basis;
  basis.reserve(count);

  Matrix gen(n, n), dir(n, n), herm(n, n), l(n, n), tmp(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(n);

  for (int k = 0; k < count; ++k) {
    const double e = field[k];
    generator_into(model, e, gen);
    dir = model.dipole().mat();
    if (model.has_polarizability()) {
      dir.noalias() += (2.0 * e) * model.polarizability()->mat();
    }
    herm = gen * Complex(0.0, -1.0);
    es.compute(herm);
    const auto& lam = es.eigenvalues();
    const auto& v = es.eigenvectors();

    // L = int_0^dt e^{-sA} D e^{sA} ds, in the eigenbasis of A = i*diag(lam):
    // Ltilde_pq = Dtilde_pq * psi(lam_p - lam_q),
    // psi(x) = dt * e^{-i dt x / 2} * sinc(dt x / 2).
    tmp.noalias() = v.adjoint() * dir;
    l.noalias() = tmp * v;
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const double x = lam(p) - lam(q);
        const double y = 0.5 * dt * x;
        const double sinc = (std::abs(y) < 1e-8)
                                ? 1.0 - y * y / 6.0
                                : std::sin(y) / y;
        l(p, q) *= dt * sinc * Complex(std::cos(y), -std::sin(y));
      }
    }
    tmp.noalias() = v * l;
    l.noalias() = tmp * v.adjoint();

    const Matrix& uk = traj.samples[static_cast<std::size_t>(k)].mat();
    tmp.noalias() = uk.adjoint() * l;
    Matrix b = tmp * uk;
    // conjugated integral of a skew-Hermitian direction; clean the residue
    b = 0.5 * (b - b.adjoint().eval());
    basis.push_back(SuGenerator::u(std::move(b)));
  }
  return basis;
}

}  // namespace qcl
