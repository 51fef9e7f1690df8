#include "qcl/models.hpp"

#include <cmath>

#include "qcl/rng.hpp"

namespace qcl {

namespace {

Matrix pauli(char which) {
  Matrix m(2, 2);
  switch (which) {
    case 'x':
      m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
      break;
    case 'y':
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case 'z':
      m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
      break;
    default:
      m = Matrix::Identity(2, 2);
  }
  return m;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

HeisenbergParams random_heisenberg_params(std::uint64_t seed) {
  RandomStream rng(derive_stream(seed, 0x4A));
  double x, y, z, s;
  do {
    x = rng.gauss();
    y = rng.gauss();
    z = rng.gauss();
    s = std::sqrt(x * x + y * y + z * z);
  } while (s == 0.0);
  return HeisenbergParams{{x / s, y / s, z / s}};
}

HamiltonianModel heisenberg_model(const HeisenbergParams& params) {
  const Complex i(0.0, 1.0);
  const Matrix sx = pauli('x'), sy = pauli('y'), sz = pauli('z');
  Matrix drift = i * (params.j[0] * kron2(sx, sx) + params.j[1] * kron2(sy, sy) +
                      params.j[2] * kron2(sz, sz));
  Matrix dipole = i * kron2(Matrix::Identity(2, 2), sz);
  return HamiltonianModel(SuGenerator::su(std::move(drift)),
                          SuGenerator::su(std::move(dipole)));
}

HamiltonianModel with_polarizability(const HamiltonianModel& model,
                                     std::uint64_t seed, double norm) {
  return model.with_polarizability_term(random_su(model.dim(), seed, norm));
}

SystemEParams SystemEParams::canonical() {
  SystemEParams p;
  p.a_ = 5.0 * std::sqrt(2.0 / 3.0);
  p.b_ = 4.0;
  p.c_ = 1.0;
  p.theta_ = 2.0 * M_PI / 3.0;
  p.phi_ = -3.0 * M_PI / 4.0;
  p.total_time_ = 1000.0;
  p.alpha_ = M_PI / 1000.0;
  return p;
}

SystemEParams SystemEParams::variant(double a, double b, double c,
                                     double theta, double phi,
                                     double total_time, double alpha) {
  SystemEParams p;
  p.a_ = a;
  p.b_ = b;
  p.c_ = c;
  p.theta_ = theta;
  p.phi_ = phi;
  p.total_time_ = total_time;
  p.alpha_ = alpha;
  return p;
}

SystemESetup system_e(std::optional<std::uint64_t> with_h2_seed,
                      const SystemEParams& params) {
  const Complex i(0.0, 1.0);
  const int n = 3;

  Eigen::Vector3d h0_diag(1.0 + params.alpha(), 1.0, 2.0);
  Matrix h0 = Matrix::Zero(n, n);
  h0.diagonal() = h0_diag.cast<Complex>();

  Matrix h1(n, n);
  h1 << Complex(-params.a(), 0), Complex(-1, 0), Complex(0, 0),
        Complex(-1, 0), Complex(-params.b(), 0), Complex(-1, 0),
        Complex(0, 0), Complex(-1, 0), Complex(-params.c(), 0);

  // stored with the Schroedinger sign, exp(-i H0 T), so the goal gate below
  // composes with the zero-field propagator exactly as published
  SuGenerator drift = SuGenerator::u(-i * h0);
  SuGenerator dipole = SuGenerator::u(-i * h1);

  // W = diag(e^{i theta}, -i e^{-i phi}, -i e^{i phi}) * exp(-i H0 T)
  Matrix w = Matrix::Zero(n, n);
  const double t = params.total_time();
  w(0, 0) = std::polar(1.0, params.theta()) * std::polar(1.0, -h0_diag(0) * t);
  w(1, 1) = -i * std::polar(1.0, -params.phi()) * std::polar(1.0, -h0_diag(1) * t);
  w(2, 2) = -i * std::polar(1.0, params.phi()) * std::polar(1.0, -h0_diag(2) * t);
  GoalGate goal = GoalGate::general(Unitary::checked(std::move(w)));

  std::optional<SuGenerator> pol;
  if (with_h2_seed) {
    pol = random_su(n, *with_h2_seed, dipole.norm() / 10.0);
  }

  return SystemESetup{HamiltonianModel(std::move(drift), std::move(dipole),
                                       std::move(pol)),
                      std::move(goal), params.total_time()};
}

RandomTuple random_tuple(int n, std::uint64_t seed, double norm_h0,
                         double norm_h1, std::optional<double> norm_h2) {
  SuGenerator h0 = random_su(n, derive_stream(seed, 0x70, 0), norm_h0);
  SuGenerator h1 = random_su(n, derive_stream(seed, 0x70, 1), norm_h1);
  std::optional<SuGenerator> h2;
  if (norm_h2) {
    h2 = random_su(n, derive_stream(seed, 0x70, 2), *norm_h2);
  }
  GoalGate goal = GoalGate::special(
      random_unitary_goal(n, derive_stream(seed, 0x70, 3)));
  return RandomTuple{
      HamiltonianModel(std::move(h0), std::move(h1), std::move(h2)),
      std::move(goal)};
}

}  // namespace qcl
