#include <doctest.h>

#include <cmath>
#include <functional>

#include "qcl/dynamics.hpp"
#include "qcl/models.hpp"
#include "qcl/rng.hpp"
#include "support/oracles.hpp"

using namespace qcl;

namespace {

const Complex I(0.0, 1.0);

HamiltonianModel random_model(int n, std::uint64_t seed, bool with_h2,
                              double h2_norm = 0.3) {
  SuGenerator h0 = random_su(n, derive_stream(seed, 1), 1.0);
  SuGenerator h1 = random_su(n, derive_stream(seed, 2), 1.0);
  if (!with_h2) return HamiltonianModel(h0, h1);
  return HamiltonianModel(h0, h1, random_su(n, derive_stream(seed, 3), h2_norm));
}

ControlField sample_left(const std::function<double(double)>& f, int k,
                         double total_time) {
  std::vector<double> seg(k);
  const double dt = total_time / k;
  for (int i = 0; i < k; ++i) seg[i] = f(dt * i);
  return ControlField(std::move(seg), total_time);
}

ControlField random_field(int k, double total_time, std::uint64_t seed,
                          double amp = 1.0) {
  RandomStream rng(seed);
  std::vector<double> seg(k);
  for (auto& x : seg) x = rng.uniform(-amp, amp);
  return ControlField(std::move(seg), total_time);
}

}  // namespace

TEST_CASE("ControlField validation") {
  CHECK_THROWS_AS(ControlField({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlField({0.1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlField({std::nan("")}, 1.0), std::invalid_argument);
  const ControlField f({0.5, -0.5}, 4.0);
  CHECK(f.count() == 2);
  CHECK(f.dt() == doctest::Approx(2.0));
}

TEST_CASE("generator_at evaluates the quadratic coupling") {
  const HamiltonianModel with_h2 = random_model(3, 5, true);
  const HamiltonianModel no_h2 = with_h2.without_polarizability_term();

  CHECK((generator_at(with_h2, 0.0).mat() - with_h2.drift().mat()).norm() ==
        0.0);

  const Matrix lin =
      no_h2.drift().mat() + 2.0 * no_h2.dipole().mat();
  CHECK((generator_at(no_h2, 2.0).mat() - lin).norm() == 0.0);

  const Matrix quad = with_h2.drift().mat() + 2.0 * with_h2.dipole().mat() +
                      4.0 * with_h2.polarizability()->mat();
  CHECK((generator_at(with_h2, 2.0).mat() - quad).norm() < 1e-15);

  CHECK_THROWS_AS(generator_at(with_h2, std::nan("")),
                  std::invalid_argument);
}

TEST_CASE("propagate constant and trivial cases") {
  // zero drift, zero field: nothing happens
  const HamiltonianModel trivial(SuGenerator::zero(3), SuGenerator::zero(3));
  const auto [u0, t0] = propagate(trivial, ControlField::zeros(4, 2.0));
  CHECK((u0.mat() - Matrix::Identity(3, 3)).norm() < 1e-14);

  // zero field, constant drift: exp(T * iH0)
  const HamiltonianModel model = random_model(3, 7, false);
  const auto [u1, t1] = propagate(model, ControlField::zeros(10, 2.5));
  CHECK((u1.mat() - expm_skew(model.drift(), 2.5).mat()).norm() < 1e-12);
}

TEST_CASE("propagate yields unitaries with det 1 on su models") {
  const HamiltonianModel model = random_model(4, 9, true);
  const ControlField field = random_field(24, 6.0, 1234);
  const auto [u, traj] = propagate(model, field, true);
  CHECK((u.mat().adjoint() * u.mat() - Matrix::Identity(4, 4)).norm() < 1e-9);
  CHECK(std::abs(u.mat().determinant() - Complex(1.0, 0.0)) < 1e-9);
  CHECK(traj->samples.size() == 25);
  CHECK((traj->samples.front().mat() - Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK((traj->samples.back().mat() - u.mat()).norm() == 0.0);
}

TEST_CASE("propagate concatenation") {
  const HamiltonianModel model = random_model(3, 11, true);
  const ControlField field = random_field(16, 4.0, 77);

  std::vector<double> first(field.segments().begin(),
                            field.segments().begin() + 8);
  std::vector<double> second(field.segments().begin() + 8,
                             field.segments().end());
  const Matrix u_first =
      propagate(model, ControlField(first, 2.0)).first.mat();
  const Matrix u_second =
      propagate(model, ControlField(second, 2.0)).first.mat();
  const Matrix full = propagate(model, field).first.mat();
  CHECK((u_second * u_first - full).norm() < 1e-10);
}

TEST_CASE("propagate converges at first order for smooth fields") {
  const HamiltonianModel model = random_model(3, 13, true);
  const double t_total = 1.0;
  auto smooth = [](double t) {
    return 0.1 * std::sin(2.0 * M_PI * t) + 0.05 * std::cos(4.0 * M_PI * t);
  };

  const Matrix ref =
      propagate(model, sample_left(smooth, 3200, t_total)).first.mat();
  const double d100 =
      (propagate(model, sample_left(smooth, 100, t_total)).first.mat() - ref)
          .norm();
  const double d200 =
      (propagate(model, sample_left(smooth, 200, t_total)).first.mat() - ref)
          .norm();
  const double d400 =
      (propagate(model, sample_left(smooth, 400, t_total)).first.mat() - ref)
          .norm();

  CHECK(d100 <= 1e-3);
  // first order in 1/K: each refinement about halves the error
  CHECK(d100 / d200 > 1.4);
  CHECK(d200 / d400 > 1.4);
}

TEST_CASE("variation basis matches finite differences exactly") {
  const HamiltonianModel model = random_model(4, 17, true);
  const ControlField field = random_field(12, 3.0, 555);
  const auto [u, traj] = propagate(model, field, true);
  const auto basis = endpoint_variation_basis(model, field, *traj);
  REQUIRE(basis.size() == 12);

  // directional derivative along a random direction vs central differences
  RandomStream rng(42);
  const auto dir = rng.sphere_vector(12);
  Matrix omega = Matrix::Zero(4, 4);
  for (int k = 0; k < 12; ++k) omega += dir[k] * basis[k].mat();
  const Matrix analytic = u.mat() * omega;

  const double h = 1e-6;
  std::vector<double> up(field.segments()), down(field.segments());
  for (int k = 0; k < 12; ++k) {
    up[k] += h * dir[k];
    down[k] -= h * dir[k];
  }
  const Matrix fd =
      (propagate(model, ControlField(up, 3.0)).first.mat() -
       propagate(model, ControlField(down, 3.0)).first.mat()) /
      (2.0 * h);
  CHECK((analytic - fd).norm() / fd.norm() < 1e-5);
}

TEST_CASE("variation basis: quadratic term vanishes at zero field") {
  const HamiltonianModel with_h2 = random_model(3, 19, true);
  const HamiltonianModel no_h2 = with_h2.without_polarizability_term();
  const ControlField zeros = ControlField::zeros(6, 2.0);

  const auto traj2 = propagate(with_h2, zeros, true).second;
  const auto traj1 = propagate(no_h2, zeros, true).second;
  const auto basis2 = endpoint_variation_basis(with_h2, zeros, *traj2);
  const auto basis1 = endpoint_variation_basis(no_h2, zeros, *traj1);
  for (int k = 0; k < 6; ++k) {
    CHECK((basis2[k].mat() - basis1[k].mat()).norm() == 0.0);
  }
}

TEST_CASE("variation basis reduces to the dipole integrand as dt -> 0") {
  const HamiltonianModel model = random_model(3, 23, false);
  const int k = 400;
  const ControlField field = random_field(k, 0.5, 91);
  const auto traj = propagate(model, field, true).second;
  const auto basis = endpoint_variation_basis(model, field, *traj);
  const double dt = field.dt();
  double worst = 0.0;
  for (int i = 0; i < k; i += 40) {
    const Matrix& uk = traj->samples[i].mat();
    const Matrix first_order = dt * (uk.adjoint() * model.dipole().mat() * uk);
    worst = std::max(worst, (basis[i].mat() - first_order).norm() /
                                first_order.norm());
  }
  CHECK(worst < 1e-3);  // O(dt) relative deviation at dt = 1.25e-3
}

TEST_CASE("first-order consistency of the variation basis") {
  const HamiltonianModel model = random_model(3, 29, true);
  const ControlField field = random_field(10, 2.0, 333);
  const auto [u, traj] = propagate(model, field, true);
  const auto basis = endpoint_variation_basis(model, field, *traj);

  RandomStream rng(4242);
  double prev = -1.0;
  for (int trial = 0; trial < 3; ++trial) {
    const double h = 1e-2 / (1 << trial);
    const auto dir = rng.sphere_vector(10);
    // fixed direction across h: reuse first draw
    static std::vector<double> fixed_dir;
    if (trial == 0) fixed_dir = dir;

    std::vector<double> perturbed(field.segments());
    Matrix omega = Matrix::Zero(3, 3);
    for (int k = 0; k < 10; ++k) {
      perturbed[k] += h * fixed_dir[k];
      omega += h * fixed_dir[k] * basis[k].mat();
    }
    const Matrix lhs =
        propagate(model, ControlField(perturbed, 2.0)).first.mat();
    const Matrix rhs = u.mat() * oracle::expm_taylor(omega, 1.0);
    const double err = (lhs - rhs).norm();
    if (prev > 0.0) {
      CHECK(prev / err > 3.0);  // O(h^2): halving h quarters the error
    }
    prev = err;
  }
}

TEST_CASE("variation basis spans su(n) for a controllable model") {
  const HamiltonianModel model = random_model(4, 31, true);
  const int k = 30;
  const ControlField field = random_field(k, 10.0, 777);
  const auto traj = propagate(model, field, true).second;
  const auto basis = endpoint_variation_basis(model, field, *traj);

  Eigen::MatrixXd v(k, 32);
  for (int i = 0; i < k; ++i) {
    const Matrix& m = basis[i].mat();
    for (int c = 0; c < 16; ++c) {
      v(i, c) = m(c % 4, c / 4).real();
      v(i, 16 + c) = m(c % 4, c / 4).imag();
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  }
  CHECK(rank == 15);
}
