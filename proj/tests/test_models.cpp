#include <doctest.h>

#include <cmath>

#include "qcl/models.hpp"
#include "qcl/rng.hpp"
#include "support/oracles.hpp"

using namespace qcl;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("heisenberg_model tensor structure") {
  // single-term drift: J = (1, 0, 0) gives i sx (x) sx
  const HamiltonianModel m = heisenberg_model(HeisenbergParams{{1.0, 0.0, 0.0}});
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 3) = I;
  expected(1, 2) = I;
  expected(2, 1) = I;
  expected(3, 0) = I;
  CHECK((m.drift().mat() - expected).norm() < 1e-15);

  Matrix dipole = Matrix::Zero(4, 4);
  dipole.diagonal() << I, -I, I, -I;
  CHECK((m.dipole().mat() - dipole).norm() < 1e-15);
  CHECK_FALSE(m.has_polarizability());
}

TEST_CASE("heisenberg family is uncontrollable through the dipole alone") {
  const double s = 1.0 / std::sqrt(3.0);
  const HamiltonianModel m = heisenberg_model(HeisenbergParams{{s, s, s}});
  const int rank = lie_closure_rank({m.drift(), m.dipole()});
  CHECK(rank < 15);

  // commuting corner case: [sz (x) sz, I (x) sz] = 0
  const HamiltonianModel mz = heisenberg_model(HeisenbergParams{{0.0, 0.0, 1.0}});
  CHECK(commutator(mz.drift(), mz.dipole()).mat().norm() < 1e-14);
  CHECK(lie_closure_rank({mz.drift(), mz.dipole()}) <= 2);
}

TEST_CASE("with_polarizability restores controllability") {
  const double s = 1.0 / std::sqrt(3.0);
  const HamiltonianModel base = heisenberg_model(HeisenbergParams{{s, s, s}});
  const HamiltonianModel aug = with_polarizability(base, 424242, 0.1);

  REQUIRE(aug.has_polarizability());
  CHECK(aug.polarizability()->norm() == doctest::Approx(0.1).epsilon(1e-12));

  const HamiltonianModel again = with_polarizability(base, 424242, 0.1);
  CHECK((aug.polarizability()->mat() - again.polarizability()->mat()).norm() ==
        0.0);

  const int rank = lie_closure_rank(
      {aug.drift(), aug.dipole(), *aug.polarizability()});
  CHECK(rank == 15);
}

TEST_CASE("random heisenberg couplings sit on the unit sphere") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto params = random_heisenberg_params(seed);
    const double norm = std::sqrt(params.j[0] * params.j[0] +
                                  params.j[1] * params.j[1] +
                                  params.j[2] * params.j[2]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("system_e reproduces the published matrices") {
  const SystemESetup setup = system_e();
  const double a = 5.0 * std::sqrt(2.0 / 3.0);

  // stored generators are -i*H0, -i*H1 (Schroedinger sign)
  CHECK(setup.model.drift().mat()(0, 0) ==
        Complex(0.0, -(1.0 + M_PI / 1000.0)));
  CHECK(setup.model.dipole().mat()(0, 0).imag() == doctest::Approx(a));
  CHECK(setup.total_time == doctest::Approx(1000.0));

  // H1 is real symmetric: the stored generator is purely imaginary, symmetric
  const Matrix h1 = setup.model.dipole().mat() / (-I);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(h1(i, j).imag() == doctest::Approx(0.0));
      CHECK(h1(i, j).real() == doctest::Approx(h1(j, i).real()));
    }
  }
  CHECK(h1(1, 1).real() == doctest::Approx(-4.0));
  CHECK(h1(2, 2).real() == doctest::Approx(-1.0));
  CHECK(h1(0, 2).real() == doctest::Approx(0.0));

  // nonzero trace is kept: u(n) mode
  CHECK_FALSE(setup.model.drift().is_traceless());
  CHECK_FALSE(setup.model.dipole().is_traceless());
  CHECK_FALSE(setup.model.has_polarizability());
}

TEST_CASE("system_e polarizability variant keeps the 1/10 norm ratio") {
  const SystemESetup setup = system_e(std::uint64_t{7});
  REQUIRE(setup.model.has_polarizability());
  const double ratio =
      setup.model.polarizability()->norm() / setup.model.dipole().norm();
  CHECK(ratio == doctest::Approx(0.1).epsilon(1e-12));

  const SystemESetup again = system_e(std::uint64_t{7});
  CHECK((setup.model.polarizability()->mat() -
         again.model.polarizability()->mat())
            .norm() == 0.0);
}

TEST_CASE("system_e zero-field fidelity sits at the known trap value") {
  const SystemESetup setup = system_e();
  // at E = 0 the propagator is exp(T*iH0) and the diagonal phases cancel
  const Unitary u = expm_skew(setup.model.drift(), setup.total_time);
  const double f = fidelity_raw(u.mat(), setup.goal.mat());
  // |e^{-i theta} + 2 i cos(phi)|^2 / 9
  const double expected =
      std::norm(std::polar(1.0, -2.0 * M_PI / 3.0) +
                Complex(0.0, 2.0) * std::cos(-3.0 * M_PI / 4.0)) /
      9.0;
  CHECK(f == doctest::Approx(expected).epsilon(1e-10));
  CHECK(f < 0.95);
}

TEST_CASE("random_tuple determinism, norms and genericity") {
  const RandomTuple t1 = random_tuple(4, 7, 1.0, 1.0, 0.1);
  const RandomTuple t2 = random_tuple(4, 7, 1.0, 1.0, 0.1);
  CHECK((t1.model.drift().mat() - t2.model.drift().mat()).norm() == 0.0);
  CHECK((t1.goal.mat() - t2.goal.mat()).norm() == 0.0);

  CHECK(t1.model.drift().norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t1.model.dipole().norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t1.model.polarizability()->norm() ==
        doctest::Approx(0.1).epsilon(1e-12));

  CHECK(lie_closure_rank({t1.model.drift(), t1.model.dipole()}) == 15);
}

TEST_CASE("SystemEParams guards the published values") {
  const SystemEParams p = SystemEParams::canonical();
  CHECK(p.b() == 4.0);
  CHECK(p.total_time() == 1000.0);
  CHECK(p.alpha() == doctest::Approx(M_PI / 1000.0));

  const SystemEParams v =
      SystemEParams::variant(1.0, 2.0, 3.0, 0.1, 0.2, 10.0, 0.3);
  CHECK(v.a() == 1.0);
  const SystemESetup setup = system_e(std::nullopt, v);
  CHECK(setup.total_time == doctest::Approx(10.0));
}
