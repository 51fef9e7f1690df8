#include <doctest.h>

#include "qcl/linalg.hpp"
#include "qcl/rng.hpp"
#include "support/oracles.hpp"

using namespace qcl;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("SuGenerator factories enforce structure") {
  Matrix good = I * oracle::pauli_x();
  CHECK_NOTHROW(SuGenerator::su(good));

  Matrix not_skew = oracle::pauli_x();  // Hermitian, not skew
  not_skew(0, 1) = Complex(2.0, 0.0);
  CHECK_THROWS_AS(SuGenerator::su(not_skew), std::invalid_argument);

  Matrix traced = I * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(SuGenerator::su(traced), std::invalid_argument);
  CHECK_NOTHROW(SuGenerator::u(traced));  // valid u(n) element

  Matrix bad = good;
  bad(0, 0) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(SuGenerator::su(bad), std::invalid_argument);
}

TEST_CASE("expm_skew identity and Pauli closed forms") {
  const SuGenerator a = SuGenerator::su(I * oracle::pauli_x());

  const Unitary id = expm_skew(a, 0.0);
  CHECK((id.mat() - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));

  // exp(i (pi/2) sx) = i sx
  const Unitary u = expm_skew(a, M_PI / 2.0);
  CHECK((u.mat() - I * oracle::pauli_x()).norm() < 1e-12);
}

TEST_CASE("expm_skew matches the Taylor oracle on su(4)") {
  const SuGenerator a = random_su(4, 20240801, 1.7);
  const Unitary u = expm_skew(a, 0.37);
  const Matrix ref = oracle::expm_taylor(a.mat(), 0.37);
  CHECK((u.mat() - ref).norm() < 1e-10);

  // det = 1 for traceless generators
  CHECK(std::abs(u.mat().determinant() - Complex(1.0, 0.0)) < 1e-10);
}

TEST_CASE("expm_skew group property") {
  RandomStream rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const SuGenerator a = random_su(3, 100 + trial, 1.0);
    const double s = rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(-1.0, 1.0);
    const Matrix lhs = expm_skew(a, s).mat() * expm_skew(a, t).mat();
    const Matrix rhs = expm_skew(a, s + t).mat();
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("trace_inner Pauli values and oracle") {
  const SuGenerator sx = SuGenerator::su(I * oracle::pauli_x());
  const SuGenerator sy = SuGenerator::su(I * oracle::pauli_y());
  CHECK(trace_inner(sx, sx) == doctest::Approx(2.0));
  CHECK(trace_inner(sx, sy) == doctest::Approx(0.0));

  const SuGenerator a = random_su(4, 11, 1.3);
  const SuGenerator b = random_su(4, 12, 0.6);
  CHECK(std::abs(trace_inner(a, b) -
                 oracle::trace_inner_loops(a.mat(), b.mat())) < 1e-13);

  // symmetry and bilinearity over the reals
  CHECK(trace_inner(a, b) == doctest::Approx(trace_inner(b, a)));
  CHECK(trace_inner(a * 2.0, b) == doctest::Approx(2.0 * trace_inner(a, b)));

  const SuGenerator c = random_su(3, 13, 1.0);
  CHECK_THROWS_AS(trace_inner(a, c), std::invalid_argument);
}

TEST_CASE("commutator Pauli algebra and Jacobi identity") {
  const SuGenerator sx = SuGenerator::su(I * oracle::pauli_x());
  const SuGenerator sy = SuGenerator::su(I * oracle::pauli_y());
  const SuGenerator sz = SuGenerator::su(I * oracle::pauli_z());

  // [i sx, i sy] = -2 i sz
  CHECK((commutator(sx, sy).mat() - (-2.0 * I * oracle::pauli_z())).norm() <
        1e-14);
  CHECK(commutator(sz, sz).mat().norm() == doctest::Approx(0.0));

  const SuGenerator a = random_su(3, 21, 1.0);
  const SuGenerator b = random_su(3, 22, 1.0);
  const SuGenerator c = random_su(3, 23, 1.0);
  const Matrix jacobi = commutator(a, commutator(b, c)).mat() +
                        commutator(b, commutator(c, a)).mat() +
                        commutator(c, commutator(a, b)).mat();
  CHECK(jacobi.norm() < 1e-12);
}

TEST_CASE("ad-invariance of the trace inner product") {
  for (int trial = 0; trial < 5; ++trial) {
    const SuGenerator a = random_su(4, 31 + trial, 1.0);
    const SuGenerator b = random_su(4, 41 + trial, 1.0);
    const SuGenerator c = random_su(4, 51 + trial, 1.0);
    const double lhs = trace_inner(a, commutator(b, c));
    const double rhs = -trace_inner(commutator(b, a), c);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("lie_closure_rank on known algebras") {
  const SuGenerator sx = SuGenerator::su(I * oracle::pauli_x());
  const SuGenerator sy = SuGenerator::su(I * oracle::pauli_y());
  CHECK(lie_closure_rank({sx, sy}) == 3);

  // generic pair generates all of su(4)
  const SuGenerator a = random_su(4, 61, 1.0);
  const SuGenerator b = random_su(4, 62, 1.0);
  CHECK(lie_closure_rank({a, b}) == 15);

  // invariant under replacing {A, B} with {A, B + 0.5 A}
  CHECK(lie_closure_rank({a, b + a * 0.5}) == 15);

  CHECK_THROWS_AS(lie_closure_rank({}), std::invalid_argument);
}

TEST_CASE("random_su determinism and normalization") {
  const SuGenerator a = random_su(4, 1, 1.0);
  const SuGenerator b = random_su(4, 1, 1.0);
  CHECK((a.mat() - b.mat()).norm() == 0.0);  // bitwise identical

  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));

  const SuGenerator c = random_su(4, 2, 1.0);
  CHECK((a.mat() - c.mat()).norm() > 1e-6);

  CHECK_THROWS_AS(random_su(1, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(random_su(4, 1, -1.0), std::invalid_argument);
}

TEST_CASE("random_unitary_goal lands in SU(n)") {
  const Unitary g1 = random_unitary_goal(4, 99);
  const Unitary g2 = random_unitary_goal(4, 99);
  CHECK((g1.mat() - g2.mat()).norm() == 0.0);

  CHECK(std::abs(g1.mat().determinant() - Complex(1.0, 0.0)) < 1e-10);
  for (int j = 0; j < 4; ++j) {
    CHECK(g1.mat().col(j).norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}
