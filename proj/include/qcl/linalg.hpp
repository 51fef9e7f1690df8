#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <cstdint>
#include <vector>

namespace qcl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Tolerances for the structural invariants enforced by the strong types.
inline constexpr double kSkewTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

bool all_finite(const Matrix& m);

// Skew-Hermitian generator. The su(n) factory additionally requires a
// vanishing trace; the u(n) factory admits a trace component (needed for
// models whose Hamiltonians are kept verbatim rather than trace-projected).
class SuGenerator {
 public:
  static SuGenerator su(Matrix m);
  static SuGenerator u(Matrix m);
  static SuGenerator zero(int n, bool traceless = true);

  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  bool is_traceless() const { return traceless_; }
  double norm() const { return mat_.norm(); }

  SuGenerator operator+(const SuGenerator& rhs) const;
  SuGenerator operator-(const SuGenerator& rhs) const;
  SuGenerator operator*(double s) const;

 private:
  SuGenerator(Matrix m, bool traceless)
      : mat_(std::move(m)), traceless_(traceless) {}
  Matrix mat_;
  bool traceless_;
};

inline SuGenerator operator*(double s, const SuGenerator& a) { return a * s; }

// Unitary matrix, validated on construction.
class Unitary {
 public:
  static Unitary checked(Matrix m);
  static Unitary identity(int n);

  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  explicit Unitary(Matrix m) : mat_(std::move(m)) {}
  Matrix mat_;
};

// exp(scale * A) for skew-Hermitian A, via the eigendecomposition of the
// Hermitian matrix -iA. Unconditionally stable on this matrix class and
// unitary to machine precision.
Unitary expm_skew(const SuGenerator& a, double scale);

// Preallocated buffers for tight exponential loops (no per-call allocation
// beyond what the eigensolver reuses internally).
struct ExpmWorkspace {
  explicit ExpmWorkspace(int n) : es(n), herm(n, n), phased(n, n) {}
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  Matrix herm, phased;
};

void expm_skew_ws(const Matrix& a, double scale, ExpmWorkspace& ws,
                  Matrix& out);

// Re Tr(A^dagger B) - the real trace inner product.
double trace_inner(const SuGenerator& a, const SuGenerator& b);
double trace_inner_raw(const Matrix& a, const Matrix& b);

SuGenerator commutator(const SuGenerator& a, const SuGenerator& b);

// Real dimension of the Lie algebra generated by repeated commutators of the
// given su(n) elements. Directions are accumulated Gram-Schmidt style: a
// candidate counts as new if its component orthogonal to the current span
// exceeds 1e-8 of its own norm.
int lie_closure_rank(const std::vector<SuGenerator>& generators);

// Seeded random su(n) element: i.i.d. complex Gaussian entries,
// antisymmetrized, trace projected out, rescaled to target_norm.
SuGenerator random_su(int n, std::uint64_t seed, double target_norm);

// Seeded Haar-random goal gate, determinant-normalized into SU(n).
Unitary random_unitary_goal(int n, std::uint64_t seed);

}  // namespace qcl
