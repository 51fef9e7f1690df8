#include "qcl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <stdexcept>

#include "qcl/rng.hpp"

namespace qcl {

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

SuGenerator SuGenerator::su(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("SuGenerator: matrix must be square");
  }
  if (!all_finite(m)) {
    throw std::invalid_argument("SuGenerator: entries must be finite");
  }
  const double scale = 1.0 + m.norm();
  if ((m + m.adjoint()).norm() > kSkewTol * scale) {
    throw std::invalid_argument("SuGenerator: matrix is not skew-Hermitian");
  }
  if (std::abs(m.trace()) > kTraceTol * scale) {
    throw std::invalid_argument("SuGenerator: matrix is not traceless");
  }
  return SuGenerator(std::move(m), true);
}

SuGenerator SuGenerator::u(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("SuGenerator: matrix must be square");
  }
  if (!all_finite(m)) {
    throw std::invalid_argument("SuGenerator: entries must be finite");
  }
  const double scale = 1.0 + m.norm();
  if ((m + m.adjoint()).norm() > kSkewTol * scale) {
    throw std::invalid_argument("SuGenerator: matrix is not skew-Hermitian");
  }
  const bool traceless = std::abs(m.trace()) <= kTraceTol * scale;
  return SuGenerator(std::move(m), traceless);
}

SuGenerator SuGenerator::zero(int n, bool traceless) {
  return SuGenerator(Matrix::Zero(n, n), traceless);
}

SuGenerator SuGenerator::operator+(const SuGenerator& rhs) const {
  if (dim() != rhs.dim()) {
    throw std::invalid_argument("SuGenerator: dimension mismatch");
  }
  return SuGenerator(mat_ + rhs.mat_, traceless_ && rhs.traceless_);
}

SuGenerator SuGenerator::operator-(const SuGenerator& rhs) const {
  if (dim() != rhs.dim()) {
    throw std::invalid_argument("SuGenerator: dimension mismatch");
  }
  return SuGenerator(mat_ - rhs.mat_, traceless_ && rhs.traceless_);
}

SuGenerator SuGenerator::operator*(double s) const {
  if (!std::isfinite(s)) {
    throw std::invalid_argument("SuGenerator: non-finite scale");
  }
  return SuGenerator(mat_ * s, traceless_);
}

Unitary Unitary::checked(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("Unitary: matrix must be square");
  }
  const int n = static_cast<int>(m.rows());
  if ((m.adjoint() * m - Matrix::Identity(n, n)).norm() > kUnitaryTol) {
    throw std::invalid_argument("Unitary: matrix is not unitary");
  }
  return Unitary(std::move(m));
}

Unitary Unitary::identity(int n) {
  return Unitary(Matrix::Identity(n, n));
}

void expm_skew_ws(const Matrix& a, double scale, ExpmWorkspace& ws,
                  Matrix& out) {
  // -iA is Hermitian for skew-Hermitian A; exp(scale*A) = V e^{i*scale*L} V^+.
  ws.herm = a * Complex(0.0, -1.0);
  ws.es.compute(ws.herm);
  const auto& evals = ws.es.eigenvalues();
  const auto& v = ws.es.eigenvectors();
  const int n = static_cast<int>(a.rows());
  ws.phased = v;
  for (int j = 0; j < n; ++j) {
    const double ang = scale * evals(j);
    ws.phased.col(j) *= Complex(std::cos(ang), std::sin(ang));
  }
  out.noalias() = ws.phased * v.adjoint();
}

Unitary expm_skew(const SuGenerator& a, double scale) {
  if (!std::isfinite(scale)) {
    throw std::invalid_argument("expm_skew: non-finite scale");
  }
  const int n = a.dim();
  Matrix out(n, n);
  ExpmWorkspace ws(n);
  expm_skew_ws(a.mat(), scale, ws, out);
  return Unitary::checked(std::move(out));
}

double trace_inner_raw(const Matrix& a, const Matrix& b) {
  return a.conjugate().cwiseProduct(b).sum().real();
}

double trace_inner(const SuGenerator& a, const SuGenerator& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("trace_inner: dimension mismatch");
  }
  return trace_inner_raw(a.mat(), b.mat());
}

SuGenerator commutator(const SuGenerator& a, const SuGenerator& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("commutator: dimension mismatch");
  }
  Matrix c = a.mat() * b.mat() - b.mat() * a.mat();
  // [A,B] is skew-Hermitian and traceless by construction; symmetrize the
  // floating point residue away so the invariant holds exactly at scale.
  c = 0.5 * (c - c.adjoint().eval());
  const int n = a.dim();
  c.diagonal().array() -= c.trace() / static_cast<double>(n);
  return SuGenerator::su(std::move(c));
}

namespace {

Eigen::VectorXd vectorize_real(const Matrix& m) {
  const auto n2 = m.size();
  Eigen::VectorXd v(2 * n2);
  v.head(n2) = Eigen::Map<const Eigen::VectorXcd>(m.data(), n2).real();
  v.tail(n2) = Eigen::Map<const Eigen::VectorXcd>(m.data(), n2).imag();
  return v;
}

}  // namespace

int lie_closure_rank(const std::vector<SuGenerator>& generators) {
  if (generators.empty()) {
    throw std::invalid_argument("lie_closure_rank: empty generator list");
  }
  const int n = generators.front().dim();
  for (const auto& g : generators) {
    if (g.dim() != n) {
      throw std::invalid_argument("lie_closure_rank: dimension mismatch");
    }
    if (!g.is_traceless()) {
      throw std::invalid_argument("lie_closure_rank: generators must be su(n)");
    }
  }
  const int max_dim = n * n - 1;

  std::vector<Matrix> basis;            // accepted directions, as matrices
  std::vector<Eigen::VectorXd> ortho;   // same directions, orthonormalized

  auto try_add = [&](const Matrix& cand) -> bool {
    const double cnorm = cand.norm();
    if (cnorm == 0.0) return false;
    Eigen::VectorXd v = vectorize_real(cand);
    // two rounds of modified Gram-Schmidt
    for (int round = 0; round < 2; ++round) {
      for (const auto& q : ortho) {
        v -= q.dot(v) * q;
      }
    }
    const double rnorm = v.norm();
    if (rnorm <= 1e-8 * cnorm) return false;
    v /= rnorm;
    ortho.push_back(v);
    // reconstruct the orthonormalized direction as a matrix
    const int n2 = n * n;
    Matrix m(n, n);
    Eigen::Map<Eigen::VectorXcd>(m.data(), n2) =
        v.head(n2).cast<Complex>() + Complex(0, 1) * v.tail(n2).cast<Complex>();
    basis.push_back(std::move(m));
    return true;
  };

  for (const auto& g : generators) try_add(g.mat());

  // breadth-first closure: bracket every new direction against the basis
  std::size_t frontier = 0;
  while (frontier < basis.size() &&
         static_cast<int>(basis.size()) < max_dim) {
    const Matrix a = basis[frontier];
    ++frontier;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (static_cast<int>(basis.size()) >= max_dim) break;
      const Matrix c = a * basis[j] - basis[j] * a;
      try_add(c);
    }
  }
  return static_cast<int>(basis.size());
}

SuGenerator random_su(int n, std::uint64_t seed, double target_norm) {
  if (n < 2) {
    throw std::invalid_argument("random_su: n must be >= 2");
  }
  if (!(target_norm > 0.0) || !std::isfinite(target_norm)) {
    throw std::invalid_argument("random_su: target_norm must be positive");
  }
  RandomStream rng(derive_stream(seed, 0x5u));
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = Complex(rng.gauss(), rng.gauss());
    }
  }
  m = 0.5 * (m - m.adjoint().eval());
  m.diagonal().array() -= m.trace() / static_cast<double>(n);
  const double nrm = m.norm();
  if (nrm == 0.0) {
    throw std::runtime_error("random_su: degenerate sample");
  }
  m *= target_norm / nrm;
  return SuGenerator::su(std::move(m));
}

Unitary random_unitary_goal(int n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("random_unitary_goal: n must be >= 2");
  }
  RandomStream rng(derive_stream(seed, 0x11u));
  Matrix z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      z(i, j) = Complex(rng.gauss(), rng.gauss());
    }
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix the phase convention so the distribution is Haar
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= (ad > 0.0) ? d / ad : Complex(1.0, 0.0);
  }
  // remove the determinant phase: q in SU(n)
  const Complex det = q.determinant();
  const double arg = std::arg(det);
  q *= std::polar(1.0, -arg / static_cast<double>(n));
  return Unitary::checked(std::move(q));
}

}  // namespace qcl
