// Copyright 2026 The cvwitness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvwitness/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvwitness/error.hpp"

namespace cvwitness {
namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim()
       << ")";
    throw DimensionError(os.str());
  }
}

// V diag(f(w)) V^T for a decomposition already in hand.
template <class F>
Eigen::MatrixXd spectral_apply(const EigenDecomposition& d, F f) {
  Eigen::VectorXd fw = d.values.unaryExpr(f);
  return d.vectors * fw.asDiagonal() * d.vectors.transpose();
}

double clip_sqrt(double w) { return std::sqrt(std::max(w, 0.0)); }

// Square roots of a PSD spectrum with eigenvalues at rounding level (below
// n * eps * max |w|) treated as exact zeros, so that a singular factor adds
// 0 rather than sqrt(eps) to traces.
auto rounded_sqrt(const Eigen::VectorXd& w) {
  const double cutoff = static_cast<double>(w.size()) *
                        std::numeric_limits<double>::epsilon() *
                        (w.size() ? w.cwiseAbs().maxCoeff() : 0.0);
  return [cutoff](double v) { return v <= cutoff ? 0.0 : std::sqrt(v); };
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "SymMatrix: matrix is " << m.rows() << "x" << m.cols()
       << ", expected square";
    throw DimensionError(os.str());
  }
  if (!m.allFinite()) throw Error("SymMatrix: non-finite entry");
  m_ = symmetrized(m);
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw DimensionError("SymMatrix: ragged initializer");
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  *this = SymMatrix(m);
}

SymMatrix SymMatrix::zero(int n) {
  return SymMatrix(Eigen::MatrixXd::Zero(n, n));
}

SymMatrix SymMatrix::identity(int n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::constant(int n, double value) {
  return SymMatrix(Eigen::MatrixXd::Constant(n, n, value));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      std::ostringstream os;
      os << "row " << i << " has " << rows[i].size() << " entries, expected "
         << n;
      throw DimensionError(os.str());
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return SymMatrix(m);
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& a) {
  return SymMatrix(a * a.transpose());
}

void SymMatrix::set(int i, int j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

double SymMatrix::max_abs() const {
  return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff();
}

std::vector<std::vector<double>> SymMatrix::rows() const {
  std::vector<std::vector<double>> out(m_.rows());
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    out[i].resize(m_.cols());
    for (Eigen::Index j = 0; j < m_.cols(); ++j) out[i][j] = m_(i, j);
  }
  return out;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator+");
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator-");
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

EigenDecomposition eig_sym(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_sym: eigen-solver did not converge (n=" << a.dim()
       << ", max|a_ij|=" << a.max_abs() << ")";
    throw EigenSolverError(os.str());
  }
  // Eigen returns ascending order.
  EigenDecomposition d;
  d.values = solver.eigenvalues().reverse();
  d.vectors = solver.eigenvectors().rowwise().reverse();
  return d;
}

double min_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "min_eigenvalue: eigen-solver did not converge (n=" << a.dim()
       << ", max|a_ij|=" << a.max_abs() << ")";
    throw EigenSolverError(os.str());
  }
  return solver.eigenvalues()(0);
}

void require_psd(const SymMatrix& a, const char* what) {
  const double lo = min_eigenvalue(a);
  if (lo < -kPsdTolerance) {
    std::ostringstream os;
    os << what << " is not positive semidefinite (min eigenvalue " << lo
       << ")";
    throw NotPSDError(os.str(), lo);
  }
}

namespace {

EigenDecomposition checked_psd_decomposition(const SymMatrix& a,
                                             const char* what) {
  EigenDecomposition d = eig_sym(a);
  if (d.values.size() > 0 && d.values(d.values.size() - 1) < -kPsdTolerance) {
    const double lo = d.values(d.values.size() - 1);
    std::ostringstream os;
    os << what << " is not positive semidefinite (min eigenvalue " << lo
       << ")";
    throw NotPSDError(os.str(), lo);
  }
  return d;
}

}  // namespace

SymMatrix sqrt_psd(const SymMatrix& a) {
  const EigenDecomposition d = checked_psd_decomposition(a, "sqrt_psd argument");
  return SymMatrix(spectral_apply(d, rounded_sqrt(d.values)));
}

double quantum_bound(const SymMatrix& x, const SymMatrix& p) {
  require_same_dim(x, p, "quantum_bound");
  require_psd(p, "P");
  const EigenDecomposition dx = checked_psd_decomposition(x, "X");
  const Eigen::MatrixXd sx = spectral_apply(dx, rounded_sqrt(dx.values));
  const SymMatrix inner(sx * p.matrix() * sx);
  // inner is PSD by construction; negative eigenvalues are rounding only.
  const EigenDecomposition d = eig_sym(inner);
  return d.values.unaryExpr(rounded_sqrt(d.values)).sum();
}

namespace {

// 1/2 sqrt(A) (sqrt(A) B sqrt(A))^{-1/2} sqrt(A): derivative of
// tr sqrt(sqrt(A) B sqrt(A)) with respect to B.
Eigen::MatrixXd half_geometric_factor(const EigenDecomposition& a_dec,
                                      const SymMatrix& b, double* value,
                                      const char* role) {
  const Eigen::MatrixXd sa = spectral_apply(a_dec, clip_sqrt);
  const EigenDecomposition inner = eig_sym(SymMatrix(sa * b.matrix() * sa));
  const double lo = inner.values(inner.values.size() - 1);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << "quantum_bound_gradient: singular inner matrix for d" << role
       << " (min eigenvalue " << lo << ")";
    throw SingularGradientError(os.str());
  }
  if (value) *value = inner.values.unaryExpr(&clip_sqrt).sum();
  const Eigen::MatrixXd inv_root =
      spectral_apply(inner, [](double w) { return 1.0 / std::sqrt(w); });
  return symmetrized(0.5 * sa * inv_root * sa);
}

EigenDecomposition checked_pd_decomposition(const SymMatrix& a,
                                            const char* what) {
  EigenDecomposition d = eig_sym(a);
  const double lo = d.values(d.values.size() - 1);
  if (!(lo > kPdThreshold)) {
    std::ostringstream os;
    os << "quantum_bound_gradient: " << what
       << " is not strictly positive definite (min eigenvalue " << lo << ")";
    throw SingularGradientError(os.str());
  }
  return d;
}

}  // namespace

QuantumBoundWithGradient quantum_bound_with_gradient(const SymMatrix& x,
                                                     const SymMatrix& p) {
  require_same_dim(x, p, "quantum_bound_gradient");
  if (x.dim() == 0) return {0.0, {SymMatrix(), SymMatrix()}};
  const EigenDecomposition xd = checked_pd_decomposition(x, "X");
  const EigenDecomposition pd = checked_pd_decomposition(p, "P");
  double value = 0.0;
  Eigen::MatrixXd dp = half_geometric_factor(xd, p, &value, "P");
  Eigen::MatrixXd dx = half_geometric_factor(pd, x, nullptr, "X");
  return {value, {SymMatrix(dx), SymMatrix(dp)}};
}

QuantumBoundGradient quantum_bound_gradient(const SymMatrix& x,
                                            const SymMatrix& p) {
  return quantum_bound_with_gradient(x, p).gradient;
}

SymMatrix block_diagonal(const SymMatrix& a, const SymMatrix& b) {
  const int n = a.dim();
  const int m = b.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + m, n + m);
  g.topLeftCorner(n, n) = a.matrix();
  g.bottomRightCorner(m, m) = b.matrix();
  return SymMatrix(g);
}

SymplecticSpectrum symplectic_spectrum(const SymMatrix& gamma) {
  const int dim = gamma.dim();
  if (dim % 2 != 0) {
    std::ostringstream os;
    os << "symplectic_spectrum: phase-space matrix must be 2n x 2n, got "
       << dim;
    throw DimensionError(os.str());
  }
  const int n = dim / 2;
  SymplecticSpectrum out;
  if (n == 0) return out;

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(j * gamma.matrix(),
                                             /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "symplectic_spectrum: eigen-solver did not converge (n=" << n
       << ", max|g_ij|=" << gamma.max_abs() << ")";
    throw EigenSolverError(os.str());
  }
  std::vector<double> moduli(dim);
  for (int k = 0; k < dim; ++k) moduli[k] = std::abs(solver.eigenvalues()(k));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  // Eigenvalues come in pairs +-i lambda; after sorting the moduli every
  // pair is adjacent.
  out.values.reserve(n);
  for (int k = 0; k < dim; k += 2) out.values.push_back(moduli[k]);
  return out;
}

double alt_inequality_gap(const SymMatrix& x, const SymMatrix& p) {
  require_same_dim(x, p, "alt_inequality_gap");
  const SymMatrix sx = sqrt_psd(x);
  const SymMatrix sp = sqrt_psd(p);
  return quantum_bound(x, p) - (sx.matrix() * sp.matrix()).trace();
}

}  // namespace cvwitness
