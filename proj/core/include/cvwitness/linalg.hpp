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

#pragma once

// Dense symmetric matrix kernel: spectral decomposition, PSD square roots,
// the quantumness bound tr sqrt(sqrt(X) P sqrt(X)) with its gradient, and
// symplectic spectra of phase-space covariance matrices.
//
// Units follow the usual quadrature convention with vacuum variance 1/2.
// Matrices are small (at most a few dozen modes), so everything is dense.

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace cvwitness {

/// Eigenvalues in [-kPsdTolerance, 0) are treated as rounding noise and
/// clipped to zero; anything lower is rejected as not PSD.
inline constexpr double kPsdTolerance = 1e-10;

/// Minimum eigenvalue for a matrix to count as strictly positive definite
/// in gradient computations and ascent feasibility checks.
inline constexpr double kPdThreshold = 1e-12;

/// Real symmetric matrix. Construction symmetrizes (A + A^T)/2 and rejects
/// non-square or non-finite input, so every instance is exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix constant(int n, double value);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
  /// a a^T
  static SymMatrix outer(const Eigen::VectorXd& a);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  /// Sets entry (i, j) and its mirror (j, i).
  void set(int i, int j, double value);

  double max_abs() const;
  double trace() const { return m_.trace(); }
  std::vector<std::vector<double>> rows() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns matching `values`
};

/// Descending symmetric eigendecomposition, A = V diag(w) V^T.
EigenDecomposition eig_sym(const SymMatrix& a);

/// Smallest eigenvalue of a symmetric matrix (eigenvalues only).
double min_eigenvalue(const SymMatrix& a);

/// Throws NotPSDError when the smallest eigenvalue is below -kPsdTolerance.
/// `what` names the matrix in the error message.
void require_psd(const SymMatrix& a, const char* what);

/// Principal square root of a PSD matrix; negatives within tolerance clipped.
SymMatrix sqrt_psd(const SymMatrix& a);

/// Quantumness bound B(X, P) = tr sqrt(sqrt(X) P sqrt(X)), the minimum of
/// tr(X gxx) + tr(P gpp) over all quantum states.
double quantum_bound(const SymMatrix& x, const SymMatrix& p);

struct QuantumBoundGradient {
  SymMatrix d_x;
  SymMatrix d_p;
};

/// Analytic gradient of quantum_bound with respect to the entries of X and P:
///   dP = 1/2 sqrt(X) (sqrt(X) P sqrt(X))^{-1/2} sqrt(X), dX symmetric in roles.
/// Both inputs must be strictly PD; throws SingularGradientError otherwise.
QuantumBoundGradient quantum_bound_gradient(const SymMatrix& x,
                                            const SymMatrix& p);

/// Value and gradient together, sharing the decompositions.
struct QuantumBoundWithGradient {
  double value;
  QuantumBoundGradient gradient;
};
QuantumBoundWithGradient quantum_bound_with_gradient(const SymMatrix& x,
                                                     const SymMatrix& p);

struct SymplecticSpectrum {
  std::vector<double> values;  // descending, all >= 0
  double min() const { return values.empty() ? 0.0 : values.back(); }
};

/// Symplectic eigenvalues of a 2n x 2n phase-space matrix ordered (x, p):
/// the moduli of the +-i lambda eigenvalue pairs of J gamma.
SymplecticSpectrum symplectic_spectrum(const SymMatrix& gamma);

/// Block-diagonal phase-space matrix diag(a, b).
SymMatrix block_diagonal(const SymMatrix& a, const SymMatrix& b);

/// tr sqrt(sqrt(X) P sqrt(X)) - tr(sqrt(X) sqrt(P)); never negative beyond
/// rounding (Araki-Lieb-Thirring special case).
double alt_inequality_gap(const SymMatrix& x, const SymMatrix& p);

}  // namespace cvwitness
