#pragma once

#include <Eigen/Dense>

namespace ddctl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense symmetric matrix. The stored entries are symmetrized on
/// construction, so entries() always equals its transpose exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::Ref<const MatrixXd>& m);

  static SymMatrix Identity(int order);

  int order() const { return static_cast<int>(m_.rows()); }
  const MatrixXd& entries() const { return m_; }
  operator const MatrixXd&() const { return m_; }  // NOLINT

 private:
  MatrixXd m_;
};

struct SymEig {
  VectorXd values;   // ascending
  MatrixXd vectors;  // orthonormal columns
};

/// Eigen-decomposition of a symmetric matrix (tridiagonalization + QL).
SymEig sym_eig(const SymMatrix& m);

/// R = m^{-1/2} for m symmetric positive definite.
SymMatrix inv_sqrt_spd(const SymMatrix& m);

/// Solves a^T P + P a + q = 0 for a Hurwitz.
SymMatrix solve_lyapunov(const Eigen::Ref<const MatrixXd>& a, const SymMatrix& q);

/// Largest singular value.
double spectral_norm(const Eigen::Ref<const MatrixXd>& m);

/// True iff every eigenvalue of a has real part < -margin.
bool is_hurwitz(const Eigen::Ref<const MatrixXd>& a, double margin = 0.0);

/// Largest real part over the spectrum of a.
double spectral_abscissa(const Eigen::Ref<const MatrixXd>& a);

double logdet_spd(const SymMatrix& m);

/// H(X) = X + X^T.
MatrixXd herm(const Eigen::Ref<const MatrixXd>& x);

/// G(X) = X^T X.
MatrixXd gram(const Eigen::Ref<const MatrixXd>& x);

double max_eig(const Eigen::Ref<const MatrixXd>& sym);
double min_eig(const Eigen::Ref<const MatrixXd>& sym);

bool all_finite(const Eigen::Ref<const MatrixXd>& m);

/// Relative tolerance used by the definiteness tests in this library.
inline constexpr double kDefinitenessTol = 1e-9;

}  // namespace ddctl
