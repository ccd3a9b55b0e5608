#include "ddctl/matops.h"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ddctl/errors.h"

namespace ddctl {

namespace {

void require_finite(const Eigen::Ref<const MatrixXd>& m, const char* what) {
  if (!all_finite(m)) {
    throw InputError(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_square(const Eigen::Ref<const MatrixXd>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix must be square");
  }
}

}  // namespace

bool all_finite(const Eigen::Ref<const MatrixXd>& m) {
  return m.array().isFinite().all();
}

SymMatrix::SymMatrix(const Eigen::Ref<const MatrixXd>& m) {
  require_square(m, "SymMatrix");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::Identity(int order) {
  return SymMatrix(MatrixXd::Identity(order, order));
}

SymEig sym_eig(const SymMatrix& m) {
  require_finite(m.entries(), "sym_eig");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.entries());
  if (es.info() != Eigen::Success) {
    throw InputError("sym_eig: eigen-decomposition did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

SymMatrix inv_sqrt_spd(const SymMatrix& m) {
  const SymEig e = sym_eig(m);
  const double top = e.values.size() ? e.values.maxCoeff() : 0.0;
  if (e.values.size() == 0 || top <= 0.0 || e.values.minCoeff() <= 1e-12 * top) {
    throw DefinitenessError(
        "inv_sqrt_spd: matrix is not positive definite (or near-singular)");
  }
  const VectorXd d = e.values.array().rsqrt();
  return SymMatrix(e.vectors * d.asDiagonal() * e.vectors.transpose());
}

SymMatrix solve_lyapunov(const Eigen::Ref<const MatrixXd>& a, const SymMatrix& q) {
  require_square(a, "solve_lyapunov");
  require_finite(a, "solve_lyapunov");
  require_finite(q.entries(), "solve_lyapunov");
  if (q.order() != a.rows()) {
    throw DimensionError("solve_lyapunov: a and q must have the same order");
  }
  if (!is_hurwitz(a, 0.0)) {
    throw StabilityError("solve_lyapunov: a is not Hurwitz");
  }
  const int n = static_cast<int>(a.rows());
  // (I kron a^T + a^T kron I) vec(P) = -vec(q), column-major vec.
  const MatrixXd at = a.transpose();
  MatrixXd kron = MatrixXd::Zero(n * n, n * n);
  for (int j = 0; j < n; ++j) {
    kron.block(j * n, j * n, n, n) += at;
    for (int l = 0; l < n; ++l) {
      kron.block(j * n, l * n, n, n).diagonal().array() += at(j, l);
    }
  }
  const VectorXd rhs = -Eigen::Map<const VectorXd>(q.entries().data(), n * n);
  const VectorXd p = kron.partialPivLu().solve(rhs);
  return SymMatrix(Eigen::Map<const MatrixXd>(p.data(), n, n));
}

double spectral_norm(const Eigen::Ref<const MatrixXd>& m) {
  require_finite(m, "spectral_norm");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double spectral_abscissa(const Eigen::Ref<const MatrixXd>& a) {
  require_square(a, "spectral_abscissa");
  require_finite(a, "spectral_abscissa");
  Eigen::EigenSolver<MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) {
    throw InputError("spectral_abscissa: eigenvalue iteration did not converge");
  }
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Eigen::Ref<const MatrixXd>& a, double margin) {
  return spectral_abscissa(a) < -margin;
}

double logdet_spd(const SymMatrix& m) {
  require_finite(m.entries(), "logdet_spd");
  Eigen::LLT<MatrixXd> llt(m.entries());
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError("logdet_spd: matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

MatrixXd herm(const Eigen::Ref<const MatrixXd>& x) { return x + x.transpose(); }

MatrixXd gram(const Eigen::Ref<const MatrixXd>& x) { return x.transpose() * x; }

double max_eig(const Eigen::Ref<const MatrixXd>& sym) {
  return sym_eig(SymMatrix(sym)).values.maxCoeff();
}

double min_eig(const Eigen::Ref<const MatrixXd>& sym) {
  return sym_eig(SymMatrix(sym)).values.minCoeff();
}

}  // namespace ddctl
