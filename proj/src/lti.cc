#include "ddctl/lti.h"

#include <cmath>
#include <random>
#include <string>

#include "ddctl/errors.h"
#include "ddctl/matops.h"

namespace ddctl {

namespace {

std::string shape(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void expect_shape(const MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                  const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " is " + shape(m) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

void LtiSystem::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols()) {
    throw DimensionError("A must be square and non-empty, got " + shape(A));
  }
  if (nu() < 1 || nd() < 1 || ny() < 1) {
    throw DimensionError("B, G and C must each have at least one column/row");
  }
  expect_shape(B, nx(), nu(), "B");
  expect_shape(G, nx(), nd(), "G");
  expect_shape(C, ny(), nx(), "C");
  expect_shape(D, ny(), nu(), "D");
  expect_shape(H, ny(), nd(), "H");
  for (const MatrixXd* m : {&A, &B, &G, &C, &D, &H}) {
    if (!all_finite(*m)) throw InputError("plant matrices must be finite");
  }
}

LtiSystem make_mass_spring(int num_masses) {
  if (num_masses < 1) throw InputError("make_mass_spring: need at least one mass");
  const int n = num_masses;
  MatrixXd T = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    T(i, i) = -2.0;
    if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = 1.0;
  }
  LtiSystem sys;
  sys.A = MatrixXd::Zero(2 * n, 2 * n);
  sys.A.topRightCorner(n, n).setIdentity();
  sys.A.bottomLeftCorner(n, n) = T;
  sys.B = MatrixXd::Zero(2 * n, n);
  sys.B.bottomRows(n).setIdentity();
  sys.G = sys.B;
  sys.C = MatrixXd::Zero(3 * n, 2 * n);
  sys.C.topRows(2 * n).setIdentity();
  sys.D = MatrixXd::Zero(3 * n, n);
  sys.D.bottomRows(n).setIdentity();
  sys.H = MatrixXd::Zero(3 * n, n);
  return sys;
}

ClosedLoop closed_loop(const LtiSystem& sys, const MatrixXd& K) {
  expect_shape(K, sys.nu(), sys.nx(), "K");
  return {sys.A + sys.B * K, sys.C + sys.D * K};
}

Eigen::MatrixXcd frequency_response(const LtiSystem& sys, const MatrixXd& K,
                                    double omega) {
  const ClosedLoop cl = closed_loop(sys, K);
  const int n = sys.nx();
  Eigen::MatrixXcd res = std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n);
  res -= cl.A_K.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(res);
  const double scale = std::max(1.0, res.cwiseAbs().maxCoeff());
  lu.setThreshold(1e-14);
  if (!lu.isInvertible() ||
      lu.matrixLU().diagonal().cwiseAbs().minCoeff() <= 1e-14 * scale) {
    throw PoleOnAxisError("frequency_response: jw I - A_K is singular at w = " +
                          std::to_string(omega));
  }
  Eigen::MatrixXcd x = lu.solve(sys.G.cast<std::complex<double>>());
  return cl.C_K.cast<std::complex<double>>() * x + sys.H.cast<std::complex<double>>();
}

SparsityPattern::SparsityPattern(const MatrixXi& mask) : mask_(mask) {
  if ((mask_.array() != 0 && mask_.array() != 1).any()) {
    throw InputError("sparsity pattern entries must be 0 or 1");
  }
}

SparsityPattern SparsityPattern::Full(int nu, int nx) {
  return SparsityPattern(MatrixXi::Ones(nu, nx));
}

MatrixXi SparsityPattern::complement() const {
  return MatrixXi::Ones(mask_.rows(), mask_.cols()) - mask_;
}

bool SparsityPattern::contains(const MatrixXd& K) const {
  expect_shape(K, rows(), cols(), "K");
  return (K.array() * complement_real().array() == 0.0).all();
}

MatrixXd SparsityPattern::project(const MatrixXd& K) const {
  expect_shape(K, rows(), cols(), "K");
  return K.cwiseProduct(mask_real());
}

void DataSet::validate() const {
  const Eigen::Index T = X0.cols();
  if (T < 1) throw DegenerateDataError("data set has no samples");
  if (U0.cols() != T || X1.cols() != T) {
    throw DimensionError("X0, U0, X1 must have the same number of columns");
  }
  if (X1.rows() != X0.rows()) throw DimensionError("X1 and X0 row counts differ");
  if (!all_finite(X0) || !all_finite(U0) || !all_finite(X1)) {
    throw InputError("data set contains non-finite samples");
  }
}

DataSet DataSet::prefix(int count) const {
  if (count < 1 || count > T()) throw InputError("prefix length out of range");
  DataSet d = *this;
  d.X0 = X0.leftCols(count);
  d.U0 = U0.leftCols(count);
  d.X1 = X1.leftCols(count);
  if (D0.cols() >= count) d.D0 = D0.leftCols(count);
  return d;
}

DataSet simulate_collect(const LtiSystem& sys, const CollectConfig& cfg) {
  sys.validate();
  if (!(cfg.Ts > 0.0)) throw InputError("Ts must be positive");
  if (!(cfg.eps >= 0.0)) throw InputError("eps must be nonnegative");
  if (cfg.T < 1) throw InputError("T must be at least 1");
  if (!(cfg.amplitude >= 0.0)) throw InputError("input amplitude must be nonnegative");
  if (!(cfg.x0_scale >= 0.0)) throw InputError("initial-state scale must be nonnegative");

  const int nx = sys.nx(), nu = sys.nu(), nd = sys.nd();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DataSet data;
  data.Ts = cfg.Ts;
  data.eps = cfg.eps;
  data.seed = cfg.seed;
  data.X0.resize(nx, cfg.T);
  data.U0.resize(nu, cfg.T);
  data.X1.resize(nx, cfg.T);
  data.D0.resize(nd, cfg.T);

  VectorXd x(nx);
  for (int i = 0; i < nx; ++i) x(i) = cfg.x0_scale * normal(rng);

  constexpr int kSubsteps = 100;
  const double h = cfg.Ts / kSubsteps;
  for (int k = 0; k < cfg.T; ++k) {
    VectorXd u(nu), d(nd);
    for (int i = 0; i < nu; ++i) u(i) = cfg.amplitude * (2.0 * unit(rng) - 1.0);
    VectorXd v(nd);
    double vn = 0.0;
    do {
      for (int i = 0; i < nd; ++i) v(i) = normal(rng);
      vn = v.norm();
    } while (vn == 0.0);
    d = (cfg.eps * unit(rng) / vn) * v;
    while (d.norm() > cfg.eps) d *= (1.0 - 1e-15);

    const VectorXd forcing = sys.B * u + sys.G * d;
    data.X0.col(k) = x;
    data.U0.col(k) = u;
    data.D0.col(k) = d;
    data.X1.col(k) = sys.A * x + forcing;

    for (int s = 0; s < kSubsteps; ++s) {
      const VectorXd k1 = sys.A * x + forcing;
      const VectorXd k2 = sys.A * (x + 0.5 * h * k1) + forcing;
      const VectorXd k3 = sys.A * (x + 0.5 * h * k2) + forcing;
      const VectorXd k4 = sys.A * (x + h * k3) + forcing;
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite() || x.norm() > 1e9) {
      throw DivergenceError("state norm exceeded 1e9 after " + std::to_string(k + 1) +
                            " samples; shorten T or scale the plant");
    }
  }
  return data;
}

}  // namespace ddctl
