#pragma once

// Reference computations used only by the tests. They share no code with
// the library beyond the plant struct.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "ddctl/lti.h"

namespace ddctl::testing {

inline Eigen::MatrixXcd transfer(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& G,
                                 const Eigen::MatrixXd& C_K, const Eigen::MatrixXd& H,
                                 double w) {
  const int n = static_cast<int>(A_K.rows());
  Eigen::MatrixXcd M = std::complex<double>(0.0, w) * Eigen::MatrixXcd::Identity(n, n) -
                       A_K.cast<std::complex<double>>();
  Eigen::MatrixXcd X = M.partialPivLu().solve(G.cast<std::complex<double>>());
  return C_K.cast<std::complex<double>>() * X + H.cast<std::complex<double>>();
}

/// H2 norm from (1/pi) * integral over w >= 0 of ||T(jw)||_F^2 (the
/// integrand is even in w).
inline double h2_quadrature(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& G,
                            const Eigen::MatrixXd& C_K) {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Zero(C_K.rows(), G.cols());
  auto f = [&](double w) { return transfer(A_K, G, C_K, H, w).squaredNorm(); };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  const double val = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                          1e-12, &err);
  return std::sqrt(val / M_PI);
}

inline double sigma_max(const Eigen::MatrixXcd& T) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(T).singularValues()(0);
}

/// Peak gain over a dense log grid plus w = 0, with ternary refinement of
/// the best bracket.
inline double hinf_dense_grid(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& G,
                              const Eigen::MatrixXd& C_K, const Eigen::MatrixXd& H) {
  auto f = [&](double w) { return sigma_max(transfer(A_K, G, C_K, H, w)); };
  const int N = 20000;
  std::vector<double> w(N + 1, 0.0);
  for (int i = 0; i < N; ++i) w[i + 1] = std::pow(10.0, -4.0 + 8.0 * i / (N - 1));
  int best = 0;
  double peak = f(0.0);
  for (int i = 1; i <= N; ++i) {
    const double v = f(w[i]);
    if (v > peak) {
      peak = v;
      best = i;
    }
  }
  double a = w[std::max(0, best - 1)], b = w[std::min(N, best + 1)];
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (f(m1) < f(m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  return std::max(peak, f(0.5 * (a + b)));
}

/// Random closed loop with spectral abscissa <= -0.1.
struct RandomLoop {
  LtiSystem sys;
  Eigen::MatrixXd K;
};

inline RandomLoop random_stable_loop(std::mt19937_64& rng, bool feedthrough) {
  std::uniform_int_distribution<int> dim(1, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int nx = dim(rng) + 1, nu = dim(rng), nd = dim(rng), ny = dim(rng);
  auto rnd = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  RandomLoop L;
  L.sys.A = rnd(nx, nx);
  L.sys.B = rnd(nx, nu);
  L.sys.G = rnd(nx, nd);
  L.sys.C = rnd(ny, nx);
  L.sys.D = rnd(ny, nu);
  L.sys.H = feedthrough ? rnd(ny, nd) : Eigen::MatrixXd::Zero(ny, nd);
  L.K = 0.5 * rnd(nu, nx);
  const Eigen::MatrixXd AK = L.sys.A + L.sys.B * L.K;
  const double abscissa = AK.eigenvalues().real().maxCoeff();
  L.sys.A -= (abscissa + 0.1 + 0.5 * std::abs(g(rng))) * Eigen::MatrixXd::Identity(nx, nx);
  return L;
}

}  // namespace ddctl::testing
