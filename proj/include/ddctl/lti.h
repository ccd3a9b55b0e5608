#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ddctl {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

/// dx/dt = A x + B u + G d,   y = C x + D u + H d.
struct LtiSystem {
  MatrixXd A, B, G, C, D, H;

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(B.cols()); }
  int nd() const { return static_cast<int>(G.cols()); }
  int ny() const { return static_cast<int>(C.rows()); }

  /// Throws DimensionError on inconsistent shapes, InputError on NaN/Inf.
  void validate() const;
};

/// Chain of `num_masses` unit masses and springs:
/// A = [0 I; T 0] with T tridiagonal (-2 on the diagonal, 1 next to it),
/// B = G = [0; I]. The output channel defaults to C = [I; 0], D = [0; I],
/// H = 0 (state and input penalized separately).
LtiSystem make_mass_spring(int num_masses);

struct ClosedLoop {
  MatrixXd A_K;
  MatrixXd C_K;
};

ClosedLoop closed_loop(const LtiSystem& sys, const MatrixXd& K);

/// C_K (jw I - A_K)^{-1} G + H.
Eigen::MatrixXcd frequency_response(const LtiSystem& sys, const MatrixXd& K,
                                    double omega);

/// Binary mask I_S of admissible gain entries (n_u x n_x).
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(const MatrixXi& mask);

  static SparsityPattern Full(int nu, int nx);

  int rows() const { return static_cast<int>(mask_.rows()); }
  int cols() const { return static_cast<int>(mask_.cols()); }
  const MatrixXi& mask() const { return mask_; }
  MatrixXi complement() const;
  /// I_S and I_{S^c} as real matrices, for elementwise products.
  MatrixXd mask_real() const { return mask_.cast<double>(); }
  MatrixXd complement_real() const { return complement().cast<double>(); }

  bool contains(const MatrixXd& K) const;
  /// K o I_S.
  MatrixXd project(const MatrixXd& K) const;

 private:
  MatrixXi mask_;
};

struct CollectConfig {
  int T = 100;
  double Ts = 0.1;
  double eps = 0.01;
  std::uint64_t seed = 1;
  double amplitude = 1.0;
  /// Standard deviation of the Gaussian initial state; 0 starts at rest.
  double x0_scale = 1.0;
};

struct DataSet {
  MatrixXd X0;  // states x(t_i)
  MatrixXd U0;  // inputs u(t_i)
  MatrixXd X1;  // derivatives dx/dt at t_i
  MatrixXd D0;  // applied disturbances (ground truth, for testing only)
  double Ts = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  int T() const { return static_cast<int>(X0.cols()); }
  void validate() const;
  /// First `count` samples.
  DataSet prefix(int count) const;
};

/// Simulates the plant under piecewise-constant random input and bounded
/// disturbance and records T samples spaced Ts apart. The state is advanced
/// with RK4 at step Ts/100; derivative samples come straight from the
/// dynamics. Same seed and config always give identical data, and a shorter
/// run is a prefix of a longer one.
DataSet simulate_collect(const LtiSystem& sys, const CollectConfig& cfg);

}  // namespace ddctl
