#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ddctl::lmi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIterations };

const char* to_string(SolveStatus status);

/// Product cone: `lp` nonnegative orthant coordinates followed by PSD blocks.
/// A PSD block of order n occupies n(n+1)/2 coordinates (svec layout: lower
/// triangle column by column, off-diagonal entries scaled by sqrt(2) so that
/// svec(A)'svec(B) = tr(AB)).
struct ConeDims {
  int lp = 0;
  std::vector<int> psd;

  int size() const;
  /// Barrier degree: lp + sum of block orders.
  int degree() const;
};

int svec_size(int order);
VectorXd svec(const MatrixXd& sym);
MatrixXd smat(const Eigen::Ref<const VectorXd>& v, int order);

/// minimize c'x  subject to  G x + s = h,  s in K.
struct ConicProblem {
  VectorXd c;
  MatrixXd G;
  VectorXd h;
  ConeDims dims;
};

struct ConicOptions {
  double feastol = 1e-8;
  double gaptol = 1e-8;
  int max_iter = 200;
};

struct ConicResult {
  SolveStatus status = SolveStatus::kMaxIterations;
  VectorXd x, s, z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
/// Mehrotra predictor-corrector steps. Dense; meant for problems with at
/// most a few hundred variables. On kInfeasible, z holds a normalized
/// certificate (G'z = 0, h'z = -1); on kUnbounded, x holds a direction
/// (c'x = -1, -Gx in K).
ConicResult solve_conic(const ConicProblem& problem, const ConicOptions& options = {});

/// True iff v lies in the interior of the cone (Cholesky test per block).
bool in_cone_interior(const VectorXd& v, const ConeDims& dims);

/// Largest t such that v - t e is in the cone (e = identity element).
double cone_margin(const VectorXd& v, const ConeDims& dims);

}  // namespace ddctl::lmi
