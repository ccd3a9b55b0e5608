#pragma once

#include <limits>
#include <map>
#include <string>

#include "ddctl/lmi/conic_solver.h"
#include "ddctl/lmi/problem.h"

namespace ddctl::lmi {

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct LmiSolution {
  SolveStatus status = SolveStatus::kMaxIterations;
  VectorXd x;  // all scalar unknowns, in declaration order
  std::map<std::string, MatrixXd> assignment;
  double objective_value = 0.0;
  Residuals residuals;
  int iterations = 0;

  // maximize_logdet only: final Frank-Wolfe gap and the last vertex
  // (value of the target at the linear-minimization solution).
  double fw_gap = std::numeric_limits<double>::quiet_NaN();
  MatrixXd fw_vertex;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  const MatrixXd& operator[](const std::string& name) const;
  MatrixXd value(const Affine& expr) const { return expr.evaluate(x); }
};

LmiSolution solve(const LmiProblem& problem, const ConicOptions& options = {});

/// Maximizes log det of the named symmetric variable over the feasible set
/// (any objective set on the problem is ignored). Finds an interior point,
/// follows the log-barrier central path and finishes with Frank-Wolfe steps
/// until the Frank-Wolfe gap tr(A_k^{-1}(A_hat - A_k)) drops below 1e-6.
/// objective_value is log det of the returned target.
LmiSolution maximize_logdet(const LmiProblem& problem, const std::string& target,
                            const ConicOptions& options = {});

}  // namespace ddctl::lmi
