#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddctl/lti.h"

namespace ddctl {

/// Quadratic constraint contributed by one sample:
/// [I; Z]' [c b'; b a] [I; Z] <= 0 for every Z = [A B]' consistent with it.
struct SampleBlock {
  MatrixXd c;  // xdot xdot' - eps^2 G G'
  MatrixXd b;  // -z xdot',  z = [x; u]
  MatrixXd a;  // z z'
};

/// Phi = {Z : (Z - delta)' Astar (Z - delta) <= I}, Z = [A B]' of size
/// (nx + nu) x nx. Equivalently Z = delta + AstarInvSqrt * Gamma, |Gamma| <= 1.
struct MatrixEllipsoid {
  MatrixXd Astar;
  MatrixXd Bstar;
  MatrixXd delta;
  MatrixXd AstarInvSqrt;
  VectorXd theta;
  /// -log det Astar.
  double objective = 0.0;

  int nx() const { return static_cast<int>(delta.cols()); }
  int nz() const { return static_cast<int>(delta.rows()); }
  int nu() const { return nz() - nx(); }
  /// Center split into (A, B).
  MatrixXd center_A() const;
  MatrixXd center_B() const;
};

std::vector<SampleBlock> sample_blocks(const DataSet& data, const MatrixXd& G, double eps);

/// Minimum-volume matrix ellipsoid containing every Z allowed by the blocks.
/// Throws DegenerateDataError if the data are rank deficient, noise free, or
/// the fit has no interior / is unbounded.
MatrixEllipsoid fit_min_ellipsoid(const std::vector<SampleBlock>& blocks);

/// Membership test: lambda_max((Z - delta)' Astar (Z - delta) - I) <= tol.
bool contains(const MatrixEllipsoid& ell, const MatrixXd& A, const MatrixXd& B,
              double tol);

/// Largest eigenvalue of (Z - delta)' Astar (Z - delta).
double membership_value(const MatrixEllipsoid& ell, const MatrixXd& A, const MatrixXd& B);

/// Member number `index` of the family drawn by sample_members(ell, n, seed).
/// Index 0 is the center, index 1 a boundary point (|Gamma| = 1); other
/// indices use a random direction with radius uniform on [0, 1]. Each member
/// depends only on (seed, index).
std::pair<MatrixXd, MatrixXd> sample_member(const MatrixEllipsoid& ell, int index,
                                            std::uint64_t seed);

std::vector<std::pair<MatrixXd, MatrixXd>> sample_members(const MatrixEllipsoid& ell,
                                                          int count, std::uint64_t seed);

/// Degenerate ellipsoid around a known model: delta = [A B]', Astar = rho I.
MatrixEllipsoid make_point_ellipsoid(const MatrixXd& A, const MatrixXd& B,
                                     double rho = 1e8);

/// Recomputes delta, AstarInvSqrt and objective from (Astar, Bstar).
void complete_ellipsoid(MatrixEllipsoid& ell);

}  // namespace ddctl
