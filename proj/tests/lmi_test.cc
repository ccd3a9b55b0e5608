#include <cmath>

#include <gtest/gtest.h>

#include "ddctl/errors.h"
#include "ddctl/lmi/affine.h"
#include "ddctl/lmi/problem.h"
#include "ddctl/lmi/solver.h"
#include "ddctl/matops.h"

namespace ddctl::lmi {
namespace {

TEST(AffineTest, EvaluatesSymmetricVariable) {
  LmiProblem p;
  const Affine P = p.symmetric("P", 2);
  ASSERT_EQ(p.num_scalars(), 3);
  const MatrixXd v = P.evaluate(Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(v, v.transpose());
  EXPECT_EQ(v.sum(), 1 + 2 + 2 + 3);
}

TEST(AffineTest, AlgebraMatchesDirectEvaluation) {
  LmiProblem p;
  const Affine X = p.matrix("X", 2, 3);
  Eigen::Matrix2d L;
  L << 1, 2, -1, 0.5;
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  R(0, 2) = 4;
  VectorXd x(6);
  x << 1, -2, 3, 0.5, 7, -1;
  const MatrixXd xv = X.evaluate(x);
  const Affine e = L * X * R + 2.0 * X - X;
  EXPECT_LT((e.evaluate(x) - (L * xv * R + xv)).norm(), 1e-14);
  EXPECT_NEAR(trace(X.block(0, 0, 2, 2)).evaluate(x)(0, 0), xv(0, 0) + xv(1, 1), 1e-15);
  const Affine S = bmat({{X, Affine::Zero(2, 1)}});
  EXPECT_EQ(S.cols(), 4);
}

TEST(AffineTest, ProductOfVariablesThrows) {
  LmiProblem p;
  const Affine a = p.scalar("a");
  const Affine b = p.scalar("b");
  EXPECT_THROW(a * b, AssemblyError);
}

TEST(ProblemTest, TraceProblemHasOnePsdBlock) {
  LmiProblem p;
  const Affine P = p.symmetric("P", 2);
  p.constrain(P - Affine::Identity(2), Sense::kPosSemidef);
  p.minimize(trace(P));
  const ConicForm f = p.assemble();
  EXPECT_EQ(f.conic.dims.lp, 0);
  ASSERT_EQ(f.conic.dims.psd.size(), 1u);
  EXPECT_EQ(f.conic.dims.psd[0], 2);
}

TEST(ProblemTest, ForeignVariableIsAnAssemblyError) {
  LmiProblem p, q;
  const Affine P = q.symmetric("P", 2);
  EXPECT_THROW(p.constrain(P, Sense::kPosSemidef), AssemblyError);
}

TEST(ProblemTest, DuplicateNameIsAnAssemblyError) {
  LmiProblem p;
  p.symmetric("P", 2);
  EXPECT_THROW(p.symmetric("P", 3), AssemblyError);
}

TEST(ProblemTest, UnstructuredStabilizationBlockSizes) {
  // [[H(delta' [X; Y]) ... , ...]] of order nx + nz, plus X > 0.
  const int nx = 4, nu = 2, nz = nx + nu;
  LmiProblem p;
  const Affine X = p.symmetric("X", nx);
  const Affine Y = p.matrix("Y", nu, nx);
  const MatrixXd delta = MatrixXd::Random(nz, nx);
  const Affine XY = vstack({X, Y});
  const Affine top = herm(delta.transpose() * XY) + Affine::Identity(nx);
  p.constrain(sym_bmat({{top}, {XY, -1.0 * Affine::Identity(nz)}}), Sense::kStrictNeg);
  p.constrain(X, Sense::kStrictPos);
  const ConicForm f = p.assemble();
  ASSERT_EQ(f.conic.dims.psd.size(), 2u);
  EXPECT_EQ(f.conic.dims.psd[0], 10);
  EXPECT_EQ(f.conic.dims.psd[1], 4);
}

TEST(SolverTest, MinTraceOrderThree) {
  LmiProblem p;
  const Affine P = p.symmetric("P", 3);
  p.constrain(P - Affine::Identity(3), Sense::kPosSemidef);
  p.minimize(trace(P));
  const LmiSolution s = solve(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 3.0, 1e-7);
  EXPECT_LT((s["P"] - MatrixXd::Identity(3, 3)).norm(), 1e-6);
  EXPECT_EQ(s["P"], s["P"].transpose());
  EXPECT_LT(s.residuals.gap, 1e-8 * (1 + std::abs(s.objective_value)));
}

TEST(SolverTest, OppositeStrictConstraintsAreInfeasible) {
  LmiProblem p;
  const Affine P = p.symmetric("P", 2);
  p.constrain(P, Sense::kStrictPos);
  p.constrain(P, Sense::kStrictNeg);
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(SolverTest, LyapunovFeasibilityCertifiesByEigencheck) {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 0) = -1;
  A(1, 1) = -2;
  LmiProblem p;
  const Affine P = p.symmetric("P", 2);
  p.constrain(P, Sense::kStrictPos);
  p.constrain(herm(P * A), Sense::kStrictNeg);
  const LmiSolution s = solve(p);
  ASSERT_TRUE(s.optimal());
  const MatrixXd Pv = s["P"];
  EXPECT_GE(min_eig(Pv), p.eta() / 2);
  EXPECT_LE(max_eig(A.transpose() * Pv + Pv * A), -p.eta() / 2);
}

TEST(SolverTest, UnboundedBelow) {
  LmiProblem p;
  const Affine x = p.scalar("x");
  p.constrain(-1.0 * x, Sense::kPosSemidef);
  p.minimize(x);
  EXPECT_EQ(solve(p).status, SolveStatus::kUnbounded);
}

TEST(LogdetTest, IdentityBound) {
  LmiProblem p;
  const Affine A = p.symmetric("A", 2);
  p.constrain(Affine::Identity(2) - A, Sense::kPosSemidef);
  const LmiSolution s = maximize_logdet(p, "A");
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 0.0, 1e-5);
  EXPECT_LT((s["A"] - MatrixXd::Identity(2, 2)).norm(), 1e-3);
  EXPECT_LT(s.fw_gap, 1e-6);
}

TEST(LogdetTest, DiagonalBound) {
  MatrixXd bound = MatrixXd::Zero(2, 2);
  bound(0, 0) = 1;
  bound(1, 1) = 4;
  LmiProblem p;
  const Affine A = p.symmetric("A", 2);
  p.constrain(Affine(bound) - A, Sense::kPosSemidef);
  const LmiSolution s = maximize_logdet(p, "A");
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, std::log(4.0), 1e-5);
  EXPECT_LT((s["A"] - bound).norm(), 4e-3);
}

TEST(LogdetTest, FinalSegmentIsLineOptimal) {
  // log det (A_k + t (V - A_k)) is concave in t; the returned iterate must be
  // at its maximum over [0, 1] (checked by golden-section search).
  MatrixXd bound(2, 2);
  bound << 2, 0.5, 0.5, 1;
  LmiProblem p;
  const Affine A = p.symmetric("A", 2);
  p.constrain(Affine(bound) - A, Sense::kPosSemidef);
  p.constrain(A - 0.1 * Affine::Identity(2), Sense::kPosSemidef);
  const LmiSolution s = maximize_logdet(p, "A");
  ASSERT_TRUE(s.optimal());
  const MatrixXd Ak = s["A"];
  const MatrixXd V = s.fw_vertex;
  auto f = [&](double t) { return logdet_spd(SymMatrix(Ak + t * (V - Ak))); };
  double a = 0.0, b = 1.0;
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double m1 = b - r * (b - a), m2 = a + r * (b - a);
    if (f(m1) < f(m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  EXPECT_NEAR(f(0.0), f(0.5 * (a + b)), 1e-6);
}

}  // namespace
}  // namespace ddctl::lmi
