#include <gtest/gtest.h>

#include "ddctl/errors.h"
#include "ddctl/lti.h"
#include "ddctl/matops.h"
#include "ddctl/uncertainty.h"

namespace ddctl {
namespace {

class FitTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sys_ = new LtiSystem(make_mass_spring(2));
    CollectConfig cfg;
    cfg.seed = 3;
    data_ = new DataSet(simulate_collect(*sys_, cfg));
    ell_ = new MatrixEllipsoid(fit_min_ellipsoid(sample_blocks(*data_, sys_->G, 0.01)));
  }
  static void TearDownTestSuite() {
    delete sys_;
    delete data_;
    delete ell_;
  }

  static LtiSystem* sys_;
  static DataSet* data_;
  static MatrixEllipsoid* ell_;
};

LtiSystem* FitTest::sys_ = nullptr;
DataSet* FitTest::data_ = nullptr;
MatrixEllipsoid* FitTest::ell_ = nullptr;

TEST(SampleBlocksTest, ZeroData) {
  DataSet d;
  d.X0 = MatrixXd::Zero(2, 3);
  d.U0 = MatrixXd::Zero(1, 3);
  d.X1 = MatrixXd::Zero(2, 3);
  d.D0 = MatrixXd::Zero(2, 3);
  for (const SampleBlock& b : sample_blocks(d, MatrixXd::Identity(2, 2), 1.0)) {
    EXPECT_EQ(b.c, -MatrixXd::Identity(2, 2));
    EXPECT_EQ(b.b.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(b.a.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST_F(FitTest, BlocksAreRankOneAndHoldAtTheTruth) {
  MatrixXd Z(6, 4);
  Z << sys_->A.transpose(), sys_->B.transpose();
  MatrixXd IZ(10, 4);
  IZ << MatrixXd::Identity(4, 4), Z;
  for (const SampleBlock& b : sample_blocks(*data_, sys_->G, 0.01)) {
    const SymEig e = sym_eig(SymMatrix(b.a));
    EXPECT_GE(e.values(0), -1e-12);
    EXPECT_LT(e.values(e.values.size() - 2), 1e-12 * (1 + e.values.maxCoeff()));
    MatrixXd Q(10, 10);
    Q << b.c, b.b.transpose(), b.b, b.a;
    EXPECT_LE(max_eig(IZ.transpose() * Q * IZ), 1e-12);
  }
}

TEST_F(FitTest, ContainsTheTruth) {
  EXPECT_TRUE(contains(*ell_, sys_->A, sys_->B, 1e-7));
  EXPECT_TRUE(contains(*ell_, ell_->center_A(), ell_->center_B(), 0.0));
}

TEST_F(FitTest, LargerNoiseGivesLargerSet) {
  const MatrixEllipsoid wide = fit_min_ellipsoid(sample_blocks(*data_, sys_->G, 0.02));
  EXPECT_GE(wide.objective, ell_->objective);
}

TEST_F(FitTest, OutsideForGammaOfNormTwo) {
  MatrixXd Gam = MatrixXd::Zero(6, 4);
  Gam(0, 0) = 2.0;
  const MatrixXd Z = ell_->delta + ell_->AstarInvSqrt * Gam;
  EXPECT_NEAR(membership_value(*ell_, Z.topRows(4).transpose(), Z.bottomRows(2).transpose()), 4.0,
              1e-8);
  EXPECT_FALSE(contains(*ell_, Z.topRows(4).transpose(), Z.bottomRows(2).transpose(), 0.0));
}

TEST_F(FitTest, Members) {
  const auto members = sample_members(*ell_, 50, 9);
  ASSERT_EQ(members.size(), 50u);
  EXPECT_EQ(members[0].first, ell_->center_A());
  EXPECT_EQ(members[0].second, ell_->center_B());
  EXPECT_NEAR(membership_value(*ell_, members[1].first, members[1].second), 1.0, 1e-8);
  for (const auto& m : members) EXPECT_TRUE(contains(*ell_, m.first, m.second, 1e-9));
  const auto again = sample_member(*ell_, 17, 9);
  EXPECT_EQ(again.first, members[17].first);
}

TEST(FitErrorsTest, NoiseFreeDataIsDegenerate) {
  const LtiSystem sys = make_mass_spring(2);
  CollectConfig cfg;
  cfg.eps = 0.0;
  const DataSet d = simulate_collect(sys, cfg);
  EXPECT_THROW(fit_min_ellipsoid(sample_blocks(d, sys.G, 0.0)), DegenerateDataError);
}

TEST(FitErrorsTest, TooFewSamplesIsDegenerate) {
  const LtiSystem sys = make_mass_spring(2);
  CollectConfig cfg;
  cfg.T = 4;
  const DataSet d = simulate_collect(sys, cfg);
  EXPECT_THROW(fit_min_ellipsoid(sample_blocks(d, sys.G, cfg.eps)), DegenerateDataError);
}

TEST(PointEllipsoidTest, CenterIsTheModel) {
  const LtiSystem sys = make_mass_spring(2);
  const MatrixEllipsoid ell = make_point_ellipsoid(sys.A, sys.B);
  EXPECT_EQ(ell.center_A(), sys.A);
  EXPECT_EQ(ell.center_B(), sys.B);
  EXPECT_TRUE(contains(ell, sys.A, sys.B, 0.0));
}

}  // namespace
}  // namespace ddctl
