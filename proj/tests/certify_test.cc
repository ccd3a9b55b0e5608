#include <cmath>

#include <gtest/gtest.h>

#include "ddctl/certify.h"
#include "ddctl/errors.h"
#include "ddctl/scenario.h"

namespace ddctl {
namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

LtiSystem low_pass(double pole, double h) {
  LtiSystem s;
  s.A = scalar(-pole);
  s.B = scalar(0.0);
  s.G = scalar(1.0);
  s.C = scalar(1.0);
  s.D = scalar(0.0);
  s.H = scalar(h);
  return s;
}

TEST(H2NormTest, ScalarExamples) {
  EXPECT_NEAR(h2_norm(low_pass(1, 0), scalar(0)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(h2_norm(low_pass(2, 0), scalar(0)), 0.5, 1e-12);
}

TEST(H2NormTest, Errors) {
  EXPECT_THROW(h2_norm(low_pass(-1, 0), scalar(0)), StabilityError);
  EXPECT_THROW(h2_norm(low_pass(1, 1), scalar(0)), UnsupportedChannelError);
}

TEST(HinfNormTest, ScalarExamples) {
  EXPECT_NEAR(hinf_norm(low_pass(1, 0), scalar(0)), 1.0, 1e-4);
  EXPECT_NEAR(hinf_norm(low_pass(1, 1), scalar(0)), 2.0, 2e-4);
  EXPECT_NEAR(hinf_grid(low_pass(1, 1), scalar(0)), 2.0, 1e-9);
}

TEST(HinfNormTest, FeasibilityBracketsTheNorm) {
  EXPECT_TRUE(hinf_feasible(low_pass(1, 0), scalar(0), 1.01));
  EXPECT_FALSE(hinf_feasible(low_pass(1, 0), scalar(0), 0.99));
}

TEST(ResidualTest, Examples) {
  Eigen::MatrixXi mask(2, 2);
  mask << 1, 0, 1, 1;
  MatrixXd K(2, 2);
  K << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(structural_residual(K, SparsityPattern(mask)), 2.0);
  EXPECT_EQ(structural_residual(SparsityPattern(mask).project(K), SparsityPattern(mask)), 0.0);

  Eigen::MatrixXi cols(2, 4);
  cols << 0, 1, 1, 0, 0, 1, 1, 0;
  MatrixXd published(2, 4);
  published << 0, 0.9078, -2.0189, 0, 0, 0.3254, 0.3022, 0;
  EXPECT_EQ(structural_residual(published, SparsityPattern(cols)), 0.0);
}

class CertifyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    s_ = preset("paper.stab");
    ell_ = build_ellipsoid(s_, 1);
    out_ = synthesize(ell_, s_.objective, Channels::from(s_.plant), s_.pattern, s_.algo);
    ASSERT_TRUE(out_.ok());
  }

  CertificationReport run(const SynthesisOutcome& o, const MatrixEllipsoid& ell, int jobs) {
    CertifyOptions opt;
    opt.jobs = jobs;
    opt.truth = s_.plant;
    opt.pattern = s_.pattern;
    return certify_robust(ell, o, s_.objective, Channels::from(s_.plant), opt);
  }

  Scenario s_;
  MatrixEllipsoid ell_;
  SynthesisOutcome out_;
};

TEST_F(CertifyTest, CertifiedDesignHoldsOnEverySample) {
  const CertificationReport r = run(out_, ell_, 1);
  EXPECT_TRUE(r.direct_check);
  EXPECT_EQ(r.samples, 1000);
  EXPECT_EQ(r.hurwitz_sampled_fraction, 1.0);
  EXPECT_TRUE(*r.hurwitz_truth);
  EXPECT_EQ(*r.residual, 0.0);
}

TEST_F(CertifyTest, ThreadCountDoesNotChangeResults) {
  const CertificationReport a = run(out_, ell_, 1);
  const CertificationReport b = run(out_, ell_, 4);
  EXPECT_EQ(a.per_sample_csv(), b.per_sample_csv());
}

TEST_F(CertifyTest, PerturbedGainFailsOnALargeSet) {
  SynthesisOutcome broken = out_;
  broken.K(0, 1) += 10.0;
  MatrixEllipsoid wide = ell_;
  wide.Astar *= 1e-4;
  wide.Bstar *= 1e-4;
  complete_ellipsoid(wide);
  const CertificationReport r = run(broken, wide, 1);
  EXPECT_FALSE(r.direct_check);
  EXPECT_LT(r.hurwitz_sampled_fraction, 1.0);
}

TEST_F(CertifyTest, PointEllipsoidReducesToTheModel) {
  const MatrixEllipsoid point = make_point_ellipsoid(s_.plant.A, s_.plant.B);
  const CertificationReport r = run(out_, point, 1);
  EXPECT_EQ(r.hurwitz_sampled_fraction, *r.hurwitz_truth ? 1.0 : 0.0);
}

}  // namespace
}  // namespace ddctl
