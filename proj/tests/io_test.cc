#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ddctl/csv.h"
#include "ddctl/errors.h"
#include "ddctl/scenario.h"

namespace ddctl {
namespace {

TEST(BlockFileTest, RoundTripIsExact) {
  BlockFile f;
  f.header = {{"seed", "3"}, {"eps", format_number(0.1 + 0.2)}};
  MatrixXd m(2, 3);
  m << 1.0 / 3.0, -2e-300, 4, std::exp(1.0), 0, -7.25;
  f.blocks = {{"M", m}};
  std::stringstream ss;
  write_blocks(ss, f);
  const BlockFile g = read_blocks(ss);
  EXPECT_EQ(g.get("seed"), "3");
  EXPECT_EQ(g.number("eps"), 0.1 + 0.2);
  EXPECT_EQ(g.block("M"), m);
}

TEST(BlockFileTest, ReportsTheOffendingLine) {
  std::stringstream ss("# a=1\nM,2,2\n1,2\n3\n");
  try {
    read_blocks(ss);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ArtifactTest, DatasetEllipsoidOutcomeRoundTrip) {
  const Scenario s = preset("paper.stab");
  std::optional<DataSet> data;
  const MatrixEllipsoid ell = build_ellipsoid(s, 2, &data);
  std::stringstream ds, es;
  write_dataset(ds, *data);
  const DataSet d2 = read_dataset(ds);
  EXPECT_EQ(d2.X0, data->X0);
  EXPECT_EQ(d2.X1, data->X1);
  EXPECT_EQ(d2.seed, data->seed);
  write_ellipsoid(es, ell);
  const MatrixEllipsoid e2 = read_ellipsoid(es);
  EXPECT_EQ(e2.Astar, ell.Astar);
  EXPECT_EQ(e2.delta, ell.delta);

  SynthesisOutcome o;
  o.objective = Objective::kH2;
  o.status = OutcomeStatus::kOk;
  o.K = MatrixXd::Random(2, 4);
  o.P = MatrixXd::Identity(4, 4);
  o.gamma = 2.5;
  o.lambda = 0.125;
  o.iterations = 7;
  std::stringstream os;
  write_outcome(os, o);
  const SynthesisOutcome o2 = read_outcome(os);
  EXPECT_EQ(o2.objective, o.objective);
  EXPECT_EQ(o2.status, o.status);
  EXPECT_EQ(o2.K, o.K);
  EXPECT_EQ(*o2.gamma, 2.5);
  EXPECT_EQ(o2.iterations, 7);
}

TEST(ScenarioTest, ParsesOverrides) {
  const Scenario s = parse_scenario(
      "preset = paper.h2\n"
      "# comment\n"
      "data.T = 60\n"
      "data.eps = 0.03\n"
      "algo.max_iter = 42\n"
      "seeds = 4 5\n"
      "pattern.row1 = 1 0 0 0\n"
      "pattern.row2 = 0 0 0 1\n"
      "sweep.axis = T\n"
      "sweep.values = 60 80\n");
  EXPECT_EQ(s.objective, Objective::kH2);
  EXPECT_EQ(s.data.T, 60);
  EXPECT_EQ(s.data.eps, 0.03);
  EXPECT_EQ(s.algo.max_iter, 42);
  ASSERT_EQ(s.seeds.size(), 2u);
  EXPECT_EQ(s.pattern.mask()(1, 3), 1);
  EXPECT_EQ(s.pattern.mask().sum(), 2);
  EXPECT_EQ(s.axis, SweepAxis::kT);
}

TEST(ScenarioTest, ExplicitPlant) {
  const Scenario s = parse_scenario(
      "plant.A = -1 1; 0 -2\n"
      "plant.B = 0; 1\n"
      "plant.G = 1 0; 0 1\n"
      "channels.C = 1 0; 0 1; 0 0\n"
      "channels.D = 0; 0; 1\n"
      "channels.H = 0 0; 0 0; 0 0\n"
      "objective = h2\n"
      "pattern.row1 = 0 1\n");
  EXPECT_EQ(s.plant.nx(), 2);
  EXPECT_EQ(s.plant.A(1, 1), -2.0);
  EXPECT_EQ(s.plant.ny(), 3);
}

TEST(ScenarioTest, ErrorsPointAtTheLine) {
  try {
    parse_scenario("preset = paper.stab\npattern.row1 = 0 1 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_scenario("data.T = 10\npreset = paper.stab\n"), InputError);
  EXPECT_THROW(parse_scenario("preset = paper.stab\nbogus.key = 1\n"), InputError);
}

TEST(ScenarioTest, ExitCodes) {
  EXPECT_EQ(exit_code(OutcomeStatus::kOk), 0);
  EXPECT_EQ(exit_code(OutcomeStatus::kInfeasible), 2);
  EXPECT_EQ(exit_code(OutcomeStatus::kNoConvergence), 3);
}

TEST(SweepTableTest, CsvRoundTrip) {
  SweepTable t;
  t.axis = SweepAxis::kEps;
  t.values = {0.01, 0.03};
  t.rows = {"X diag", "Ours"};
  t.cells = {{"Infeasible", "Infeasible", "NoConv"}, {"2.28", "2.41", "2.72"}};
  t.seeds = {1, 2, 3};
  const SweepTable u = parse_sweep_csv(t.to_csv());
  EXPECT_EQ(u.axis, t.axis);
  EXPECT_EQ(u.values, t.values);
  EXPECT_EQ(u.rows, t.rows);
  EXPECT_EQ(u.cells, t.cells);
  EXPECT_EQ(u.seeds, t.seeds);
}

TEST(SweepTest, StabilizationCellsAndBaseline) {
  Scenario s = preset("paper.stab");
  s.axis = SweepAxis::kEps;
  s.axis_values = {0.01};
  s.seeds = {1, 2};
  const SweepResult r = run_sweep(s, 2);
  ASSERT_EQ(r.table.cells.size(), 2u);
  EXPECT_EQ(r.table.cells[0][1], "Infeasible");
  EXPECT_EQ(r.table.cells[1][1], "Feasible");
  EXPECT_EQ(parse_sweep_csv(r.table.to_csv()).cells, r.table.cells);
}

}  // namespace
}  // namespace ddctl
