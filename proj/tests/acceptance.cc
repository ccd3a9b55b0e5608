// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddctl/certify.h"
#include "ddctl/lmi/solver.h"
#include "ddctl/matops.h"
#include "ddctl/scenario.h"
#include "ddctl/synthesis.h"
#include "ddctl/uncertainty.h"
#include "oracles.h"

namespace {

using namespace ddctl;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s  %2d  %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
              v.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string num(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Sweeps shared by criteria 8, 9 and 10.
struct Sweeps {
  SweepResult h2_eps, h2_T, hinf_eps, hinf_T;
  std::vector<SweepRun> stab_baseline;
  bool ready = false;
};
Sweeps sweeps;

Scenario sweep_scenario(const std::string& preset_name, SweepAxis axis) {
  Scenario s = preset(preset_name);
  s.axis = axis;
  s.seeds = {1, 2, 3, 4, 5};
  if (axis == SweepAxis::kEps) {
    s.data.T = 100;
    s.axis_values = {0.01, 0.03, 0.05};
  } else {
    s.data.eps = 0.01;
    s.axis_values = {60, 80, 100};
  }
  return s;
}

void run_sweeps() {
  if (sweeps.ready) return;
  sweeps.h2_eps = run_sweep(sweep_scenario("paper.h2", SweepAxis::kEps), jobs());
  sweeps.h2_T = run_sweep(sweep_scenario("paper.h2", SweepAxis::kT), jobs());
  sweeps.hinf_eps = run_sweep(sweep_scenario("paper.hinf", SweepAxis::kEps), jobs());
  sweeps.hinf_T = run_sweep(sweep_scenario("paper.hinf", SweepAxis::kT), jobs());
  // Stabilization has no table; run the baseline on the same cells.
  Scenario stab = preset("paper.stab");
  const Channels ch = Channels::from(stab.plant);
  auto add = [&](const Scenario& sc, std::uint64_t seed, double value) {
    const MatrixEllipsoid ell = build_ellipsoid(sc, seed);
    const SynthesisOutcome out = baseline_xdiag(ell, sc.pattern, sc.objective, ch, sc.algo);
    SweepRun r;
    r.mode = DesignMode::kBaseline;
    r.axis_value = value;
    r.seed = seed;
    r.status = out.status;
    sweeps.stab_baseline.push_back(r);
  };
  Scenario model = stab;
  model.mode = DesignMode::kModel;
  add(model, 0, std::nan(""));
  for (double eps : {0.01, 0.03, 0.05}) {
    Scenario c = stab;
    c.data.eps = eps;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) add(c, seed, eps);
  }
  for (int T : {60, 80}) {
    Scenario c = stab;
    c.data.T = T;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) add(c, seed, T);
  }
  sweeps.ready = true;
}

std::vector<double> data_medians(const SweepTable& t, bool* all_numeric) {
  std::vector<double> out;
  *all_numeric = true;
  const auto& row = t.cells[1];
  for (std::size_t j = 1; j < row.size(); ++j) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(row[j], &pos));
      if (pos != row[j].size()) *all_numeric = false;
    } catch (const std::exception&) {
      *all_numeric = false;
      out.push_back(std::nan(""));
    }
  }
  return out;
}

std::string row_text(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + num(x, 5);
  return "[" + s + "]";
}

Verdict criterion1() {
  const LtiSystem sys = make_mass_spring(2);
  int inside = 0;
  double worst_time = 0.0, worst_member = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CollectConfig cfg;
    cfg.T = 100;
    cfg.eps = 0.01;
    cfg.seed = seed;
    const auto t0 = Clock::now();
    const DataSet d = simulate_collect(sys, cfg);
    const MatrixEllipsoid ell = fit_min_ellipsoid(sample_blocks(d, sys.G, cfg.eps));
    worst_time = std::max(worst_time, seconds_since(t0));
    inside += contains(ell, sys.A, sys.B, 1e-7);
    worst_member = std::max(worst_member, membership_value(ell, sys.A, sys.B));
  }
  return {inside == 50 && worst_time < 60.0,
          std::to_string(inside) + "/50 contain the truth (max membership " + num(worst_member) +
              "), slowest fit " + num(worst_time, 3) + " s"};
}

Verdict criterion2() {
  const LtiSystem sys = make_mass_spring(2);
  CollectConfig cfg;
  cfg.T = 100;
  cfg.eps = 1e-4;
  cfg.seed = 1;
  const DataSet d = simulate_collect(sys, cfg);
  const MatrixEllipsoid ell = fit_min_ellipsoid(sample_blocks(d, sys.G, cfg.eps));
  Eigen::MatrixXd AB(sys.nx(), sys.nx() + sys.nu());
  AB << sys.A, sys.B;
  const double err = (ell.delta.transpose() - AB).norm();
  return {err <= 1e-2, "||delta' - [A B]||_F = " + num(err) + " (limit 1e-2)"};
}

lmi::Affine constant(double v) { return lmi::Affine(Eigen::MatrixXd::Constant(1, 1, v)); }

Verdict criterion3() {
  bool ok = true;
  // Gap measured as |gap| / (1 + |objective|), the solver's optimality scale.
  double worst_err = 0.0, worst_gap = 0.0;
  for (int n = 2; n <= 10; ++n) {
    lmi::LmiProblem p;
    const lmi::Affine P = p.symmetric("P", n);
    p.constrain(P - lmi::Affine::Identity(n), lmi::Sense::kPosSemidef);
    p.minimize(lmi::trace(P));
    const lmi::LmiSolution s = lmi::solve(p);
    ok = ok && s.optimal();
    worst_err = std::max(worst_err, std::abs(s.objective_value - n));
    worst_gap = std::max(worst_gap, s.residuals.gap / (1.0 + std::abs(s.objective_value)));
  }
  // Declared-infeasible toys.
  int infeasible = 0;
  {
    lmi::LmiProblem p;
    const lmi::Affine P = p.symmetric("P", 3);
    p.constrain(P, lmi::Sense::kStrictPos);
    p.constrain(P, lmi::Sense::kStrictNeg);
    infeasible += lmi::solve(p).status == lmi::SolveStatus::kInfeasible;
  }
  {
    lmi::LmiProblem p;
    const lmi::Affine x = p.scalar("x");
    p.constrain(x - constant(2.0), lmi::Sense::kPosSemidef);
    p.constrain(constant(1.0) - x, lmi::Sense::kPosSemidef);
    infeasible += lmi::solve(p).status == lmi::SolveStatus::kInfeasible;
  }
  {
    // Lyapunov inequality for an unstable matrix.
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 2.0, 0.0, -3.0;
    lmi::LmiProblem p;
    const lmi::Affine P = p.symmetric("P", 2);
    p.constrain(P, lmi::Sense::kStrictPos);
    p.constrain(lmi::herm(P * A), lmi::Sense::kStrictNeg);
    infeasible += lmi::solve(p).status == lmi::SolveStatus::kInfeasible;
  }
  // Extra optimal problem: min x s.t. [[x, 1], [1, 1]] >= 0 -> x = 1.
  {
    lmi::LmiProblem p;
    const lmi::Affine x = p.scalar("x");
    p.constrain(lmi::sym_bmat({{x}, {constant(1.0), constant(1.0)}}),
                lmi::Sense::kPosSemidef);
    p.minimize(x);
    const lmi::LmiSolution s = lmi::solve(p);
    ok = ok && s.optimal() && std::abs(s.objective_value - 1.0) < 1e-6;
    worst_gap = std::max(worst_gap, s.residuals.gap / (1.0 + std::abs(s.objective_value)));
  }
  const bool pass = ok && worst_err <= 1e-6 && infeasible == 3 && worst_gap < 1e-8;
  return {pass, "trace optimum error " + num(worst_err, 3) + ", worst relative gap " + num(worst_gap, 3) +
                    ", infeasible toys detected " + std::to_string(infeasible) + "/3"};
}

Verdict criterion4() {
  std::mt19937_64 rng(2024);
  double worst_h2 = 0.0, worst_hinf = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto L = testing::random_stable_loop(rng, false);
    const ClosedLoop cl = closed_loop(L.sys, L.K);
    const double ref = testing::h2_quadrature(cl.A_K, L.sys.G, cl.C_K);
    worst_h2 = std::max(worst_h2, std::abs(h2_norm(L.sys, L.K) - ref) / ref);
  }
  for (int i = 0; i < 20; ++i) {
    const auto L = testing::random_stable_loop(rng, i % 2 == 1);
    const ClosedLoop cl = closed_loop(L.sys, L.K);
    const double ref = testing::hinf_dense_grid(cl.A_K, L.sys.G, cl.C_K, L.sys.H);
    worst_hinf = std::max(worst_hinf, std::abs(hinf_norm(L.sys, L.K) - ref) / ref);
  }
  return {worst_h2 <= 1e-4 && worst_hinf <= 1e-3,
          "worst relative error h2 " + num(worst_h2, 3) + " (limit 1e-4), hinf " +
              num(worst_hinf, 3) + " (limit 1e-3)"};
}

Verdict criterion5() {
  const Scenario s = preset("paper.stab");
  const auto t0 = Clock::now();
  const RunResult r = run_once(s, 1, true, jobs());
  const double t = seconds_since(t0);
  const SynthesisOutcome& o = r.outcome;
  if (!o.ok()) return {false, std::string("status ") + to_string(o.status) + ": " + o.message};
  const Eigen::MatrixXd off = o.K.cwiseProduct(s.pattern.complement_real());
  const bool in_pattern = (off.array() == 0.0).all();
  const bool truth = is_hurwitz(s.plant.A + s.plant.B * o.K);
  const double frac = r.report->hurwitz_sampled_fraction;
  const bool pass = o.iterations <= 100 && in_pattern && truth && r.report->samples == 1000 &&
                    frac == 1.0 && t < 300.0;
  return {pass, std::to_string(o.iterations) + " iterations, in-pattern " +
                    (in_pattern ? "yes" : "no") + ", truth Hurwitz " + (truth ? "yes" : "no") +
                    ", sampled Hurwitz fraction " + num(frac) + " of " +
                    std::to_string(r.report->samples)};
}

Verdict model_cell(const char* name, double lo, double hi) {
  Scenario s = preset(name);
  s.mode = DesignMode::kModel;
  const RunResult r = run_once(s, 0, false);
  if (!r.outcome.ok() || !r.outcome.gamma) {
    return {false, std::string("status ") + to_string(r.outcome.status) + ": " + r.outcome.message};
  }
  const double g = *r.outcome.gamma;
  return {g >= lo && g <= hi, "gamma = " + num(g) + ", window [" + num(lo, 4) + ", " + num(hi, 4) + "]"};
}

Verdict criterion8() {
  run_sweeps();
  bool pass = true;
  std::string detail;
  auto trend = [&](const char* label, const SweepResult& r, bool increasing) {
    bool numeric = false;
    const std::vector<double> m = data_medians(r.table, &numeric);
    bool mono = numeric;
    for (std::size_t i = 1; numeric && i < m.size(); ++i) {
      mono = mono && (increasing ? m[i] >= m[i - 1] : m[i] <= m[i - 1]);
    }
    // Every data-driven gamma against the model-based one.
    double model = std::nan("");
    for (const SweepRun& run : r.runs) {
      if (run.mode == DesignMode::kData && std::isnan(run.axis_value) && run.gamma) model = *run.gamma;
    }
    bool above = !std::isnan(model);
    for (const SweepRun& run : r.runs) {
      if (run.mode == DesignMode::kData && !std::isnan(run.axis_value) &&
          run.status == OutcomeStatus::kOk) {
        above = above && run.gamma && *run.gamma >= model - 1e-6;
      }
    }
    pass = pass && mono && above;
    detail += std::string(detail.empty() ? "" : "; ") + label + " " + row_text(m) +
              (mono ? "" : " NOT MONOTONE") + (above ? "" : " BELOW MODEL");
  };
  trend("h2/eps", sweeps.h2_eps, true);
  trend("h2/T", sweeps.h2_T, false);
  trend("hinf/eps", sweeps.hinf_eps, true);
  trend("hinf/T", sweeps.hinf_T, false);
  return {pass, detail};
}

Verdict criterion9() {
  run_sweeps();
  int checked = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const SweepResult* r : {&sweeps.h2_eps, &sweeps.h2_T, &sweeps.hinf_eps, &sweeps.hinf_T}) {
    for (const SweepRun& run : r->runs) {
      if (run.status != OutcomeStatus::kOk) continue;
      ++checked;
      if (!run.hurwitz_truth || !run.true_norm || !run.gamma || *run.gamma < *run.true_norm) {
        ++violations;
      } else {
        worst = std::min(worst, *run.gamma - *run.true_norm);
      }
    }
  }
  return {checked > 0 && violations == 0,
          std::to_string(checked) + " ok runs, " + std::to_string(violations) +
              " with gamma below the true norm; smallest slack " + num(worst, 3)};
}

Verdict criterion10() {
  run_sweeps();
  int cells = 0, infeasible = 0;
  for (const SweepResult* r : {&sweeps.h2_eps, &sweeps.h2_T, &sweeps.hinf_eps, &sweeps.hinf_T}) {
    for (const std::string& c : r->table.cells[0]) {
      ++cells;
      infeasible += c == "Infeasible";
    }
  }
  int runs = 0, run_infeasible = 0;
  for (const SweepRun& r : sweeps.stab_baseline) {
    ++runs;
    run_infeasible += r.status == OutcomeStatus::kInfeasible;
  }
  return {cells == infeasible && runs == run_infeasible,
          "H2/Hinf table cells Infeasible " + std::to_string(infeasible) + "/" +
              std::to_string(cells) + ", stabilization baseline runs infeasible " +
              std::to_string(run_infeasible) + "/" + std::to_string(runs)};
}

Verdict criterion11() {
  run_sweeps();
  const Scenario s = preset("paper.stab");
  const Channels ch = Channels::from(s.plant);
  int monotone = 0, ok_runs = 0;
  double worst_eig = -std::numeric_limits<double>::infinity();
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MatrixEllipsoid ell = build_ellipsoid(s, seed);
    const SynthesisOutcome o = synthesize(ell, s.objective, ch, s.pattern, s.algo);
    ok_runs += o.ok();
    bool mono = true;
    for (std::size_t k = 1; k < o.trace.size(); ++k) {
      const double prev = o.trace[k - 1].residual * o.trace[k - 1].residual;
      const double cur = o.trace[k].residual * o.trace[k].residual;
      worst_rise = std::max(worst_rise, cur - prev);
      mono = mono && cur <= prev + 1e-9;
      worst_eig = std::max(worst_eig, o.trace[k].robust_max_eig);
    }
    monotone += mono;
  }
  int alg2_runs = 0;
  for (const SweepResult* r : {&sweeps.h2_eps, &sweeps.h2_T, &sweeps.hinf_eps, &sweeps.hinf_T}) {
    for (const SweepRun& run : r->runs) {
      if (run.mode != DesignMode::kData || run.iterations == 0) continue;
      ++alg2_runs;
      worst_eig = std::max(worst_eig, run.worst_iterate_eig);
    }
  }
  return {monotone == 20 && worst_eig < 0.0,
          "stabilization residual monotone in " + std::to_string(monotone) + "/20 runs (largest rise " +
              num(worst_rise, 3) + ", " + std::to_string(ok_runs) +
              " ok); worst iterate eigenvalue " + num(worst_eig, 3) + " over 20 + " +
              std::to_string(alg2_runs) + " runs"};
}

Verdict criterion12() {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  auto sym = [&](int n) {
    const Eigen::MatrixXd m = rnd(n, n);
    return Eigen::MatrixXd(0.5 * (m + m.transpose()));
  };
  const int nx = 4, nu = 2;
  double worst = std::numeric_limits<double>::infinity(), worst_eq = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const MatrixEllipsoid ell = make_point_ellipsoid(rnd(nx, nx), rnd(nx, nu));
    const Eigen::MatrixXd K = rnd(nu, nx), Kt = rnd(nu, nx), P = sym(nx), Pt = sym(nx);
    Eigen::MatrixXd IK(nx + nu, nx);
    IK << Eigen::MatrixXd::Identity(nx, nx), K;
    const Eigen::MatrixXd M = ell.delta * P - IK;
    const Eigen::MatrixXd Gm = M.transpose() * M;
    const Eigen::MatrixXd diff = Gm - linearize_bilinear(K, P, Kt, Pt, ell);
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                0.5 * (diff + diff.transpose())).eigenvalues()(0));
    Eigen::MatrixXd IKt(nx + nu, nx);
    IKt << Eigen::MatrixXd::Identity(nx, nx), Kt;
    const Eigen::MatrixXd Mt = ell.delta * Pt - IKt;
    const Eigen::MatrixXd at = Mt.transpose() * Mt - linearize_bilinear(Kt, Pt, Kt, Pt, ell);
    worst_eq = std::max(worst_eq, at.cwiseAbs().maxCoeff() / std::max(1.0, Mt.squaredNorm()));
  }
  return {worst >= -1e-10 && worst_eq <= 1e-12,
          "min eigenvalue of G - L " + num(worst, 3) + " (limit -1e-10), relative mismatch at the point " +
              num(worst_eq, 3)};
}

}  // namespace

int main() {
  report(1, "Ellipsoid soundness", criterion1);
  report(2, "Ellipsoid consistency limit", criterion2);
  report(3, "Solver unit suite", criterion3);
  report(4, "Norm oracles", criterion4);
  report(5, "Stabilization design", criterion5);
  report(6, "H2 model-based cell", [] { return model_cell("paper.h2", 2.055, 2.511); });
  report(7, "Hinf model-based cell", [] { return model_cell("paper.hinf", 1.578, 1.929); });
  report(8, "Data-driven trends", criterion8);
  report(9, "Soundness of bounds", criterion9);
  report(10, "Baseline infeasibility", criterion10);
  report(11, "Iteration properties", criterion11);
  report(12, "Linearization minorant", criterion12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
