#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddctl/certify.h"
#include "ddctl/lti.h"
#include "ddctl/synthesis.h"
#include "ddctl/uncertainty.h"

namespace ddctl {

enum class DesignMode { kData, kModel, kBaseline };

const char* to_string(DesignMode mode);
/// Accepts data, model, baseline.
DesignMode parse_mode(const std::string& name);

enum class SweepAxis { kNone, kEps, kT };

struct Scenario {
  std::string name;
  /// Ground-truth plant, including the performance channels.
  LtiSystem plant;
  CollectConfig data;
  SparsityPattern pattern;
  Objective objective = Objective::kStabilize;
  AlgoConfig algo;
  DesignMode mode = DesignMode::kData;
  /// Radius parameter of the point ellipsoid used in model mode.
  double rho = 1e8;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int samples = 1000;
  std::uint64_t certify_seed = 7;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> axis_values;

  /// Throws InputError / DimensionError.
  void validate() const;
};

/// Built-in scenarios paper.stab, paper.h2 and paper.hinf: two-mass chain,
/// T = 100, Ts = 0.1, eps = 0.01, mu = 2, eps_T = 0.01.
Scenario preset(const std::string& name);

/// Flat `key = value` text; `#` starts a comment. A `preset` key (if any)
/// must come first and seeds the remaining fields. Errors carry the line
/// number of the offending entry.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

struct RunResult {
  std::uint64_t seed = 0;
  std::optional<DataSet> data;
  std::optional<MatrixEllipsoid> ellipsoid;
  SynthesisOutcome outcome;
  std::optional<CertificationReport> report;
  /// Message when the data could not be fitted (no outcome then).
  std::string data_error;
  int exit_code = 0;
};

/// Exit code of an outcome: 0 ok, 2 infeasible, 3 no-convergence.
int exit_code(OutcomeStatus status);

/// Uncertainty set of the scenario for one data seed (point ellipsoid in
/// model mode).
MatrixEllipsoid build_ellipsoid(const Scenario& s, std::uint64_t seed,
                                std::optional<DataSet>* data_out = nullptr);

/// Collect, fit, synthesize and (when `certify`) certify for one seed.
RunResult run_once(const Scenario& s, std::uint64_t seed, bool certify, int jobs = 1);

/// One-line console summary of a run.
std::string summarize(const Scenario& s, const RunResult& r);

/// Writes data.csv, ellipsoid.csv, outcome.csv, trace.csv, report.txt and
/// samples.csv into out_dir (created if needed).
void write_artifacts(const std::string& out_dir, const RunResult& r);

/// One synthesis run inside a sweep.
struct SweepRun {
  DesignMode mode = DesignMode::kData;
  double axis_value = 0.0;  // NaN for the model-based column
  std::uint64_t seed = 0;
  OutcomeStatus status = OutcomeStatus::kInfeasible;
  std::optional<double> gamma;
  std::optional<double> true_norm;
  bool hurwitz_truth = false;
  /// Largest robust-inequality eigenvalue over the iterates (k >= 1).
  double worst_iterate_eig = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  /// Set when the data of this seed could not be fitted.
  std::string error;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kEps;
  std::vector<double> values;
  /// Row labels ("X diag", "Ours"); column 0 is the model-based "(A,B)" cell.
  std::vector<std::string> rows;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::uint64_t> seeds;

  std::string to_csv() const;
  /// Aligned console table, 4 significant digits.
  std::string to_text() const;
};

SweepTable parse_sweep_csv(const std::string& text);

struct SweepResult {
  SweepTable table;
  std::vector<SweepRun> runs;
};

/// Median over the seeds of every (design, axis value) cell. A cell holds a
/// number when at least half of its seeds end ok (median of those), else
/// "Infeasible" or "NoConv" by majority failure. Runs are spread over `jobs`
/// threads; the result does not depend on `jobs`.
SweepResult run_sweep(const Scenario& s, int jobs = 1);

}  // namespace ddctl
