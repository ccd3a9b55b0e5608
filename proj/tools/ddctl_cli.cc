// Command-line front end: collect, ellipsoid, synth, certify, sweep, norms.

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ddctl/certify.h"
#include "ddctl/csv.h"
#include "ddctl/errors.h"
#include "ddctl/matops.h"
#include "ddctl/scenario.h"

namespace {

using namespace ddctl;

struct Flags {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string mode;
  std::string in;
};

Scenario load(const Flags& f) {
  Scenario s;
  if (!std::filesystem::exists(f.scenario) && f.scenario.rfind("paper.", 0) == 0) {
    s = preset(f.scenario);
  } else {
    s = load_scenario(f.scenario);
  }
  if (!f.mode.empty()) s.mode = parse_mode(f.mode);
  if (f.seed) s.seeds = {*f.seed};
  return s;
}

std::filesystem::path out_path(const Flags& f, const char* file) {
  std::filesystem::create_directories(f.out);
  return std::filesystem::path(f.out) / file;
}

int cmd_collect(const Flags& f) {
  const Scenario s = load(f);
  CollectConfig cfg = s.data;
  cfg.seed = s.seeds.front();
  const DataSet d = simulate_collect(s.plant, cfg);
  std::ostringstream os;
  write_dataset(os, d);
  save_text(out_path(f, "data.csv").string(), os.str());
  std::cout << "collected " << d.T() << " samples (seed " << cfg.seed << ") -> "
            << out_path(f, "data.csv").string() << "\n";
  return 0;
}

int cmd_ellipsoid(const Flags& f) {
  const Scenario s = load(f);
  std::optional<DataSet> data;
  const MatrixEllipsoid ell = build_ellipsoid(s, s.seeds.front(), &data);
  if (data) {
    std::ostringstream os;
    write_dataset(os, *data);
    save_text(out_path(f, "data.csv").string(), os.str());
  }
  std::ostringstream os;
  write_ellipsoid(os, ell);
  save_text(out_path(f, "ellipsoid.csv").string(), os.str());
  std::cout << std::setprecision(4) << "ellipsoid logdet=" << -ell.objective
            << ", truth membership=" << membership_value(ell, s.plant.A, s.plant.B) << " -> "
            << out_path(f, "ellipsoid.csv").string() << "\n";
  return 0;
}

int cmd_synth(const Flags& f) {
  const Scenario s = load(f);
  const RunResult r = run_once(s, s.seeds.front(), true, f.jobs);
  write_artifacts(f.out, r);
  std::cout << summarize(s, r) << "\n";
  return r.exit_code;
}

int cmd_certify(const Flags& f) {
  const Scenario s = load(f);
  const std::filesystem::path dir(f.in.empty() ? f.out : f.in);
  std::istringstream es(load_text((dir / "ellipsoid.csv").string()));
  std::istringstream os(load_text((dir / "outcome.csv").string()));
  const MatrixEllipsoid ell = read_ellipsoid(es);
  const SynthesisOutcome out = read_outcome(os);
  if (out.K.size() == 0 || out.P.size() == 0) {
    throw InputError("outcome has no gain/certificate to check (status " +
                     std::string(to_string(out.status)) + ")");
  }
  CertifyOptions opts;
  opts.samples = s.samples;
  opts.seed = s.certify_seed;
  opts.jobs = f.jobs;
  opts.truth = s.plant;
  opts.pattern = s.pattern;
  const CertificationReport rep = certify_robust(ell, out, out.objective, Channels::from(s.plant), opts);
  save_text(out_path(f, "report.txt").string(), rep.to_text());
  save_text(out_path(f, "samples.csv").string(), rep.per_sample_csv());
  std::cout << rep.to_text();
  return rep.direct_check ? 0 : 3;
}

int cmd_sweep(const Flags& f) {
  Scenario s = load(f);
  const SweepResult res = run_sweep(s, f.jobs);
  save_text(out_path(f, "table.csv").string(), res.table.to_csv());
  save_text(out_path(f, "table.txt").string(), res.table.to_text());
  std::ostringstream runs;
  runs << "design,axis_value,seed,status,gamma,true_norm,hurwitz_truth\n";
  for (const SweepRun& r : res.runs) {
    runs << to_string(r.mode) << "," << (std::isnan(r.axis_value) ? "model" : format_number(r.axis_value))
         << "," << r.seed << "," << to_string(r.status) << ","
         << (r.gamma ? format_number(*r.gamma) : "") << ","
         << (r.true_norm ? format_number(*r.true_norm) : "") << "," << (r.hurwitz_truth ? 1 : 0)
         << "\n";
  }
  save_text(out_path(f, "runs.csv").string(), runs.str());
  std::cout << (s.name.empty() ? "sweep" : s.name) << " (" << to_string(s.objective)
            << ", median over " << s.seeds.size() << " seeds)\n"
            << res.table.to_text();
  return 0;
}

int cmd_norms(const Flags& f) {
  const Scenario s = load(f);
  const std::filesystem::path dir(f.in.empty() ? f.out : f.in);
  std::istringstream os(load_text((dir / "outcome.csv").string()));
  const SynthesisOutcome out = read_outcome(os);
  const MatrixXd& K = out.K;
  std::cout << std::setprecision(4);
  const bool stable = is_hurwitz(s.plant.A + s.plant.B * K);
  std::cout << "hurwitz=" << (stable ? "true" : "false") << "\n";
  if (!stable) return 3;
  if (s.plant.H.cwiseAbs().maxCoeff() == 0.0) std::cout << "h2=" << h2_norm(s.plant, K) << "\n";
  std::cout << "hinf=" << hinf_norm(s.plant, K) << " (grid " << hinf_grid(s.plant, K) << ")\n";
  if (out.gamma) std::cout << "bound=" << *out.gamma << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven structured state-feedback design"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* c) {
    c->add_option("--scenario", f.scenario, "scenario file or preset (paper.stab, paper.h2, paper.hinf)")
        ->required();
    c->add_option("--out", f.out, "output directory");
    c->add_option("--seed", f.seed, "data seed (overrides the scenario seeds)");
    c->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--mode", f.mode, "design mode")->check(CLI::IsMember({"data", "model", "baseline"}));
  };
  auto* collect = app.add_subcommand("collect", "simulate the plant and record data");
  auto* ellipsoid = app.add_subcommand("ellipsoid", "fit the uncertainty ellipsoid");
  auto* synth = app.add_subcommand("synth", "fit, synthesize and certify one design");
  auto* certify = app.add_subcommand("certify", "re-certify a stored outcome");
  auto* sweep = app.add_subcommand("sweep", "reproduce a comparison table");
  auto* norms = app.add_subcommand("norms", "true closed-loop norms of a stored gain");
  for (auto* c : {collect, ellipsoid, synth, certify, sweep, norms}) common(c);
  for (auto* c : {certify, norms}) c->add_option("--in", f.in, "directory with outcome.csv (default --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    if (*collect) return cmd_collect(f);
    if (*ellipsoid) return cmd_ellipsoid(f);
    if (*synth) return cmd_synth(f);
    if (*certify) return cmd_certify(f);
    if (*sweep) return cmd_sweep(f);
    if (*norms) return cmd_norms(f);
  } catch (const ddctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
