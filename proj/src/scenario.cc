#include "ddctl/scenario.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "ddctl/csv.h"
#include "ddctl/errors.h"
#include "ddctl/matops.h"

namespace ddctl {

const char* to_string(DesignMode mode) {
  switch (mode) {
    case DesignMode::kData: return "data";
    case DesignMode::kModel: return "model";
    case DesignMode::kBaseline: return "baseline";
  }
  return "?";
}

DesignMode parse_mode(const std::string& name) {
  if (name == "data" || name == "data-driven") return DesignMode::kData;
  if (name == "model" || name == "model-based-point-ellipsoid") return DesignMode::kModel;
  if (name == "baseline" || name == "baseline-xdiag") return DesignMode::kBaseline;
  throw InputError("unknown mode '" + name + "' (expected data, model or baseline)");
}

void Scenario::validate() const {
  plant.validate();
  if (!(data.Ts > 0.0)) throw InputError("data.Ts must be > 0");
  if (data.T < 1) throw InputError("data.T must be >= 1");
  if (!(data.eps > 0.0)) throw InputError("data.eps must be > 0");
  if (pattern.rows() != plant.nu() || pattern.cols() != plant.nx()) {
    throw DimensionError("pattern is " + std::to_string(pattern.rows()) + "x" +
                         std::to_string(pattern.cols()) + " but the plant needs " +
                         std::to_string(plant.nu()) + "x" + std::to_string(plant.nx()));
  }
  algo.validate();
  if (seeds.empty()) throw InputError("seeds must not be empty");
  if (samples < 0) throw InputError("certify.samples must be >= 0");
  if (!(rho > 0.0)) throw InputError("model.rho must be > 0");
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.plant = make_mass_spring(2);
  s.data = CollectConfig{};
  s.algo.mu = 2.0;
  s.algo.eps_T = 0.01;
  s.algo.max_iter = 500;
  MatrixXi mask(2, 4);
  if (name == "paper.stab") {
    mask << 0, 1, 1, 0, 0, 1, 1, 0;
    s.objective = Objective::kStabilize;
  } else if (name == "paper.h2") {
    mask << 1, 1, 0, 0, 0, 0, 1, 1;
    s.objective = Objective::kH2;
  } else if (name == "paper.hinf") {
    mask << 0, 0, 1, 1, 1, 0, 0, 0;
    s.objective = Objective::kHinf;
    s.plant.H = MatrixXd::Zero(6, 2);
    s.plant.H.bottomRows(2).setIdentity();
  } else {
    throw InputError("unknown preset '" + name + "' (expected paper.stab, paper.h2, paper.hinf)");
  }
  s.pattern = SparsityPattern(mask);
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

struct Entry {
  std::string key, value;
  int line = 0;
};

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  throw InputError("line " + std::to_string(e.line) + " (" + e.key + "): " + what);
}

double to_double(const Entry& e, const std::string& w) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(w, &pos);
    if (pos != w.size()) fail(e, "not a number: '" + w + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(e, "not a number: '" + w + "'");
  }
}

long long to_int(const Entry& e, const std::string& w) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(w, &pos);
    if (pos != w.size()) fail(e, "not an integer: '" + w + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(e, "not an integer: '" + w + "'");
  }
}

double scalar(const Entry& e) {
  const auto w = words(e.value);
  if (w.size() != 1) fail(e, "expected one number");
  return to_double(e, w[0]);
}

// "a b c; d e f" -> 2x3.
MatrixXd matrix(const Entry& e) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(e.value);
  std::string row;
  while (std::getline(is, row, ';')) {
    std::vector<double> r;
    for (const auto& w : words(row)) r.push_back(to_double(e, w));
    if (r.empty()) continue;
    if (!rows.empty() && r.size() != rows[0].size()) {
      fail(e, "row " + std::to_string(rows.size() + 1) + " has " + std::to_string(r.size()) +
                  " entries, expected " + std::to_string(rows[0].size()));
    }
    rows.push_back(std::move(r));
  }
  MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    entries.push_back({trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line});
  }

  Scenario s;
  s.plant = make_mass_spring(2);
  s.pattern = SparsityPattern::Full(s.plant.nu(), s.plant.nx());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].key != "preset") continue;
    if (i != 0) fail(entries[i], "preset must be the first entry");
    s = preset(entries[i].value);
  }

  std::map<int, std::vector<int>> pattern_rows;
  const Entry* pattern_entry = nullptr;
  std::map<int, const Entry*> pattern_lines;
  for (const Entry& e : entries) {
    const std::string& k = e.key;
    if (k == "preset") continue;
    if (k == "name") {
      s.name = e.value;
    } else if (k == "plant") {
      if (e.value != "mass_spring") fail(e, "unknown builtin plant '" + e.value + "'");
    } else if (k == "plant.masses") {
      const long long n = to_int(e, e.value);
      if (n < 1) fail(e, "need at least one mass");
      s.plant = make_mass_spring(static_cast<int>(n));
      if (s.plant.nu() != s.pattern.rows() || s.plant.nx() != s.pattern.cols()) {
        s.pattern = SparsityPattern::Full(s.plant.nu(), s.plant.nx());
      }
    } else if (k == "plant.A") {
      s.plant.A = matrix(e);
    } else if (k == "plant.B") {
      s.plant.B = matrix(e);
    } else if (k == "plant.G" || k == "channels.G") {
      s.plant.G = matrix(e);
    } else if (k == "channels.C") {
      s.plant.C = matrix(e);
    } else if (k == "channels.D") {
      s.plant.D = matrix(e);
    } else if (k == "channels.H") {
      s.plant.H = matrix(e);
    } else if (k == "channels.preset") {
      const Scenario p = preset(e.value);
      s.plant.C = p.plant.C;
      s.plant.D = p.plant.D;
      s.plant.G = p.plant.G;
      s.plant.H = p.plant.H;
    } else if (k == "data.T") {
      s.data.T = static_cast<int>(to_int(e, e.value));
    } else if (k == "data.Ts") {
      s.data.Ts = scalar(e);
    } else if (k == "data.eps") {
      s.data.eps = scalar(e);
    } else if (k == "data.seed") {
      s.seeds = {static_cast<std::uint64_t>(to_int(e, e.value))};
    } else if (k == "data.amplitude") {
      s.data.amplitude = scalar(e);
    } else if (k == "data.x0_scale") {
      s.data.x0_scale = scalar(e);
    } else if (k.rfind("pattern.row", 0) == 0) {
      const std::string idx = k.substr(11);
      const long long r = to_int(e, idx);
      if (r < 1) fail(e, "pattern rows are numbered from 1");
      std::vector<int> row;
      for (const auto& w : words(e.value)) {
        const long long v = to_int(e, w);
        if (v != 0 && v != 1) fail(e, "pattern entries must be 0 or 1");
        row.push_back(static_cast<int>(v));
      }
      pattern_rows[static_cast<int>(r)] = row;
      pattern_lines[static_cast<int>(r)] = &e;
      pattern_entry = &e;
    } else if (k == "objective") {
      try {
        s.objective = parse_objective(e.value);
      } catch (const InputError& err) {
        fail(e, err.what());
      }
    } else if (k == "mode") {
      try {
        s.mode = parse_mode(e.value);
      } catch (const InputError& err) {
        fail(e, err.what());
      }
    } else if (k == "algo.beta0") {
      s.algo.beta0 = scalar(e);
    } else if (k == "algo.mu") {
      s.algo.mu = scalar(e);
    } else if (k == "algo.beta_cap") {
      s.algo.beta_cap = scalar(e);
    } else if (k == "algo.eps_T") {
      s.algo.eps_T = scalar(e);
    } else if (k == "algo.eta") {
      s.algo.eta = scalar(e);
    } else if (k == "algo.max_iter") {
      s.algo.max_iter = static_cast<int>(to_int(e, e.value));
    } else if (k == "model.rho") {
      s.rho = scalar(e);
    } else if (k == "seeds") {
      s.seeds.clear();
      for (const auto& w : words(e.value)) {
        s.seeds.push_back(static_cast<std::uint64_t>(to_int(e, w)));
      }
      if (s.seeds.empty()) fail(e, "seeds must not be empty");
    } else if (k == "certify.samples") {
      s.samples = static_cast<int>(to_int(e, e.value));
    } else if (k == "certify.seed") {
      s.certify_seed = static_cast<std::uint64_t>(to_int(e, e.value));
    } else if (k == "sweep.axis") {
      if (e.value == "eps") {
        s.axis = SweepAxis::kEps;
      } else if (e.value == "T") {
        s.axis = SweepAxis::kT;
      } else {
        fail(e, "sweep.axis must be eps or T");
      }
    } else if (k == "sweep.values") {
      s.axis_values.clear();
      for (const auto& w : words(e.value)) s.axis_values.push_back(to_double(e, w));
    } else {
      fail(e, "unknown key");
    }
  }

  if (!pattern_rows.empty()) {
    const int nu = s.plant.nu(), nx = s.plant.nx();
    MatrixXi mask(nu, nx);
    for (const auto& [r, row] : pattern_rows) {
      const Entry& e = *pattern_lines[r];
      if (r > nu) fail(e, "pattern has more rows than the plant has inputs (" + std::to_string(nu) + ")");
      if (static_cast<int>(row.size()) != nx) {
        fail(e, "pattern row has " + std::to_string(row.size()) + " entries, expected " +
                    std::to_string(nx));
      }
      for (int j = 0; j < nx; ++j) mask(r - 1, j) = row[j];
    }
    if (static_cast<int>(pattern_rows.size()) != nu) {
      fail(*pattern_entry, "pattern needs rows 1.." + std::to_string(nu));
    }
    s.pattern = SparsityPattern(mask);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  const std::string text = load_text(path);
  try {
    return parse_scenario(text);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

int exit_code(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kOk: return 0;
    case OutcomeStatus::kInfeasible: return 2;
    case OutcomeStatus::kNoConvergence: return 3;
  }
  return 1;
}

MatrixEllipsoid build_ellipsoid(const Scenario& s, std::uint64_t seed,
                                std::optional<DataSet>* data_out) {
  if (s.mode == DesignMode::kModel) return make_point_ellipsoid(s.plant.A, s.plant.B, s.rho);
  CollectConfig cfg = s.data;
  cfg.seed = seed;
  DataSet data = simulate_collect(s.plant, cfg);
  MatrixEllipsoid ell = fit_min_ellipsoid(sample_blocks(data, s.plant.G, cfg.eps));
  if (data_out) *data_out = std::move(data);
  return ell;
}

RunResult run_once(const Scenario& s, std::uint64_t seed, bool certify, int jobs) {
  RunResult r;
  r.seed = seed;
  const MatrixEllipsoid ell = build_ellipsoid(s, seed, &r.data);
  r.ellipsoid = ell;
  const Channels ch = Channels::from(s.plant);
  r.outcome = s.mode == DesignMode::kBaseline
                  ? baseline_xdiag(ell, s.pattern, s.objective, ch, s.algo)
                  : synthesize(ell, s.objective, ch, s.pattern, s.algo);
  r.exit_code = exit_code(r.outcome.status);
  if (certify && r.outcome.ok()) {
    CertifyOptions opts;
    opts.samples = s.samples;
    opts.seed = s.certify_seed;
    opts.jobs = jobs;
    opts.truth = s.plant;
    opts.pattern = s.pattern;
    r.report = certify_robust(ell, r.outcome, s.objective, ch, opts);
  }
  return r;
}

std::string summarize(const Scenario& s, const RunResult& r) {
  std::ostringstream os;
  os << std::setprecision(4);
  os << (s.name.empty() ? "scenario" : s.name) << " [" << to_string(s.mode) << ", "
     << to_string(s.objective) << ", seed " << r.seed << "]: " << to_string(r.outcome.status);
  if (r.outcome.gamma) os << ", gamma=" << *r.outcome.gamma;
  if (r.outcome.K.size() > 0) os << ", residual=" << structural_residual(r.outcome.K, s.pattern);
  if (r.report) {
    if (r.report->hurwitz_truth) os << ", Hurwitz=" << (*r.report->hurwitz_truth ? "true" : "false");
    os << ", certified fraction=" << r.report->hurwitz_sampled_fraction;
    if (s.objective != Objective::kStabilize) {
      os << " (performance " << r.report->performance_sampled_fraction << ")";
    }
  }
  os << ", iterations=" << r.outcome.iterations;
  if (!r.outcome.message.empty()) os << " (" << r.outcome.message << ")";
  return os.str();
}

void write_artifacts(const std::string& out_dir, const RunResult& r) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  auto put = [&](const char* file, const auto& writer) {
    std::ostringstream os;
    writer(os);
    save_text((dir / file).string(), os.str());
  };
  if (r.data) put("data.csv", [&](std::ostream& os) { write_dataset(os, *r.data); });
  if (r.ellipsoid) put("ellipsoid.csv", [&](std::ostream& os) { write_ellipsoid(os, *r.ellipsoid); });
  put("outcome.csv", [&](std::ostream& os) { write_outcome(os, r.outcome); });
  put("trace.csv", [&](std::ostream& os) { write_trace(os, r.outcome.trace); });
  if (r.report) {
    save_text((dir / "report.txt").string(), r.report->to_text());
    save_text((dir / "samples.csv").string(), r.report->per_sample_csv());
  }
}

namespace {

const char* kInfeasible = "Infeasible";
const char* kNoConv = "NoConv";

// Comma-separated fields; double quotes protect commas.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

std::string axis_name(SweepAxis a) { return a == SweepAxis::kT ? "T" : "eps"; }

std::string cell_of(const std::vector<const SweepRun*>& runs) {
  std::vector<double> ok;
  int infeasible = 0, noconv = 0;
  for (const SweepRun* r : runs) {
    if (r->status == OutcomeStatus::kOk) {
      ok.push_back(r->gamma.value_or(0.0));
    } else if (r->status == OutcomeStatus::kInfeasible) {
      ++infeasible;
    } else {
      ++noconv;
    }
  }
  if (!ok.empty() && 2 * ok.size() >= runs.size()) {
    std::sort(ok.begin(), ok.end());
    const std::size_t n = ok.size();
    const double med = n % 2 ? ok[n / 2] : 0.5 * (ok[n / 2 - 1] + ok[n / 2]);
    return format_number(med);
  }
  return infeasible >= noconv ? kInfeasible : kNoConv;
}

}  // namespace

SweepResult run_sweep(const Scenario& s, int jobs) {
  s.validate();
  if (s.axis == SweepAxis::kNone || s.axis_values.empty()) {
    throw InputError("sweep needs sweep.axis and sweep.values");
  }
  struct Job {
    DesignMode mode;
    double value;  // NaN: model-based column
    std::uint64_t seed;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Job> list;
  for (DesignMode m : {DesignMode::kBaseline, DesignMode::kData}) {
    list.push_back({m, nan, 0});
    for (double v : s.axis_values) {
      for (std::uint64_t seed : s.seeds) list.push_back({m, v, seed});
    }
  }

  std::vector<SweepRun> runs(list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < list.size(); i = next++) {
      const Job& j = list[i];
      Scenario c = s;
      if (std::isnan(j.value)) {
        c.mode = DesignMode::kModel;
      } else {
        c.mode = DesignMode::kData;
        if (s.axis == SweepAxis::kEps) c.data.eps = j.value;
        if (s.axis == SweepAxis::kT) c.data.T = static_cast<int>(j.value);
      }
      SweepRun& r = runs[i];
      r.mode = j.mode;
      r.axis_value = j.value;
      r.seed = j.seed;
      try {
        const MatrixEllipsoid ell = build_ellipsoid(c, j.seed);
        const Channels ch = Channels::from(c.plant);
        const SynthesisOutcome out =
            j.mode == DesignMode::kBaseline
                ? baseline_xdiag(ell, c.pattern, c.objective, ch, c.algo)
                : synthesize(ell, c.objective, ch, c.pattern, c.algo);
        r.status = out.status;
        r.gamma = out.gamma;
        r.iterations = out.iterations;
        for (std::size_t k = 1; k < out.trace.size(); ++k) {
          r.worst_iterate_eig = std::max(r.worst_iterate_eig, out.trace[k].robust_max_eig);
        }
        if (out.ok()) {
          r.hurwitz_truth = is_hurwitz(c.plant.A + c.plant.B * out.K);
          if (r.hurwitz_truth && c.objective == Objective::kH2) r.true_norm = h2_norm(c.plant, out.K);
          if (r.hurwitz_truth && c.objective == Objective::kHinf) r.true_norm = hinf_norm(c.plant, out.K);
        }
      } catch (const Error& e) {
        // Unusable data for this seed counts as a failed cell entry.
        r.status = OutcomeStatus::kNoConvergence;
        r.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(list.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult res;
  res.runs = runs;
  SweepTable& tab = res.table;
  tab.axis = s.axis;
  tab.values = s.axis_values;
  tab.seeds = s.seeds;
  for (DesignMode m : {DesignMode::kBaseline, DesignMode::kData}) {
    tab.rows.push_back(m == DesignMode::kBaseline ? "X diag" : "Ours");
    std::vector<std::string> row;
    for (int col = -1; col < static_cast<int>(s.axis_values.size()); ++col) {
      std::vector<const SweepRun*> members;
      for (const SweepRun& r : runs) {
        if (r.mode != m) continue;
        const bool model = std::isnan(r.axis_value);
        if (col < 0 ? model : (!model && r.axis_value == s.axis_values[col])) members.push_back(&r);
      }
      if (s.objective == Objective::kStabilize) {
        int ok = 0;
        for (const SweepRun* r : members) ok += r->status == OutcomeStatus::kOk;
        if (2 * ok >= static_cast<int>(members.size()) && ok > 0) {
          row.push_back("Feasible");
          continue;
        }
      }
      row.push_back(cell_of(members));
    }
    tab.cells.push_back(row);
  }
  return res;
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  os << "# median over seeds";
  for (auto sd : seeds) os << " " << sd;
  os << "; a cell is numeric when at least half of its seeds end ok\n";
  os << "design,\"(A,B)\"";
  for (double v : values) os << "," << axis_name(axis) << "=" << format_number(v);
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i];
    for (const auto& c : cells[i]) os << "," << c;
    os << "\n";
  }
  return os.str();
}

std::string SweepTable::to_text() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head{"Design", "(A,B)"};
  for (double v : values) {
    std::ostringstream h;
    h << axis_name(axis) << "=" << std::setprecision(4) << v;
    head.push_back(h.str());
  }
  grid.push_back(head);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> line{rows[i]};
    for (const auto& c : cells[i]) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end && *end == '\0' && !c.empty()) {
        std::ostringstream f;
        f << std::setprecision(4) << v;
        line.push_back(f.str());
      } else {
        line.push_back(c);
      }
    }
    grid.push_back(line);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  }
  std::ostringstream os;
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      os << (j ? "  " : "") << std::setw(static_cast<int>(width[j])) << std::left << line[j];
    }
    os << "\n";
  }
  return os.str();
}

SweepTable parse_sweep_csv(const std::string& text) {
  SweepTable t;
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto p = line.find("seeds");
      if (p != std::string::npos) {
        std::istringstream ss(line.substr(p + 5));
        std::uint64_t sd;
        while (ss >> sd) t.seeds.push_back(sd);
      }
      continue;
    }
    const std::vector<std::string> cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "design" || cells[1] != "(A,B)") {
        throw InputError("sweep csv line " + std::to_string(n) + ": bad header");
      }
      for (std::size_t j = 2; j < cells.size(); ++j) {
        const auto eq = cells[j].find('=');
        if (eq == std::string::npos) throw InputError("sweep csv: bad column '" + cells[j] + "'");
        t.axis = cells[j].substr(0, eq) == "T" ? SweepAxis::kT : SweepAxis::kEps;
        t.values.push_back(std::stod(cells[j].substr(eq + 1)));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.values.size() + 2) {
      throw InputError("sweep csv line " + std::to_string(n) + ": wrong number of cells");
    }
    t.rows.push_back(cells[0]);
    t.cells.emplace_back(cells.begin() + 1, cells.end());
  }
  return t;
}

}  // namespace ddctl
