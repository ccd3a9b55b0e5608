#include "ddctl/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ddctl/errors.h"
#include "ddctl/matops.h"

namespace ddctl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s, int line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw InputError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw InputError("line " + std::to_string(line) + ": not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

const std::string& BlockFile::get(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  throw InputError("missing header field '" + key + "'");
}

double BlockFile::number(const std::string& key) const { return parse_double(get(key), 0); }

bool BlockFile::has(const std::string& key) const {
  for (const auto& kv : header) {
    if (kv.first == key) return true;
  }
  return false;
}

const MatrixXd& BlockFile::block(const std::string& name) const {
  for (const auto& [k, m] : blocks) {
    if (k == name) return m;
  }
  throw InputError("missing block '" + name + "'");
}

bool BlockFile::has_block(const std::string& name) const {
  for (const auto& kv : blocks) {
    if (kv.first == name) return true;
  }
  return false;
}

void write_blocks(std::ostream& os, const BlockFile& file) {
  for (const auto& [k, v] : file.header) os << "# " << k << "=" << v << "\n";
  for (const auto& [name, m] : file.blocks) {
    os << name << "," << m.rows() << "," << m.cols() << "\n";
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_number(m(i, j));
      os << "\n";
    }
  }
}

BlockFile read_blocks(std::istream& is) {
  BlockFile file;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto eq = s.find('=');
      if (eq == std::string::npos) continue;
      file.header.emplace_back(trim(s.substr(1, eq - 1)), trim(s.substr(eq + 1)));
      continue;
    }
    const auto head = split(s, ',');
    if (head.size() != 3) {
      throw InputError("line " + std::to_string(line) + ": expected 'name,rows,cols'");
    }
    const int rows = parse_int(head[1], line), cols = parse_int(head[2], line);
    if (rows < 0 || cols < 0) throw InputError("line " + std::to_string(line) + ": negative size");
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      if (!std::getline(is, raw)) {
        throw InputError("block '" + head[0] + "' ends early after line " + std::to_string(line));
      }
      ++line;
      const auto cells = split(trim(raw), ',');
      if (static_cast<int>(cells.size()) != cols) {
        throw InputError("line " + std::to_string(line) + ": expected " + std::to_string(cols) +
                         " values, found " + std::to_string(cells.size()));
      }
      for (int j = 0; j < cols; ++j) m(i, j) = parse_double(cells[j], line);
    }
    file.blocks.emplace_back(head[0], std::move(m));
  }
  return file;
}

void write_dataset(std::ostream& os, const DataSet& data) {
  BlockFile f;
  f.header = {{"Ts", format_number(data.Ts)},
              {"eps", format_number(data.eps)},
              {"seed", std::to_string(data.seed)}};
  f.blocks = {{"X0", data.X0}, {"U0", data.U0}, {"X1", data.X1}};
  if (data.D0.size() > 0) f.blocks.emplace_back("D0", data.D0);
  write_blocks(os, f);
}

DataSet read_dataset(std::istream& is) {
  const BlockFile f = read_blocks(is);
  DataSet d;
  d.Ts = f.number("Ts");
  d.eps = f.number("eps");
  d.seed = std::stoull(f.get("seed"));
  d.X0 = f.block("X0");
  d.U0 = f.block("U0");
  d.X1 = f.block("X1");
  if (f.has_block("D0")) d.D0 = f.block("D0");
  d.validate();
  return d;
}

void write_ellipsoid(std::ostream& os, const MatrixEllipsoid& ell) {
  BlockFile f;
  f.header = {{"logdet", format_number(-ell.objective)},
              {"nx", std::to_string(ell.nx())},
              {"nu", std::to_string(ell.nu())}};
  f.blocks = {{"Astar", ell.Astar}, {"Bstar", ell.Bstar}, {"delta", ell.delta}};
  if (ell.theta.size() > 0) f.blocks.emplace_back("theta", MatrixXd(ell.theta.transpose()));
  write_blocks(os, f);
}

MatrixEllipsoid read_ellipsoid(std::istream& is) {
  const BlockFile f = read_blocks(is);
  MatrixEllipsoid ell;
  ell.Astar = f.block("Astar");
  ell.Bstar = f.block("Bstar");
  ell.delta = f.block("delta");
  if (ell.Astar.rows() != ell.Astar.cols() || ell.delta.rows() != ell.Astar.rows() ||
      ell.Bstar.rows() != ell.Astar.rows() || ell.Bstar.cols() != ell.delta.cols()) {
    throw DimensionError("ellipsoid blocks have inconsistent shapes");
  }
  if (f.has_block("theta")) ell.theta = f.block("theta").transpose();
  const SymMatrix As(ell.Astar);
  ell.AstarInvSqrt = inv_sqrt_spd(As).entries();
  ell.objective = -logdet_spd(As);
  return ell;
}

void write_outcome(std::ostream& os, const SynthesisOutcome& out) {
  BlockFile f;
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : "none"; };
  f.header = {{"objective", to_string(out.objective)},
              {"status", to_string(out.status)},
              {"iterations", std::to_string(out.iterations)},
              {"gamma", opt(out.gamma)},
              {"lambda", opt(out.lambda)},
              {"gamma_unprojected", opt(out.gamma_unprojected)},
              {"message", out.message}};
  f.blocks = {{"K", out.K}, {"P", out.P}};
  write_blocks(os, f);
}

SynthesisOutcome read_outcome(std::istream& is) {
  const BlockFile f = read_blocks(is);
  SynthesisOutcome out;
  out.objective = parse_objective(f.get("objective"));
  const std::string& st = f.get("status");
  if (st == "ok") {
    out.status = OutcomeStatus::kOk;
  } else if (st == "infeasible") {
    out.status = OutcomeStatus::kInfeasible;
  } else if (st == "no-convergence") {
    out.status = OutcomeStatus::kNoConvergence;
  } else {
    throw InputError("unknown status '" + st + "'");
  }
  out.iterations = std::stoi(f.get("iterations"));
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!f.has(key) || f.get(key) == "none") return std::nullopt;
    return f.number(key);
  };
  out.gamma = opt("gamma");
  out.lambda = opt("lambda");
  out.gamma_unprojected = opt("gamma_unprojected");
  if (f.has("message")) out.message = f.get("message");
  out.K = f.block("K");
  out.P = f.block("P");
  return out;
}

void write_trace(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << "iteration,objective,residual,gamma,lambda,beta,dK,dP,robust_max_eig\n";
  for (const IterationRecord& r : trace) {
    os << r.iteration << "," << format_number(r.objective) << "," << format_number(r.residual)
       << "," << format_number(r.gamma) << "," << format_number(r.lambda) << ","
       << format_number(r.beta) << "," << format_number(r.dK) << "," << format_number(r.dP)
       << "," << format_number(r.robust_max_eig) << "\n";
  }
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  os << text;
  if (!os) throw InputError("write failed for '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ddctl
