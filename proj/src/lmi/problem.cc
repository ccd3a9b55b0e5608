#include "ddctl/lmi/problem.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/SVD>

#include "ddctl/errors.h"

namespace ddctl::lmi {

namespace {

std::atomic<std::uint64_t> next_problem_id{1};

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::kStrictNeg: return "< -eta I";
    case Sense::kNegSemidef: return "<= 0";
    case Sense::kPosSemidef: return ">= 0";
    case Sense::kStrictPos: return "> eta I";
    case Sense::kZero: return "== 0";
  }
  return "?";
}

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::kSymmetric: return "symmetric";
    case VarKind::kMatrix: return "matrix";
    case VarKind::kScalar: return "scalar";
    case VarKind::kNonneg: return "nonneg";
  }
  return "?";
}

bool is_symmetric(const MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

bool all_of_finite(const Affine& e) {
  if (!e.constant().allFinite()) return false;
  for (const auto& [k, c] : e.terms()) {
    if (!c.allFinite()) return false;
  }
  return true;
}

}  // namespace

LmiProblem::LmiProblem() : id_(next_problem_id++) {}

Affine LmiProblem::declare(const std::string& name, VarKind kind, int rows, int cols) {
  if (name.empty()) throw AssemblyError("variable name must not be empty");
  if (by_name_.count(name)) throw AssemblyError("duplicate variable '" + name + "'");
  if (rows < 1 || cols < 1) throw AssemblyError("variable '" + name + "' has no entries");
  Variable v;
  v.name = name;
  v.kind = kind;
  v.rows = rows;
  v.cols = cols;
  v.offset = num_scalars_;
  v.expr = Affine(rows, cols);
  int idx = num_scalars_;
  if (kind == VarKind::kSymmetric) {
    for (int j = 0; j < rows; ++j) {
      for (int i = j; i < rows; ++i) {
        MatrixXd basis = MatrixXd::Zero(rows, rows);
        basis(i, j) = basis(j, i) = 1.0;
        v.expr.add_term(id_, idx++, basis);
      }
    }
  } else {
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        MatrixXd basis = MatrixXd::Zero(rows, cols);
        basis(i, j) = 1.0;
        v.expr.add_term(id_, idx++, basis);
      }
    }
  }
  v.count = idx - num_scalars_;
  num_scalars_ = idx;
  by_name_[name] = static_cast<int>(vars_.size());
  vars_.push_back(v);
  return vars_.back().expr;
}

Affine LmiProblem::symmetric(const std::string& name, int order) {
  return declare(name, VarKind::kSymmetric, order, order);
}

Affine LmiProblem::matrix(const std::string& name, int rows, int cols) {
  return declare(name, VarKind::kMatrix, rows, cols);
}

Affine LmiProblem::scalar(const std::string& name) {
  return declare(name, VarKind::kScalar, 1, 1);
}

Affine LmiProblem::nonneg(const std::string& name) {
  return declare(name, VarKind::kNonneg, 1, 1);
}

void LmiProblem::check_expr(const Affine& expr, const char* what) const {
  if (expr.owner() != 0 && expr.owner() != id_) {
    throw AssemblyError(std::string(what) + " references variables of another problem");
  }
  for (const auto& [i, c] : expr.terms()) {
    if (i < 0 || i >= num_scalars_) {
      throw AssemblyError(std::string(what) + " references an undeclared variable");
    }
  }
  if (!all_of_finite(expr)) throw InputError(std::string(what) + " has non-finite data");
}

void LmiProblem::constrain(const Affine& expr, Sense sense, const std::string& label) {
  const std::string name = label.empty() ? "c" + std::to_string(constraints_.size()) : label;
  check_expr(expr, ("constraint '" + name + "'").c_str());
  if (sense != Sense::kZero) {
    if (expr.rows() != expr.cols()) {
      throw DimensionError("constraint '" + name + "' must be square");
    }
    if (!is_symmetric(expr.constant())) {
      throw AssemblyError("constraint '" + name + "' is not symmetric");
    }
    for (const auto& [i, c] : expr.terms()) {
      if (!is_symmetric(c)) {
        throw AssemblyError("constraint '" + name + "' is not symmetric in x" +
                            std::to_string(i));
      }
    }
  }
  constraints_.push_back({expr, sense, name});
}

void LmiProblem::minimize(const Affine& objective) {
  if (objective.rows() != 1 || objective.cols() != 1) {
    throw DimensionError("objective must be a scalar expression");
  }
  check_expr(objective, "objective");
  objective_ = objective;
  has_objective_ = true;
}

void LmiProblem::set_eta(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InputError("eta must be finite and >= 0");
  eta_ = eta;
}

const Variable& LmiProblem::variable(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw AssemblyError("unknown variable '" + name + "'");
  return vars_[it->second];
}

ConicForm LmiProblem::assemble() const {
  const int n = num_scalars_;
  if (n == 0) throw AssemblyError("problem declares no variables");

  // Equality rows.
  std::vector<VectorXd> eq_rows;
  std::vector<double> eq_rhs;
  for (const auto& con : constraints_) {
    if (con.sense != Sense::kZero) continue;
    const bool sym = con.expr.rows() == con.expr.cols() && is_symmetric(con.expr.constant()) &&
                     std::all_of(con.expr.terms().begin(), con.expr.terms().end(),
                                 [](const auto& t) { return is_symmetric(t.second); });
    for (int j = 0; j < con.expr.cols(); ++j) {
      for (int i = sym ? j : 0; i < con.expr.rows(); ++i) {
        VectorXd row = VectorXd::Zero(n);
        for (const auto& [k, c] : con.expr.terms()) row(k) = c(i, j);
        eq_rows.push_back(row);
        eq_rhs.push_back(-con.expr.constant()(i, j));
      }
    }
  }

  ConicForm form;
  form.x0 = VectorXd::Zero(n);
  form.N = MatrixXd::Identity(n, n);
  if (!eq_rows.empty()) {
    MatrixXd Aeq(eq_rows.size(), n);
    VectorXd beq(eq_rows.size());
    for (std::size_t r = 0; r < eq_rows.size(); ++r) {
      Aeq.row(r) = eq_rows[r].transpose();
      beq(r) = eq_rhs[r];
    }
    Eigen::JacobiSVD<MatrixXd> svd(Aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0) * std::max<int>(n, eq_rows.size());
    int rank = 0;
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    svd.setThreshold(tol / std::max(1.0, sv.size() ? sv(0) : 1.0));
    form.x0 = svd.solve(beq);
    if ((Aeq * form.x0 - beq).norm() > 1e-9 * (1.0 + beq.norm())) {
      form.inconsistent_equalities = true;
    }
    form.N = svd.matrixV().rightCols(n - rank);
  }

  // Inequalities as F(x) >= 0 in cone coordinates.
  struct Ineq {
    MatrixXd F0;
    std::vector<std::pair<int, MatrixXd>> Fi;
    std::string label;
  };
  std::vector<Ineq> lp, psd;
  for (const auto& v : vars_) {
    if (v.kind != VarKind::kNonneg) continue;
    Ineq q{MatrixXd::Zero(1, 1), {{v.offset, MatrixXd::Ones(1, 1)}}, v.name + ">=0"};
    lp.push_back(q);
  }
  for (const auto& con : constraints_) {
    if (con.sense == Sense::kZero) continue;
    const int order = con.expr.rows();
    const double sign = (con.sense == Sense::kStrictNeg || con.sense == Sense::kNegSemidef) ? -1.0 : 1.0;
    Ineq q;
    q.label = con.label;
    q.F0 = sign * 0.5 * (con.expr.constant() + con.expr.constant().transpose());
    if (con.sense == Sense::kStrictNeg || con.sense == Sense::kStrictPos) {
      q.F0 -= eta_ * MatrixXd::Identity(order, order);
    }
    for (const auto& [k, c] : con.expr.terms()) {
      q.Fi.emplace_back(k, sign * 0.5 * (c + c.transpose()));
    }
    (order == 1 ? lp : psd).push_back(std::move(q));
  }

  ConeDims dims;
  dims.lp = static_cast<int>(lp.size());
  for (const auto& q : psd) dims.psd.push_back(static_cast<int>(q.F0.rows()));
  const int rows = dims.size();
  MatrixXd Gx = MatrixXd::Zero(rows, n);
  VectorXd h(rows);
  int r = 0;
  for (std::size_t i = 0; i < lp.size(); ++i, ++r) {
    h(r) = lp[i].F0(0, 0);
    for (const auto& [k, c] : lp[i].Fi) Gx(r, k) -= c(0, 0);
    form.slots.push_back({lp[i].label, false, static_cast<int>(i)});
  }
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const int len = svec_size(static_cast<int>(psd[i].F0.rows()));
    h.segment(r, len) = svec(psd[i].F0);
    for (const auto& [k, c] : psd[i].Fi) Gx.block(r, k, len, 1) -= svec(c);
    form.slots.push_back({psd[i].label, true, static_cast<int>(i)});
    r += len;
  }

  VectorXd cx = VectorXd::Zero(n);
  if (has_objective_) {
    for (const auto& [k, c] : objective_.terms()) cx(k) = c(0, 0);
    form.objective_offset = objective_.constant()(0, 0);
  }
  form.objective_offset += cx.dot(form.x0);
  form.conic.dims = dims;
  form.conic.G = Gx * form.N;
  form.conic.h = h - Gx * form.x0;
  form.conic.c = form.N.transpose() * cx;
  return form;
}

std::string LmiProblem::dump() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "problem " << id_ << " eta=" << eta_ << "\n";
  os << "variables " << vars_.size() << " scalars " << num_scalars_ << "\n";
  for (const auto& v : vars_) {
    os << "  " << v.name << " " << kind_name(v.kind) << " " << v.rows << "x" << v.cols
       << " offset=" << v.offset << " count=" << v.count << "\n";
  }
  if (has_objective_) {
    os << "objective constant " << objective_.constant()(0, 0) << "\n";
    for (const auto& [k, c] : objective_.terms()) os << "  x" << k << " " << c(0, 0) << "\n";
  }
  for (const auto& con : constraints_) {
    os << "constraint " << con.label << " " << con.expr.rows() << "x" << con.expr.cols()
       << " " << sense_name(con.sense) << "\n";
    os << " F0\n" << con.expr.constant() << "\n";
    for (const auto& [k, c] : con.expr.terms()) os << " x" << k << "\n" << c << "\n";
  }
  return os.str();
}

}  // namespace ddctl::lmi
