#include "ddctl/lmi/affine.h"

#include <string>

#include "ddctl/errors.h"

namespace ddctl::lmi {

namespace {

void require_same_shape(const Affine& a, const Affine& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string("Affine ") + op + ": shape mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Affine::Affine(int rows, int cols) : constant_(MatrixXd::Zero(rows, cols)) {}

Affine::Affine(const MatrixXd& constant) : constant_(constant) {}

Affine Affine::Scalar(std::uint64_t owner, int index) {
  Affine a(1, 1);
  a.add_term(owner, index, MatrixXd::Ones(1, 1));
  return a;
}

void Affine::merge_owner(std::uint64_t other) {
  if (other == 0) return;
  if (owner_ != 0 && owner_ != other) {
    throw AssemblyError("expression mixes variables of different LMI problems");
  }
  owner_ = other;
}

void Affine::add_term(std::uint64_t owner, int index, const MatrixXd& coeff) {
  if (coeff.rows() != rows() || coeff.cols() != cols()) {
    throw DimensionError("Affine::add_term: coefficient shape mismatch");
  }
  merge_owner(owner);
  auto [it, inserted] = terms_.try_emplace(index, coeff);
  if (!inserted) it->second += coeff;
}

Affine Affine::transpose() const {
  Affine t(constant_.transpose());
  t.owner_ = owner_;
  for (const auto& [i, c] : terms_) t.terms_.emplace(i, c.transpose());
  return t;
}

Affine Affine::block(int row, int col, int nrows, int ncols) const {
  if (row < 0 || col < 0 || row + nrows > rows() || col + ncols > cols()) {
    throw DimensionError("Affine::block: range out of bounds");
  }
  Affine b(MatrixXd(constant_.block(row, col, nrows, ncols)));
  b.owner_ = owner_;
  for (const auto& [i, c] : terms_) {
    MatrixXd sub = c.block(row, col, nrows, ncols);
    if (!sub.isZero(0.0)) b.terms_.emplace(i, std::move(sub));
  }
  return b;
}

MatrixXd Affine::evaluate(const VectorXd& x) const {
  MatrixXd v = constant_;
  for (const auto& [i, c] : terms_) {
    if (i >= x.size()) throw DimensionError("Affine::evaluate: variable index out of range");
    v += x(i) * c;
  }
  return v;
}

Affine& Affine::operator+=(const Affine& other) {
  require_same_shape(*this, other, "+");
  merge_owner(other.owner_);
  constant_ += other.constant_;
  for (const auto& [i, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(i, c);
    if (!inserted) it->second += c;
  }
  return *this;
}

Affine& Affine::operator-=(const Affine& other) {
  require_same_shape(*this, other, "-");
  merge_owner(other.owner_);
  constant_ -= other.constant_;
  for (const auto& [i, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(i, -c);
    if (!inserted) it->second -= c;
  }
  return *this;
}

Affine& Affine::operator*=(double s) {
  constant_ *= s;
  for (auto& [i, c] : terms_) c *= s;
  return *this;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(Affine a) { return a *= -1.0; }
Affine operator*(double s, Affine a) { return a *= s; }
Affine operator*(Affine a, double s) { return a *= s; }

Affine left_multiply(const MatrixXd& m, const Affine& a) {
  if (m.cols() != a.rows()) {
    throw DimensionError("Affine: left multiplication shape mismatch");
  }
  Affine r(MatrixXd(m * a.constant()));
  for (const auto& [i, c] : a.terms()) r.add_term(a.owner(), i, m * c);
  return r;
}

Affine right_multiply(const Affine& a, const MatrixXd& m) {
  if (a.cols() != m.rows()) {
    throw DimensionError("Affine: right multiplication shape mismatch");
  }
  Affine r(MatrixXd(a.constant() * m));
  for (const auto& [i, c] : a.terms()) r.add_term(a.owner(), i, c * m);
  return r;
}

Affine operator*(const Affine& a, const Affine& b) {
  if (a.is_constant()) return left_multiply(a.constant(), b);
  if (b.is_constant()) return right_multiply(a, b.constant());
  throw AssemblyError("product of two variable expressions is not affine");
}

Affine scale(const Affine& scalar, const MatrixXd& m) {
  if (scalar.rows() != 1 || scalar.cols() != 1) {
    throw DimensionError("scale: first argument must be a scalar expression");
  }
  Affine r(MatrixXd(scalar.constant()(0, 0) * m));
  for (const auto& [i, c] : scalar.terms()) r.add_term(scalar.owner(), i, c(0, 0) * m);
  return r;
}

Affine herm(const Affine& x) { return x + x.transpose(); }

Affine trace(const Affine& x) {
  if (x.rows() != x.cols()) throw DimensionError("trace: matrix must be square");
  Affine t(MatrixXd::Constant(1, 1, x.constant().trace()));
  for (const auto& [i, c] : x.terms()) {
    t.add_term(x.owner(), i, MatrixXd::Constant(1, 1, c.trace()));
  }
  return t;
}

Affine hadamard(const Affine& x, const MatrixXd& mask) {
  if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
    throw DimensionError("hadamard: mask shape mismatch");
  }
  Affine r(MatrixXd(x.constant().cwiseProduct(mask)));
  for (const auto& [i, c] : x.terms()) {
    MatrixXd p = c.cwiseProduct(mask);
    if (!p.isZero(0.0)) r.add_term(x.owner(), i, p);
  }
  return r;
}

Affine masked_entries(const Affine& x, const Eigen::MatrixXi& mask) {
  if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
    throw DimensionError("masked_entries: mask shape mismatch");
  }
  std::vector<Affine> parts;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      if (mask(i, j) != 0) parts.push_back(x(i, j));
    }
  }
  if (parts.empty()) return Affine(0, 1);
  return vstack(parts);
}

Affine bmat(const std::vector<std::vector<Affine>>& blocks) {
  if (blocks.empty()) return Affine(0, 0);
  const std::size_t nb_cols = blocks.front().size();
  std::vector<int> row_sizes(blocks.size()), col_sizes(nb_cols);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != nb_cols) {
      throw DimensionError("bmat: ragged block rows");
    }
    row_sizes[i] = blocks[i][0].rows();
  }
  for (std::size_t j = 0; j < nb_cols; ++j) col_sizes[j] = blocks[0][j].cols();
  int total_rows = 0, total_cols = 0;
  for (int r : row_sizes) total_rows += r;
  for (int c : col_sizes) total_cols += c;

  Affine out(total_rows, total_cols);
  MatrixXd constant = MatrixXd::Zero(total_rows, total_cols);
  std::map<int, MatrixXd> terms;
  std::uint64_t owner = 0;
  int r0 = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    int c0 = 0;
    for (std::size_t j = 0; j < nb_cols; ++j) {
      const Affine& b = blocks[i][j];
      if (b.rows() != row_sizes[i] || b.cols() != col_sizes[j]) {
        throw DimensionError("bmat: block (" + std::to_string(i) + "," +
                             std::to_string(j) + ") has shape " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                             ", expected " + std::to_string(row_sizes[i]) + "x" +
                             std::to_string(col_sizes[j]));
      }
      constant.block(r0, c0, b.rows(), b.cols()) = b.constant();
      if (b.owner() != 0) {
        if (owner != 0 && owner != b.owner()) {
          throw AssemblyError("bmat: blocks reference different LMI problems");
        }
        owner = b.owner();
      }
      for (const auto& [k, c] : b.terms()) {
        auto [it, inserted] = terms.try_emplace(k);
        if (inserted) it->second = MatrixXd::Zero(total_rows, total_cols);
        it->second.block(r0, c0, b.rows(), b.cols()) += c;
      }
      c0 += col_sizes[j];
    }
    r0 += row_sizes[i];
  }
  Affine result(constant);
  for (auto& [k, c] : terms) result.add_term(owner, k, c);
  return result;
}

Affine vstack(const std::vector<Affine>& blocks) {
  std::vector<std::vector<Affine>> rows;
  rows.reserve(blocks.size());
  for (const auto& b : blocks) rows.push_back({b});
  return bmat(rows);
}

Affine hstack(const std::vector<Affine>& blocks) { return bmat({blocks}); }

Affine sym_bmat(const std::vector<std::vector<Affine>>& lower) {
  const std::size_t n = lower.size();
  std::vector<std::vector<Affine>> full(n, std::vector<Affine>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i].size() != i + 1) {
      throw DimensionError("sym_bmat: row " + std::to_string(i) + " must list " +
                           std::to_string(i + 1) + " blocks");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      full[i][j] = lower[i][j];
      if (j != i) full[j][i] = lower[i][j].transpose();
    }
  }
  return bmat(full);
}

}  // namespace ddctl::lmi
