#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace ddctl::lmi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A matrix-valued affine function of the scalar decision variables of one
/// LmiProblem:  constant + sum_i x_i * coeff_i.
///
/// Products are only defined when one side is constant; multiplying two
/// variable expressions throws AssemblyError (the result would not be affine).
class Affine {
 public:
  Affine() = default;
  Affine(int rows, int cols);
  Affine(const MatrixXd& constant);  // NOLINT: constants promote implicitly.

  static Affine Zero(int rows, int cols) { return Affine(rows, cols); }
  static Affine Identity(int n) { return Affine(MatrixXd::Identity(n, n)); }
  /// Expression equal to the scalar variable with the given index.
  static Affine Scalar(std::uint64_t owner, int index);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  bool is_constant() const { return terms_.empty(); }
  /// Problem that owns the referenced variables (0 when constant).
  std::uint64_t owner() const { return owner_; }

  const MatrixXd& constant() const { return constant_; }
  const std::map<int, MatrixXd>& terms() const { return terms_; }

  Affine transpose() const;
  Affine block(int row, int col, int rows, int cols) const;
  /// Entry (i, j) as a 1x1 expression.
  Affine operator()(int i, int j) const { return block(i, j, 1, 1); }

  MatrixXd evaluate(const VectorXd& x) const;

  Affine& operator+=(const Affine& other);
  Affine& operator-=(const Affine& other);
  Affine& operator*=(double s);

  /// Adds coeff * x_index.
  void add_term(std::uint64_t owner, int index, const MatrixXd& coeff);

 private:
  void merge_owner(std::uint64_t other);

  MatrixXd constant_;
  std::map<int, MatrixXd> terms_;
  std::uint64_t owner_ = 0;
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(Affine a);
Affine operator*(double s, Affine a);
Affine operator*(Affine a, double s);
Affine left_multiply(const MatrixXd& m, const Affine& a);
Affine right_multiply(const Affine& a, const MatrixXd& m);

// Templates keep plain Eigen products from matching these overloads.
template <typename Derived>
Affine operator*(const Eigen::MatrixBase<Derived>& m, const Affine& a) {
  return left_multiply(m.eval(), a);
}
template <typename Derived>
Affine operator*(const Affine& a, const Eigen::MatrixBase<Derived>& m) {
  return right_multiply(a, m.eval());
}
/// Throws AssemblyError unless at least one side is constant.
Affine operator*(const Affine& a, const Affine& b);

/// Scalar expression (1x1) times a constant matrix.
Affine scale(const Affine& scalar, const MatrixXd& m);

/// H(X) = X + X^T.
Affine herm(const Affine& x);
Affine trace(const Affine& x);
/// Elementwise product with a constant mask.
Affine hadamard(const Affine& x, const MatrixXd& mask);
/// Stacks the listed entries into a column vector (row-major order of mask).
Affine masked_entries(const Affine& x, const Eigen::MatrixXi& mask);

/// Block matrix from rows of blocks; every block in a block-row must have the
/// same number of rows and every block-column the same number of columns.
Affine bmat(const std::vector<std::vector<Affine>>& blocks);
Affine vstack(const std::vector<Affine>& blocks);
Affine hstack(const std::vector<Affine>& blocks);

/// Symmetric block matrix from its lower triangle: row i lists blocks
/// (i,0)..(i,i); upper blocks are the transposes.
Affine sym_bmat(const std::vector<std::vector<Affine>>& lower);

}  // namespace ddctl::lmi
