#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddctl/lmi/affine.h"
#include "ddctl/lmi/conic_solver.h"

namespace ddctl::lmi {

enum class VarKind { kSymmetric, kMatrix, kScalar, kNonneg };

/// kStrictNeg:  expr <= -eta I     kStrictPos:  expr >= eta I
/// kNegSemidef: expr <= 0          kPosSemidef: expr >= 0
/// kZero:       expr == 0
enum class Sense { kStrictNeg, kNegSemidef, kPosSemidef, kStrictPos, kZero };

struct Variable {
  std::string name;
  VarKind kind;
  int rows = 0, cols = 0;
  int offset = 0;  // first scalar index
  int count = 0;   // number of scalar unknowns
  Affine expr;
};

struct Constraint {
  Affine expr;
  Sense sense;
  std::string label;
};

/// Standard conic form of an LmiProblem: the original scalar vector is
/// x = x0 + N w and the conic problem is posed over w.
struct ConicForm {
  ConicProblem conic;
  VectorXd x0;
  MatrixXd N;
  double objective_offset = 0.0;
  /// Equality constraints admit no solution.
  bool inconsistent_equalities = false;
  /// For every inequality constraint (in declaration order, nonneg variable
  /// bounds first): cone kind (true = PSD block) and index into that part.
  struct Slot {
    std::string label;
    bool psd;
    int index;
  };
  std::vector<Slot> slots;
};

class LmiProblem {
 public:
  LmiProblem();

  Affine symmetric(const std::string& name, int order);
  Affine matrix(const std::string& name, int rows, int cols);
  Affine scalar(const std::string& name);
  Affine nonneg(const std::string& name);

  void constrain(const Affine& expr, Sense sense, const std::string& label = "");
  void minimize(const Affine& objective);

  void set_eta(double eta);
  double eta() const { return eta_; }

  std::uint64_t id() const { return id_; }
  int num_scalars() const { return num_scalars_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool has_objective() const { return has_objective_; }
  const Affine& objective() const { return objective_; }
  const Variable& variable(const std::string& name) const;

  /// Compiles to conic form; throws AssemblyError on malformed problems.
  ConicForm assemble() const;

  /// Plain-text listing of the variable table and each constraint's dense
  /// coefficient matrices.
  std::string dump() const;

 private:
  Affine declare(const std::string& name, VarKind kind, int rows, int cols);
  void check_expr(const Affine& expr, const char* what) const;

  std::uint64_t id_;
  int num_scalars_ = 0;
  double eta_ = 1e-6;
  std::vector<Variable> vars_;
  std::map<std::string, int> by_name_;
  std::vector<Constraint> constraints_;
  Affine objective_;
  bool has_objective_ = false;
};

}  // namespace ddctl::lmi
