#include "ddctl/lmi/solver.h"

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ddctl/errors.h"

namespace ddctl::lmi {

namespace {

// Drops columns of G that are identically zero. Returns false if such a
// column carries nonzero cost (the problem is then unbounded or the
// objective is constant along it).
struct Reduced {
  ConicProblem problem;
  std::vector<int> keep;
  bool unbounded = false;
};

Reduced drop_free_columns(const ConicProblem& p) {
  Reduced r;
  const double gscale = std::max(1.0, p.G.cwiseAbs().maxCoeff());
  for (int j = 0; j < p.G.cols(); ++j) {
    if (p.G.col(j).cwiseAbs().maxCoeff() > 1e-14 * gscale) {
      r.keep.push_back(j);
    } else if (std::abs(p.c(j)) > 1e-14 * std::max(1.0, p.c.cwiseAbs().maxCoeff())) {
      r.unbounded = true;
    }
  }
  r.problem.dims = p.dims;
  r.problem.h = p.h;
  r.problem.G.resize(p.G.rows(), static_cast<int>(r.keep.size()));
  r.problem.c.resize(static_cast<int>(r.keep.size()));
  for (std::size_t k = 0; k < r.keep.size(); ++k) {
    r.problem.G.col(k) = p.G.col(r.keep[k]);
    r.problem.c(k) = p.c(r.keep[k]);
  }
  return r;
}

void fill_assignment(const LmiProblem& problem, LmiSolution& sol) {
  for (const auto& v : problem.variables()) sol.assignment[v.name] = v.expr.evaluate(sol.x);
}

// Affine map of the target variable over the reduced unknowns w:
// T(w) = T0 + sum_j w_j Tj.
struct TargetMap {
  MatrixXd T0;
  std::vector<MatrixXd> Tj;
  MatrixXd at(const VectorXd& w) const {
    MatrixXd t = T0;
    for (std::size_t j = 0; j < Tj.size(); ++j) t += w(j) * Tj[j];
    return t;
  }
};

struct Barrier {
  const ConicProblem& p;
  const TargetMap& target;
  int order;
  std::vector<int> offsets;

  Barrier(const ConicProblem& p, const TargetMap& t)
      : p(p), target(t), order(static_cast<int>(t.T0.rows())) {
    int off = p.dims.lp;
    for (int n : p.dims.psd) {
      offsets.push_back(off);
      off += svec_size(n);
    }
  }

  // Value of  -t logdet T(w) - log det barrier(h - Gw); +inf outside domain.
  double value(const VectorXd& w, double t) const {
    const VectorXd s = p.h - p.G * w;
    double f = 0.0;
    for (int i = 0; i < p.dims.lp; ++i) {
      if (!(s(i) > 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(s(i));
    }
    for (std::size_t k = 0; k < p.dims.psd.size(); ++k) {
      const int n = p.dims.psd[k];
      Eigen::LLT<MatrixXd> llt(smat(s.segment(offsets[k], svec_size(n)), n));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      f -= 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    Eigen::LLT<MatrixXd> lt(target.at(w));
    if (lt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    f -= t * 2.0 * lt.matrixLLT().diagonal().array().log().sum();
    return f;
  }

  // Gradient and Hessian at a domain point.
  void derivatives(const VectorXd& w, double t, VectorXd& g, MatrixXd& H) const {
    const int m = static_cast<int>(w.size());
    const VectorXd s = p.h - p.G * w;
    g = VectorXd::Zero(m);
    H = MatrixXd::Zero(m, m);
    for (int i = 0; i < p.dims.lp; ++i) {
      const Eigen::RowVectorXd a = p.G.row(i) / s(i);
      g += a.transpose();
      H.noalias() += a.transpose() * a;
    }
    auto add_block = [&](const MatrixXd& S, auto column, double weight, double sign) {
      const int n = static_cast<int>(S.rows());
      Eigen::LLT<MatrixXd> llt(S);
      const MatrixXd Linv = llt.matrixL().solve(MatrixXd::Identity(n, n));
      MatrixXd Q(svec_size(n), m);
      for (int j = 0; j < m; ++j) {
        const MatrixXd hat = Linv * column(j) * Linv.transpose();
        Q.col(j) = svec(hat);
        g(j) += sign * weight * hat.trace();
      }
      H.noalias() += weight * Q.transpose() * Q;
    };
    for (std::size_t k = 0; k < p.dims.psd.size(); ++k) {
      const int n = p.dims.psd[k];
      const int off = offsets[k];
      add_block(smat(s.segment(off, svec_size(n)), n),
                [&](int j) { return smat(p.G.col(j).segment(off, svec_size(n)), n); },
                1.0, 1.0);
    }
    add_block(target.at(w), [&](int j) { return target.Tj[j]; }, t, -1.0);
  }
};

double logdet(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Solves min c'w over {h - Gw in K, T(w) >= 0}.
ConicResult linear_minimization(const ConicProblem& p, const TargetMap& target,
                                const VectorXd& c, const ConicOptions& options) {
  const int n = static_cast<int>(target.T0.rows());
  const int m = static_cast<int>(p.G.cols());
  const int len = svec_size(n);
  ConicProblem q;
  q.dims = p.dims;
  q.dims.psd.push_back(n);
  q.c = c;
  q.G.resize(p.G.rows() + len, m);
  q.G.topRows(p.G.rows()) = p.G;
  for (int j = 0; j < m; ++j) q.G.col(j).tail(len) = -svec(target.Tj[j]);
  q.h.resize(p.h.size() + len);
  q.h.head(p.h.size()) = p.h;
  q.h.tail(len) = svec(target.T0);
  return solve_conic(q, options);
}

}  // namespace

const MatrixXd& LmiSolution::operator[](const std::string& name) const {
  auto it = assignment.find(name);
  if (it == assignment.end()) throw AssemblyError("no variable named '" + name + "'");
  return it->second;
}

LmiSolution solve(const LmiProblem& problem, const ConicOptions& options) {
  const ConicForm form = problem.assemble();
  LmiSolution sol;
  sol.x = form.x0;
  if (form.inconsistent_equalities) {
    sol.status = SolveStatus::kInfeasible;
    fill_assignment(problem, sol);
    return sol;
  }
  const Reduced red = drop_free_columns(form.conic);
  if (red.unbounded) {
    sol.status = SolveStatus::kUnbounded;
    fill_assignment(problem, sol);
    return sol;
  }
  VectorXd w = VectorXd::Zero(form.N.cols());
  if (red.keep.empty()) {
    // Nothing to optimize: feasibility of the constant constraints decides.
    const VectorXd& h = form.conic.h;
    const double margin = h.size() ? cone_margin(h, form.conic.dims) : 0.0;
    sol.status = margin >= -options.feastol * std::max(1.0, h.norm())
                     ? SolveStatus::kOptimal
                     : SolveStatus::kInfeasible;
  } else {
    const ConicResult r = solve_conic(red.problem, options);
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.residuals = {r.primal_residual, r.dual_residual, r.gap};
    if (r.status != SolveStatus::kInfeasible) {
      for (std::size_t k = 0; k < red.keep.size(); ++k) w(red.keep[k]) = r.x(k);
    }
  }
  sol.x = form.x0 + form.N * w;
  sol.objective_value = form.conic.c.dot(w) + form.objective_offset;
  fill_assignment(problem, sol);
  return sol;
}

LmiSolution maximize_logdet(const LmiProblem& problem, const std::string& target_name,
                            const ConicOptions& options) {
  const Variable& tv = problem.variable(target_name);
  if (tv.kind != VarKind::kSymmetric) {
    throw AssemblyError("maximize_logdet: target '" + target_name + "' must be symmetric");
  }
  const ConicForm form = problem.assemble();
  LmiSolution sol;
  sol.x = form.x0;
  auto finish = [&](SolveStatus status, const VectorXd& w) {
    sol.status = status;
    sol.x = form.x0 + form.N * w;
    fill_assignment(problem, sol);
    const double ld = logdet(sol.assignment.at(target_name));
    sol.objective_value = ld;
    return sol;
  };
  const int m = static_cast<int>(form.N.cols());
  if (form.inconsistent_equalities) return finish(SolveStatus::kInfeasible, VectorXd::Zero(m));

  const int n = tv.rows;
  TargetMap target;
  target.T0 = tv.expr.evaluate(form.x0);
  for (int j = 0; j < m; ++j) {
    MatrixXd Tj = MatrixXd::Zero(n, n);
    for (const auto& [k, c] : tv.expr.terms()) Tj += form.N(k, j) * c;
    target.Tj.push_back(Tj);
  }
  const ConicProblem& p = form.conic;
  const ConeDims& dims = p.dims;

  // Phase I: max sigma s.t. h - Gw - sigma e in K, T(w) >= sigma I, sigma <= 1.
  VectorXd w = VectorXd::Zero(m);
  {
    const int len = svec_size(n);
    ConicProblem q;
    q.dims.lp = dims.lp + 1;
    q.dims.psd = dims.psd;
    q.dims.psd.push_back(n);
    const int rows = q.dims.size();
    q.G = MatrixXd::Zero(rows, m + 1);
    q.h = VectorXd::Zero(rows);
    q.c = VectorXd::Zero(m + 1);
    q.c(m) = -1.0;
    q.G.topLeftCorner(dims.lp, m) = p.G.topRows(dims.lp);
    q.G.block(0, m, dims.lp, 1).setOnes();
    q.h.head(dims.lp) = p.h.head(dims.lp);
    q.G(dims.lp, m) = 1.0;
    q.h(dims.lp) = 1.0;
    const int psd_rows = p.G.rows() - dims.lp;
    q.G.block(dims.lp + 1, 0, psd_rows, m) = p.G.bottomRows(psd_rows);
    q.h.segment(dims.lp + 1, psd_rows) = p.h.tail(psd_rows);
    int off = dims.lp + 1;
    for (int k : dims.psd) {
      q.G.block(off, m, svec_size(k), 1) = svec(MatrixXd::Identity(k, k));
      off += svec_size(k);
    }
    for (int j = 0; j < m; ++j) q.G.block(off, j, len, 1) = -svec(target.Tj[j]);
    q.G.block(off, m, len, 1) = svec(MatrixXd::Identity(n, n));
    q.h.segment(off, len) = svec(target.T0);

    const Reduced red = drop_free_columns(q);
    const ConicResult r = solve_conic(red.problem, options);
    sol.iterations += r.iterations;
    if (r.status == SolveStatus::kInfeasible) return finish(SolveStatus::kInfeasible, w);
    VectorXd ws = VectorXd::Zero(m + 1);
    for (std::size_t k = 0; k < red.keep.size(); ++k) ws(red.keep[k]) = r.x(k);
    w = ws.head(m);
    const double sigma = ws(m);
    const bool interior =
        (dims.size() == 0 || in_cone_interior(p.h - p.G * w, dims)) &&
        Eigen::LLT<MatrixXd>(target.at(w)).info() == Eigen::Success;
    if (!(sigma > 1e-12) || !interior) return finish(SolveStatus::kInfeasible, w);
  }

  // Barrier path following.
  const Barrier barrier(p, target);
  const double theta = std::max(1, dims.degree());
  double t = 1.0;
  bool stalled = false;
  for (int outer = 0; outer < 60; ++outer) {
    int inner = 0;
    for (; inner < 200; ++inner) {
      VectorXd g;
      MatrixXd H;
      barrier.derivatives(w, t, g, H);
      // Jacobi-scaled Newton system.
      VectorXd dsc = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      MatrixXd Hs = dsc.asDiagonal() * H * dsc.asDiagonal();
      Hs.diagonal().array() += 1e-14;
      Eigen::LLT<MatrixXd> llt(Hs);
      const VectorXd dw = -dsc.cwiseProduct(llt.solve(dsc.cwiseProduct(g)));
      const double dec2 = -g.dot(dw);
      if (!(dec2 >= 0.0) || dec2 < 1e-10) break;
      const double f0 = barrier.value(w, t);
      double a = 1.0;
      while (a > 1e-6 && !(barrier.value(w + a * dw, t) <= f0 - 0.25 * a * dec2)) a *= 0.5;
      // No sufficient decrease this close to the center is roundoff.
      if (a <= 1e-6) break;
      w += a * dw;
      sol.iterations++;
    }
    if (inner == 200) stalled = true;
    if (theta / t < 1e-7 || stalled) break;
    t *= 8.0;
  }

  // Frank-Wolfe polish / certification.
  ConicOptions lmo_opts = options;
  for (int it = 0; it < 100; ++it) {
    const MatrixXd Tk = target.at(w);
    const MatrixXd Tinv = Tk.llt().solve(MatrixXd::Identity(n, n));
    VectorXd c(m);
    for (int j = 0; j < m; ++j) c(j) = -(Tinv.cwiseProduct(target.Tj[j])).sum();
    const ConicResult r = linear_minimization(p, target, c, lmo_opts);
    sol.iterations += r.iterations;
    if (r.status == SolveStatus::kUnbounded) return finish(SolveStatus::kUnbounded, w);
    if (r.status != SolveStatus::kOptimal) {
      // The barrier point is still certified by its central-path bound.
      sol.fw_gap = theta / t;
      return finish(stalled ? SolveStatus::kMaxIterations : SolveStatus::kOptimal, w);
    }
    const MatrixXd That = target.at(r.x);
    const double ratio = (Tinv.cwiseProduct(That)).sum();
    if (ratio > 1e8 * n) return finish(SolveStatus::kUnbounded, w);
    const double gap = ratio - n;
    sol.fw_gap = gap;
    sol.fw_vertex = That;
    if (gap < 1e-6) return finish(SolveStatus::kOptimal, w);

    // Exact line search on -log det(Tk + g (That - Tk)), g in [0, 1].
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(Tk);
    const MatrixXd isq = es.operatorInverseSqrt();
    const VectorXd mu =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(isq * (That - Tk) * isq,
                                                Eigen::EigenvaluesOnly)
            .eigenvalues();
    auto slope = [&](double gam) {
      double d = 0.0;
      for (int i = 0; i < mu.size(); ++i) d -= mu(i) / (1.0 + gam * mu(i));
      return d;
    };
    double gam = 1.0;
    if (!(slope(1.0) <= 0.0)) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 200 && hi - lo > 1e-16; ++k) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      gam = lo;
    }
    if (gam <= 0.0) break;
    w += gam * (r.x - w);
  }
  return finish(SolveStatus::kMaxIterations, w);
}

}  // namespace ddctl::lmi
