#include "ddctl/synthesis.h"

#include <cmath>
#include <string>

#include "ddctl/errors.h"
#include "ddctl/lmi/solver.h"
#include "ddctl/matops.h"

namespace ddctl {

using lmi::Affine;
using lmi::LmiProblem;
using lmi::Sense;

const char* to_string(Objective objective) {
  switch (objective) {
    case Objective::kStabilize: return "stabilize";
    case Objective::kH2: return "h2";
    case Objective::kHinf: return "hinf";
  }
  return "?";
}

const char* to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kOk: return "ok";
    case OutcomeStatus::kInfeasible: return "infeasible";
    case OutcomeStatus::kNoConvergence: return "no-convergence";
  }
  return "?";
}

Objective parse_objective(const std::string& name) {
  if (name == "stabilize" || name == "stab") return Objective::kStabilize;
  if (name == "h2") return Objective::kH2;
  if (name == "hinf") return Objective::kHinf;
  throw InputError("unknown objective '" + name + "' (expected stabilize, h2 or hinf)");
}

void AlgoConfig::validate() const {
  if (!(mu > 1.0)) throw InputError("mu must be > 1");
  if (!(eps_T > 0.0)) throw InputError("eps_T must be > 0");
  if (!(beta0 > 0.0) || !(beta_cap >= beta0)) throw InputError("need beta_cap >= beta0 > 0");
  if (!(eta >= 0.0)) throw InputError("eta must be >= 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
}

namespace {

struct Ctx {
  Objective obj;
  MatrixXd delta, W;
  Channels ch;
  int nx, nu, nz;
};

Ctx make_ctx(Objective obj, const MatrixEllipsoid& ell, const Channels& ch) {
  Ctx c{obj, ell.delta, ell.AstarInvSqrt, ch, ell.nx(), ell.nu(), ell.nz()};
  if (c.W.rows() != c.nz || c.W.cols() != c.nz) {
    throw DimensionError("ellipsoid AstarInvSqrt has the wrong shape");
  }
  if (obj == Objective::kStabilize) return c;
  const int ny = static_cast<int>(ch.C.rows());
  const int nd = static_cast<int>(ch.G.cols());
  if (ch.C.cols() != c.nx || ch.D.rows() != ny || ch.D.cols() != c.nu ||
      ch.G.rows() != c.nx || ch.H.rows() != ny || ch.H.cols() != nd || ny < 1 || nd < 1) {
    throw DimensionError("channel matrices C, D, G, H do not match the plant dimensions");
  }
  if (obj == Objective::kH2 && ch.H.cwiseAbs().maxCoeff() != 0.0) {
    throw UnsupportedChannelError("H2 design requires H = 0 (the feedthrough makes the H2 norm infinite)");
  }
  return c;
}

int ny(const Ctx& c) { return static_cast<int>(c.ch.C.rows()); }
int nd(const Ctx& c) { return static_cast<int>(c.ch.G.cols()); }

Affine zero(int r, int c) { return Affine::Zero(r, c); }
Affine eye(int n) { return Affine::Identity(n); }

MatrixXd stack_IK(const MatrixXd& K) {
  MatrixXd s(K.cols() + K.rows(), K.cols());
  s << MatrixXd::Identity(K.cols(), K.cols()), K;
  return s;
}

// Linearization point of the iterative schemes.
struct Point {
  MatrixXd K, P;
  double lambda = 1.0;
  double gamma = 0.0;  // nu for H2, gamma for Hinf
};

Affine scalar_const(double v) { return Affine(MatrixXd::Constant(1, 1, v)); }

// Relaxed LMI (must be < 0) at linearization point `lin`.
Affine relaxed_lmi(const Ctx& c, const Affine& K, const Affine& P, const Affine& lam,
                   const Affine& gam, const Point& lin) {
  const Affine IK = lmi::vstack({eye(c.nx), K});
  const MatrixXd Mt = c.delta * lin.P - stack_IK(lin.K);
  const Affine Dl = c.delta * (P - Affine(lin.P)) -
                    lmi::vstack({zero(c.nx, c.nx), K - Affine(lin.K)});
  const Affine L = Affine(MatrixXd(Mt.transpose() * Mt)) + lmi::herm(Mt.transpose() * Dl);
  const Affine a = (1.0 / std::sqrt(2.0)) * (c.delta * P + IK);
  const Affine M = c.W * IK;
  if (c.obj == Objective::kStabilize) {
    return lmi::sym_bmat({{-0.5 * L},
                          {a, -eye(c.nz)},
                          {M, zero(c.nz, c.nz), -eye(c.nz)},
                          {P, zero(c.nx, c.nz), zero(c.nx, c.nz), -eye(c.nx)}});
  }
  // Rows of the lambda blocks are scaled by 1/sqrt(lt) and sqrt(lt) (a
  // congruence), which keeps the multiplier entries of order one.
  const double lt = lin.lambda;
  const double r = std::sqrt(lt);
  const Affine ratio = (1.0 / lt) * lam;
  const Affine CK = Affine(c.ch.C) + c.ch.D * K;
  const Affine lamI = lmi::scale(ratio, MatrixXd::Identity(c.nz, c.nz));
  const Affine LamI = lmi::scale(ratio - scalar_const(2.0), MatrixXd::Identity(c.nx, c.nx));
  const Affine Ms = (1.0 / r) * M;
  const Affine Ps = r * P;
  if (c.obj == Objective::kH2) {
    return lmi::sym_bmat({{-0.5 * L},
                          {a, -eye(c.nz)},
                          {Ms, zero(c.nz, c.nz), -lamI},
                          {Ps, zero(c.nx, c.nz), zero(c.nx, c.nz), LamI},
                          {CK, zero(ny(c), c.nz), zero(ny(c), c.nz), zero(ny(c), c.nx), -eye(ny(c))}});
  }
  const Affine gI_d = lmi::scale(gam, MatrixXd::Identity(nd(c), nd(c)));
  const Affine gI_y = lmi::scale(gam, MatrixXd::Identity(ny(c), ny(c)));
  return lmi::sym_bmat({{-0.5 * L},
                        {a, -eye(c.nz)},
                        {Ms, zero(c.nz, c.nz), -lamI},
                        {Ps, zero(c.nx, c.nz), zero(c.nx, c.nz), LamI},
                        {c.ch.G.transpose() * P, zero(nd(c), c.nz), zero(nd(c), c.nz), zero(nd(c), c.nx), -gI_d},
                        {CK, zero(ny(c), c.nz), zero(ny(c), c.nz), zero(ny(c), c.nx), Affine(c.ch.H), -gI_y}});
}

// Numeric relaxed LMI at its own linearization point.
MatrixXd relaxed_at(const Ctx& c, const Point& p) {
  return relaxed_lmi(c, Affine(p.K), Affine(p.P), scalar_const(p.lambda), scalar_const(p.gamma), p)
      .constant();
}

// Unstructured LMI in X = P^{-1}, Y = K X.
Affine unstructured_lmi(const Ctx& c, const Affine& X, const Affine& Y, const Affine& lam,
                        const Affine& gam) {
  const Affine XY = lmi::vstack({X, Y});
  const Affine WXY = c.W * XY;
  const Affine nom = lmi::herm(c.delta.transpose() * XY);
  if (c.obj == Objective::kStabilize) {
    return lmi::sym_bmat({{nom + eye(c.nx)}, {WXY, -eye(c.nz)}});
  }
  const Affine CXY = c.ch.C * X + c.ch.D * Y;
  const Affine lamI_x = lmi::scale(lam, MatrixXd::Identity(c.nx, c.nx));
  const Affine lamI_z = lmi::scale(lam, MatrixXd::Identity(c.nz, c.nz));
  if (c.obj == Objective::kH2) {
    return lmi::sym_bmat({{nom + lamI_x}, {WXY, -lamI_z}, {CXY, zero(ny(c), c.nz), -eye(ny(c))}});
  }
  return lmi::sym_bmat({{nom + lamI_x},
                        {WXY, -lamI_z},
                        {Affine(MatrixXd(c.ch.G.transpose())), zero(nd(c), c.nz),
                         lmi::scale(gam, MatrixXd::Identity(nd(c), nd(c)))* -1.0},
                        {CXY, zero(ny(c), c.nz), Affine(c.ch.H),
                         lmi::scale(gam, MatrixXd::Identity(ny(c), ny(c))) * -1.0}});
}

// Certificate LMI for a fixed gain in nu = hint / lambda (linear in P, nu).
// `hint` is an estimate of lambda; it only rescales rows.
Affine fixed_gain_lmi(const Ctx& c, const MatrixXd& K, const Affine& P, const Affine& nu,
                      const Affine& gam, double hint) {
  const MatrixXd IK = stack_IK(K);
  const MatrixXd AK = c.delta.transpose() * IK;
  const MatrixXd M = c.W * IK;
  const Affine nom = lmi::herm(P * AK);
  if (c.obj == Objective::kStabilize) {
    return lmi::sym_bmat({{nom + Affine(MatrixXd(M.transpose() * M))}, {P, -eye(c.nx)}});
  }
  const MatrixXd MtM = M.transpose() * M / hint;
  const Affine Ps = std::sqrt(hint) * P;
  const MatrixXd CK = c.ch.C + c.ch.D * K;
  const Affine nuI = lmi::scale(nu, MatrixXd::Identity(c.nx, c.nx));
  const Affine top = nom + lmi::scale(nu, MtM);
  if (c.obj == Objective::kH2) {
    return lmi::sym_bmat({{top}, {Ps, -nuI}, {Affine(CK), zero(ny(c), c.nx), -eye(ny(c))}});
  }
  return lmi::sym_bmat({{top},
                        {Ps, -nuI},
                        {c.ch.G.transpose() * P, zero(nd(c), c.nx),
                         -1.0 * lmi::scale(gam, MatrixXd::Identity(nd(c), nd(c)))},
                        {Affine(CK), zero(ny(c), c.nx), Affine(c.ch.H),
                         -1.0 * lmi::scale(gam, MatrixXd::Identity(ny(c), ny(c)))}});
}

double max_eig_of(const MatrixXd& m) { return max_eig(0.5 * (m + m.transpose())); }

double robust_eig(const Ctx& c, const MatrixXd& K, const MatrixXd& P, double lambda,
                  double gamma) {
  const MatrixXd IK = stack_IK(K);
  const MatrixXd AK = c.delta.transpose() * IK;
  const MatrixXd M = c.W * IK;
  const MatrixXd core = herm(P * AK);
  if (c.obj == Objective::kStabilize) {
    return max_eig_of(core + P * P + M.transpose() * M);
  }
  const MatrixXd CK = c.ch.C + c.ch.D * K;
  const MatrixXd E = core + lambda * P * P + (M.transpose() * M) / lambda;
  if (c.obj == Objective::kH2) return max_eig_of(E + CK.transpose() * CK);
  const int n = c.nx, d = nd(c), y = ny(c);
  MatrixXd big = MatrixXd::Zero(n + d + y, n + d + y);
  big.topLeftCorner(n, n) = E;
  big.block(0, n, n, d) = P * c.ch.G;
  big.block(n, 0, d, n) = c.ch.G.transpose() * P;
  big.block(0, n + d, n, y) = CK.transpose();
  big.block(n + d, 0, y, n) = CK;
  big.block(n, n + d, d, y) = c.ch.H.transpose();
  big.block(n + d, n, y, d) = c.ch.H;
  big.block(n, n, d, d) = -gamma * MatrixXd::Identity(d, d);
  big.block(n + d, n + d, y, y) = -gamma * MatrixXd::Identity(y, y);
  return max_eig_of(big);
}

double h2_bound(const Ctx& c, const MatrixXd& P) {
  return std::sqrt(std::max(0.0, (c.ch.G.transpose() * P * c.ch.G).trace()));
}

SynthesisOutcome unstructured(const Ctx& c, const AlgoConfig& cfg, const MatrixXi* xdiag_pattern) {
  cfg.validate();
  SynthesisOutcome out;
  out.objective = c.obj;
  LmiProblem p;
  p.set_eta(cfg.eta);
  Affine X, Y;
  if (xdiag_pattern == nullptr) {
    X = p.symmetric("X", c.nx);
    Y = p.matrix("Y", c.nu, c.nx);
  } else {
    X = Affine::Zero(c.nx, c.nx);
    for (int i = 0; i < c.nx; ++i) {
      MatrixXd e = MatrixXd::Zero(c.nx, c.nx);
      e(i, i) = 1.0;
      X += lmi::scale(p.scalar("x" + std::to_string(i)), e);
    }
    Y = Affine::Zero(c.nu, c.nx);
    for (int i = 0; i < c.nu; ++i) {
      for (int j = 0; j < c.nx; ++j) {
        if ((*xdiag_pattern)(i, j) == 0) continue;
        MatrixXd e = MatrixXd::Zero(c.nu, c.nx);
        e(i, j) = 1.0;
        Y += lmi::scale(p.scalar("y" + std::to_string(i) + "_" + std::to_string(j)), e);
      }
    }
  }
  Affine lam, gam;
  if (c.obj != Objective::kStabilize) {
    lam = p.scalar("lambda");
    gam = p.scalar("gamma");
  }
  const Affine main = unstructured_lmi(c, X, Y, lam, gam);
  p.constrain(main, Sense::kStrictNeg, "robust");
  p.constrain(X, Sense::kStrictPos, "X>0");
  if (c.obj == Objective::kH2) {
    const Affine Z = p.symmetric("Z", nd(c));
    p.constrain(lmi::sym_bmat({{Z}, {Affine(c.ch.G), X}}), Sense::kPosSemidef, "Z>=G'PG");
    p.constrain(gam - lmi::trace(Z), Sense::kPosSemidef, "trZ<=nu");
  }
  if (c.obj != Objective::kStabilize) p.minimize(gam);

  const lmi::LmiSolution sol = lmi::solve(p);
  out.iterations = sol.iterations;
  if (sol.status == lmi::SolveStatus::kInfeasible) {
    out.status = OutcomeStatus::kInfeasible;
    out.message = "no robust controller exists for this uncertainty set at margin eta";
    return out;
  }
  if (sol.status != lmi::SolveStatus::kOptimal) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = std::string("SDP solver stopped: ") + lmi::to_string(sol.status);
    return out;
  }
  const MatrixXd Xv = sol.value(X), Yv = sol.value(Y);
  out.P = SymMatrix(Xv.llt().solve(MatrixXd::Identity(c.nx, c.nx))).entries();
  out.K = Yv * out.P;
  double lambda = 1.0, gamma = 0.0;
  if (c.obj != Objective::kStabilize) {
    lambda = sol.value(lam)(0, 0);
    gamma = sol.value(gam)(0, 0);
    out.lambda = lambda;
    out.gamma = c.obj == Objective::kH2 ? h2_bound(c, out.P) : gamma;
  }
  const double solved = max_eig_of(sol.value(main));
  const double reig = robust_eig(c, out.K, out.P, lambda, gamma);
  if (solved > -0.5 * cfg.eta || !(reig < 0.0) || min_eig(Xv) <= 0.0) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = "solver returned a point that fails the eigencheck";
    return out;
  }
  out.status = OutcomeStatus::kOk;
  out.trace.push_back({0, sol.objective_value, 0.0, out.gamma.value_or(0.0), lambda, 0.0,
                       0.0, 0.0, reig});
  return out;
}

SynthesisOutcome fixed_gain(const Ctx& c, const MatrixXd& K, const AlgoConfig& cfg,
                            double hint) {
  SynthesisOutcome out;
  out.objective = c.obj;
  out.K = K;
  LmiProblem p;
  p.set_eta(cfg.eta);
  const Affine P = p.symmetric("P", c.nx);
  Affine nu, gam;
  if (c.obj != Objective::kStabilize) nu = p.scalar("nu");
  if (c.obj == Objective::kHinf) gam = p.scalar("gamma");
  const Affine main = fixed_gain_lmi(c, K, P, nu, gam, hint);
  p.constrain(main, Sense::kStrictNeg, "robust");
  p.constrain(P, Sense::kStrictPos, "P>0");
  if (c.obj == Objective::kH2) p.minimize(lmi::trace(c.ch.G.transpose() * P * c.ch.G));
  if (c.obj == Objective::kHinf) p.minimize(gam);
  const lmi::LmiSolution sol = lmi::solve(p);
  out.iterations = sol.iterations;
  if (sol.status == lmi::SolveStatus::kInfeasible) {
    out.status = OutcomeStatus::kInfeasible;
    out.message = "gain admits no robust certificate";
    return out;
  }
  if (sol.status != lmi::SolveStatus::kOptimal) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = std::string("certificate SDP stopped: ") + lmi::to_string(sol.status);
    return out;
  }
  out.P = SymMatrix(sol.value(P)).entries();
  double lambda = 1.0, gamma = 0.0;
  if (c.obj != Objective::kStabilize) {
    lambda = hint / sol.value(nu)(0, 0);
    out.lambda = lambda;
  }
  if (c.obj == Objective::kH2) gamma = h2_bound(c, out.P);
  if (c.obj == Objective::kHinf) gamma = sol.value(gam)(0, 0);
  if (c.obj != Objective::kStabilize) out.gamma = gamma;
  const double solved = max_eig_of(sol.value(main));
  const double reig = robust_eig(c, K, out.P, lambda, gamma);
  if (solved > -0.5 * cfg.eta || !(reig < 0.0) || min_eig(out.P) <= 0.0 ||
      (c.obj != Objective::kStabilize && !(lambda > 0.0))) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = "certificate fails the eigencheck";
    return out;
  }
  out.status = OutcomeStatus::kOk;
  return out;
}

double margin_of(const Ctx& c, const Point& pt) {
  double m = -max_eig_of(relaxed_at(c, pt));
  m = std::min(m, min_eig(pt.P));
  return m;
}

SynthesisOutcome structured(const Ctx& c, const SparsityPattern& pat, const AlgoConfig& cfg) {
  cfg.validate();
  if (pat.rows() != c.nu || pat.cols() != c.nx) {
    throw DimensionError("sparsity pattern must be " + std::to_string(c.nu) + "x" +
                         std::to_string(c.nx));
  }
  SynthesisOutcome init = unstructured(c, cfg, nullptr);
  if (!init.ok()) return init;

  const MatrixXd Sc = pat.complement_real();
  const Eigen::MatrixXi ScI = pat.complement();
  const bool has_offpattern = ScI.sum() > 0;

  SynthesisOutcome out;
  out.objective = c.obj;
  out.iterations = 0;
  Point cur{init.K, init.P, init.lambda.value_or(1.0), 0.0};
  if (c.obj == Objective::kH2) cur.gamma = std::pow(init.gamma.value_or(0.0), 2);
  if (c.obj == Objective::kHinf) cur.gamma = init.gamma.value_or(0.0);
  const auto residual = [&](const MatrixXd& K) { return K.cwiseProduct(Sc).norm(); };
  const auto gamma_of = [&](const Point& pt) {
    return c.obj == Objective::kH2 ? std::sqrt(std::max(0.0, pt.gamma)) : pt.gamma;
  };
  out.trace.push_back({0, init.trace.empty() ? 0.0 : init.trace[0].objective, residual(cur.K),
                       gamma_of(cur), cur.lambda, 0.0, 0.0, 0.0,
                       robust_eig(c, cur.K, cur.P, cur.lambda, gamma_of(cur))});

  // Already in pattern: nothing to iterate on.
  if (!has_offpattern || residual(cur.K) == 0.0) {
    out.status = OutcomeStatus::kOk;
    out.K = pat.project(cur.K);
    out.P = cur.P;
    out.lambda = init.lambda;
    out.gamma = init.gamma;
    out.gamma_unprojected = init.gamma;
    return out;
  }

  double margin = margin_of(c, cur);
  if (margin < 0.1 * cfg.eta) {
    cur.P *= 1.0 + 1e-6;
    margin = margin_of(c, cur);
  }
  if (!(margin > 0.0)) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = "solver accuracy fault: unstructured start is not feasible for the relaxed problem";
    out.K = cur.K;
    out.P = cur.P;
    return out;
  }

  double beta = cfg.beta0;
  bool converged = false;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    LmiProblem p;
    p.set_eta(std::min(cfg.eta, margin));
    const Affine K = p.matrix("K", c.nu, c.nx);
    const Affine P = p.symmetric("P", c.nx);
    Affine lam, gam;
    if (c.obj != Objective::kStabilize) lam = p.scalar("lambda");
    if (c.obj != Objective::kStabilize) gam = p.scalar("gamma");
    const Affine t = p.scalar("t");
    const Affine v = lmi::masked_entries(K, ScI);
    p.constrain(lmi::sym_bmat({{t}, {v, eye(v.rows())}}), Sense::kPosSemidef, "epigraph");
    p.constrain(relaxed_lmi(c, K, P, lam, gam, cur), Sense::kStrictNeg, "relaxed");
    p.constrain(P, Sense::kStrictPos, "P>0");
    if (c.obj == Objective::kH2) {
      const Affine Z = p.symmetric("Z", nd(c));
      p.constrain(Z - c.ch.G.transpose() * P * c.ch.G, Sense::kPosSemidef, "Z>=G'PG");
      p.constrain(gam - lmi::trace(Z), Sense::kPosSemidef, "trZ<=nu");
    }
    if (c.obj == Objective::kStabilize) {
      p.minimize(t);
    } else {
      p.minimize(gam + beta * t);
    }
    const lmi::LmiSolution sol = lmi::solve(p);
    out.iterations = k;
    if (sol.status != lmi::SolveStatus::kOptimal) {
      out.status = OutcomeStatus::kNoConvergence;
      out.message = "solver accuracy fault at iteration " + std::to_string(k) + ": relaxed SDP " +
                    lmi::to_string(sol.status) + " after a feasible start";
      out.K = cur.K;
      out.P = cur.P;
      return out;
    }
    Point next;
    next.K = sol.value(K);
    next.P = SymMatrix(sol.value(P)).entries();
    if (c.obj != Objective::kStabilize) {
      next.lambda = sol.value(lam)(0, 0);
      next.gamma = sol.value(gam)(0, 0);
    }
    IterationRecord rec;
    rec.iteration = k;
    rec.objective = sol.objective_value;
    rec.residual = residual(next.K);
    rec.gamma = gamma_of(next);
    rec.lambda = next.lambda;
    rec.beta = beta;
    rec.dK = (next.K - cur.K).norm();
    rec.dP = (next.P - cur.P).norm();
    rec.robust_max_eig = robust_eig(c, next.K, next.P, next.lambda, gamma_of(next));
    out.trace.push_back(rec);
    cur = next;
    margin = margin_of(c, cur);
    if (!(margin > 0.0)) {
      out.status = OutcomeStatus::kNoConvergence;
      out.message = "solver accuracy fault at iteration " + std::to_string(k) +
                    ": iterate is not feasible for the next relaxed problem";
      out.K = cur.K;
      out.P = cur.P;
      return out;
    }
    if (c.obj != Objective::kStabilize && beta < cfg.beta_cap) beta = std::min(beta * cfg.mu, cfg.beta_cap);

    const bool stop = c.obj == Objective::kStabilize
                          ? rec.residual < cfg.eps_T
                          : (rec.dP < cfg.eps_T && rec.dK < cfg.eps_T);
    if (!stop) continue;
    if (c.obj != Objective::kStabilize) out.gamma_unprojected = gamma_of(cur);
    const SynthesisOutcome cert = fixed_gain(c, pat.project(cur.K), cfg, cur.lambda);
    if (cert.ok()) {
      converged = true;
      out.K = cert.K;
      out.P = cert.P;
      out.lambda = cert.lambda;
      out.gamma = cert.gamma;
      break;
    }
    if (c.obj != Objective::kStabilize) beta = std::min(2.0 * beta, cfg.beta_cap);
  }
  if (!converged) {
    out.status = OutcomeStatus::kNoConvergence;
    out.message = "stopping rule not met within " + std::to_string(cfg.max_iter) + " iterations";
    out.K = cur.K;
    out.P = cur.P;
    if (c.obj != Objective::kStabilize) {
      out.lambda = cur.lambda;
      out.gamma_unprojected = gamma_of(cur);
    }
    return out;
  }
  out.status = OutcomeStatus::kOk;
  return out;
}

}  // namespace

SynthesisOutcome stabilize_unstructured(const MatrixEllipsoid& ell, const AlgoConfig& cfg) {
  return unstructured(make_ctx(Objective::kStabilize, ell, {}), cfg, nullptr);
}

SynthesisOutcome h2_unstructured(const MatrixEllipsoid& ell, const Channels& ch,
                                 const AlgoConfig& cfg) {
  return unstructured(make_ctx(Objective::kH2, ell, ch), cfg, nullptr);
}

SynthesisOutcome hinf_unstructured(const MatrixEllipsoid& ell, const Channels& ch,
                                   const AlgoConfig& cfg) {
  return unstructured(make_ctx(Objective::kHinf, ell, ch), cfg, nullptr);
}

SynthesisOutcome stabilize_structured(const MatrixEllipsoid& ell, const SparsityPattern& pat,
                                      const AlgoConfig& cfg) {
  return structured(make_ctx(Objective::kStabilize, ell, {}), pat, cfg);
}

SynthesisOutcome h2_structured(const MatrixEllipsoid& ell, const Channels& ch,
                               const SparsityPattern& pat, const AlgoConfig& cfg) {
  return structured(make_ctx(Objective::kH2, ell, ch), pat, cfg);
}

SynthesisOutcome hinf_structured(const MatrixEllipsoid& ell, const Channels& ch,
                                 const SparsityPattern& pat, const AlgoConfig& cfg) {
  return structured(make_ctx(Objective::kHinf, ell, ch), pat, cfg);
}

SynthesisOutcome baseline_xdiag(const MatrixEllipsoid& ell, const SparsityPattern& pat,
                                Objective objective, const Channels& ch,
                                const AlgoConfig& cfg) {
  const Ctx c = make_ctx(objective, ell, ch);
  if (pat.rows() != c.nu || pat.cols() != c.nx) {
    throw DimensionError("sparsity pattern does not match the plant");
  }
  SynthesisOutcome out = unstructured(c, cfg, &pat.mask());
  if (out.ok()) out.K = pat.project(out.K);  // exact zeros; X is diagonal
  return out;
}

SynthesisOutcome synthesize(const MatrixEllipsoid& ell, Objective objective,
                            const Channels& ch, const SparsityPattern& pat,
                            const AlgoConfig& cfg) {
  switch (objective) {
    case Objective::kStabilize: return stabilize_structured(ell, pat, cfg);
    case Objective::kH2: return h2_structured(ell, ch, pat, cfg);
    case Objective::kHinf: return hinf_structured(ell, ch, pat, cfg);
  }
  throw InputError("unknown objective");
}

MatrixXd linearize_bilinear(const MatrixXd& K, const MatrixXd& P, const MatrixXd& Kt,
                            const MatrixXd& Pt, const MatrixEllipsoid& ell) {
  const int nx = ell.nx();
  if (K.rows() != ell.nu() || K.cols() != nx || Kt.rows() != K.rows() || Kt.cols() != nx ||
      P.rows() != nx || P.cols() != nx || Pt.rows() != nx || Pt.cols() != nx) {
    throw DimensionError("linearize_bilinear: shapes do not match the ellipsoid");
  }
  const MatrixXd Mt = ell.delta * Pt - stack_IK(Kt);
  MatrixXd dK(ell.nz(), nx);
  dK << MatrixXd::Zero(nx, nx), K - Kt;
  const MatrixXd D = ell.delta * (P - Pt) - dK;
  return Mt.transpose() * Mt + herm(Mt.transpose() * D);
}

double robust_max_eig(Objective objective, const MatrixEllipsoid& ell, const Channels& ch,
                      const MatrixXd& K, const MatrixXd& P, double lambda, double gamma) {
  return robust_eig(make_ctx(objective, ell, ch), K, P, lambda, gamma);
}

SynthesisOutcome certify_fixed_gain(Objective objective, const MatrixEllipsoid& ell,
                                    const Channels& ch, const MatrixXd& K,
                                    const AlgoConfig& cfg, double lambda_hint) {
  if (!(lambda_hint > 0.0)) throw InputError("lambda_hint must be > 0");
  cfg.validate();
  return fixed_gain(make_ctx(objective, ell, ch), K, cfg, lambda_hint);
}

}  // namespace ddctl
