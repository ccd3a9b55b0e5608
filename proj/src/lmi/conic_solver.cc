#include "ddctl/lmi/conic_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ddctl/errors.h"

namespace ddctl::lmi {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// NT scaling point. For LP coordinates W = diag(d); for a PSD block
// W z = R' Z R and W^{-T} s = R^{-1} S R^{-T}, both equal to diag(lambda).
struct Scaling {
  VectorXd d;
  std::vector<MatrixXd> R, Rinv;
  VectorXd lambda;  // lp part followed by block eigenvalues, length degree()
};

struct Layout {
  explicit Layout(const ConeDims& dims) : dims(dims) {
    int off = dims.lp;
    int lam = dims.lp;
    for (int n : dims.psd) {
      offset.push_back(off);
      lam_offset.push_back(lam);
      off += svec_size(n);
      lam += n;
    }
  }
  const ConeDims& dims;
  std::vector<int> offset;
  std::vector<int> lam_offset;
};

MatrixXd block_mat(const VectorXd& v, const Layout& L, std::size_t k) {
  const int n = L.dims.psd[k];
  return smat(v.segment(L.offset[k], svec_size(n)), n);
}

void set_block(VectorXd& v, const Layout& L, std::size_t k, const MatrixXd& m) {
  v.segment(L.offset[k], svec_size(L.dims.psd[k])) = svec(m);
}

// Identity element of the cone.
VectorXd identity(const Layout& L) {
  VectorXd e = VectorXd::Zero(L.dims.size());
  e.head(L.dims.lp).setOnes();
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    set_block(e, L, k, MatrixXd::Identity(L.dims.psd[k], L.dims.psd[k]));
  }
  return e;
}

// Largest t with v - t e in the cone (minimum "eigenvalue" of v).
double min_eig(const VectorXd& v, const Layout& L) {
  double m = std::numeric_limits<double>::infinity();
  if (L.dims.lp > 0) m = v.head(L.dims.lp).minCoeff();
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(block_mat(v, L, k),
                                               Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

bool compute_scaling(const VectorXd& s, const VectorXd& z, const Layout& L,
                     Scaling& w) {
  const int lp = L.dims.lp;
  w.lambda.resize(L.dims.degree());
  w.d.resize(lp);
  for (int i = 0; i < lp; ++i) {
    if (!(s(i) > 0.0) || !(z(i) > 0.0)) return false;
    w.d(i) = std::sqrt(s(i) / z(i));
    w.lambda(i) = std::sqrt(s(i) * z(i));
  }
  w.R.clear();
  w.Rinv.clear();
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    Eigen::LLT<MatrixXd> ls(block_mat(s, L, k));
    Eigen::LLT<MatrixXd> lz(block_mat(z, L, k));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const MatrixXd Ls = ls.matrixL();
    const MatrixXd Lz = lz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd sig = svd.singularValues();
    if (!(sig.minCoeff() > 0.0)) return false;
    const VectorXd isq = sig.array().rsqrt();
    w.R.push_back(Ls * svd.matrixV() * isq.asDiagonal());
    w.Rinv.push_back(isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose());
    w.lambda.segment(L.lam_offset[k], sig.size()) = sig;
  }
  return true;
}

// W^{-T} v for an s-type vector.
VectorXd scale_s(const VectorXd& v, const Layout& L, const Scaling& w) {
  VectorXd out(v.size());
  out.head(L.dims.lp) = v.head(L.dims.lp).cwiseQuotient(w.d);
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    set_block(out, L, k, w.Rinv[k] * block_mat(v, L, k) * w.Rinv[k].transpose());
  }
  return out;
}

// W^{-1} v, mapping a scaled z-type vector back.
VectorXd unscale_z(const VectorXd& v, const Layout& L, const Scaling& w) {
  VectorXd out(v.size());
  out.head(L.dims.lp) = v.head(L.dims.lp).cwiseQuotient(w.d);
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    set_block(out, L, k, w.Rinv[k].transpose() * block_mat(v, L, k) * w.Rinv[k]);
  }
  return out;
}

// W' v, mapping a scaled s-type vector back.
VectorXd unscale_s(const VectorXd& v, const Layout& L, const Scaling& w) {
  VectorXd out(v.size());
  out.head(L.dims.lp) = v.head(L.dims.lp).cwiseProduct(w.d);
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    set_block(out, L, k, w.R[k] * block_mat(v, L, k) * w.R[k].transpose());
  }
  return out;
}

// Applies f(lambda_i, lambda_j) entrywise in the eigenbasis of the scaling
// point; lambda o v uses (li+lj)/2, its inverse 2/(li+lj).
template <typename F>
VectorXd lambda_op(const VectorXd& v, const Layout& L, const Scaling& w, F f) {
  VectorXd out(v.size());
  for (int i = 0; i < L.dims.lp; ++i) out(i) = f(w.lambda(i), w.lambda(i)) * v(i);
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    const int n = L.dims.psd[k];
    const int lo = L.lam_offset[k];
    int idx = L.offset[k];
    for (int j = 0; j < n; ++j) {
      for (int i = j; i < n; ++i, ++idx) {
        out(idx) = f(w.lambda(lo + i), w.lambda(lo + j)) * v(idx);
      }
    }
  }
  return out;
}

VectorXd lambda_sq(const Layout& L, const Scaling& w) {
  VectorXd out = VectorXd::Zero(L.dims.size());
  for (int i = 0; i < L.dims.lp; ++i) out(i) = w.lambda(i) * w.lambda(i);
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    const int n = L.dims.psd[k];
    const VectorXd l = w.lambda.segment(L.lam_offset[k], n);
    set_block(out, L, k, MatrixXd(l.array().square().matrix().asDiagonal()));
  }
  return out;
}

// Symmetrized Jordan product a o b.
VectorXd jordan(const VectorXd& a, const VectorXd& b, const Layout& L) {
  VectorXd out(a.size());
  out.head(L.dims.lp) = a.head(L.dims.lp).cwiseProduct(b.head(L.dims.lp));
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    const MatrixXd A = block_mat(a, L, k), B = block_mat(b, L, k);
    set_block(out, L, k, 0.5 * (A * B + B * A));
  }
  return out;
}

// Largest step t such that lambda + t v stays in the cone; +inf if unbounded.
double max_step(const VectorXd& v, const Layout& L, const Scaling& w) {
  double worst = 0.0;
  for (int i = 0; i < L.dims.lp; ++i) worst = std::max(worst, -v(i) / w.lambda(i));
  for (std::size_t k = 0; k < L.dims.psd.size(); ++k) {
    const int n = L.dims.psd[k];
    const VectorXd isq = w.lambda.segment(L.lam_offset[k], n).array().rsqrt();
    const MatrixXd m = isq.asDiagonal() * block_mat(v, L, k) * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(-m, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues()(n - 1));
  }
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

int ConeDims::size() const {
  int n = lp;
  for (int k : psd) n += svec_size(k);
  return n;
}

int ConeDims::degree() const {
  int n = lp;
  for (int k : psd) n += k;
  return n;
}

int svec_size(int order) { return order * (order + 1) / 2; }

VectorXd svec(const MatrixXd& sym) {
  const int n = static_cast<int>(sym.rows());
  VectorXd v(svec_size(n));
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    v(idx++) = sym(j, j);
    for (int i = j + 1; i < n; ++i) v(idx++) = kSqrt2 * 0.5 * (sym(i, j) + sym(j, i));
  }
  return v;
}

MatrixXd smat(const Eigen::Ref<const VectorXd>& v, int order) {
  MatrixXd m(order, order);
  int idx = 0;
  for (int j = 0; j < order; ++j) {
    m(j, j) = v(idx++);
    for (int i = j + 1; i < order; ++i) m(i, j) = m(j, i) = v(idx++) / kSqrt2;
  }
  return m;
}

bool in_cone_interior(const VectorXd& v, const ConeDims& dims) {
  const Layout L(dims);
  for (int i = 0; i < dims.lp; ++i) {
    if (!(v(i) > 0.0)) return false;
  }
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    Eigen::LLT<MatrixXd> llt(block_mat(v, L, k));
    if (llt.info() != Eigen::Success) return false;
  }
  return true;
}

double cone_margin(const VectorXd& v, const ConeDims& dims) {
  return min_eig(v, Layout(dims));
}

namespace {

ConicResult solve_scaled(const ConicProblem& P, const ConicOptions& opt) {
  const int m = static_cast<int>(P.G.cols());
  const int N = static_cast<int>(P.G.rows());
  if (N != P.dims.size() || P.h.size() != N || P.c.size() != m) {
    throw DimensionError("solve_conic: inconsistent problem dimensions");
  }
  const Layout L(P.dims);
  const VectorXd e = identity(L);
  const double deg = P.dims.degree();
  const double resx0 = std::max(1.0, P.c.norm());
  const double resz0 = std::max(1.0, P.h.norm());

  ConicResult res;

  // Factorizes G~'G~ with a small diagonal shift if it is singular.
  auto factor = [m](const MatrixXd& Gt) {
    MatrixXd M = Gt.transpose() * Gt;
    const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    Eigen::LLT<MatrixXd> llt(M);
    double reg = 1e-14 * scale;
    while (llt.info() != Eigen::Success && reg < 1e-2 * scale) {
      llt.compute(M + reg * MatrixXd::Identity(m, m));
      reg *= 100.0;
    }
    return llt;
  };

  // Starting point: least-squares primal and minimum-norm dual, shifted
  // into the cone interior.
  VectorXd x, s, z;
  {
    Eigen::LLT<MatrixXd> llt = factor(P.G);
    x = llt.solve(P.G.transpose() * P.h);
    s = P.h - P.G * x;
    z = -P.G * llt.solve(P.c);
    const double ts = -min_eig(s, L);
    if (ts >= -1e-8 * std::max(s.norm(), 1.0)) s += (1.0 + ts) * e;
    const double tz = -min_eig(z, L);
    if (tz >= -1e-8 * std::max(z.norm(), 1.0)) z += (1.0 + tz) * e;
  }
  double tau = 1.0, kappa = 1.0;

  Scaling w;
  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    res.iterations = iter;
    const VectorXd rx = P.G.transpose() * z + P.c * tau;
    const VectorXd rz = P.G * x + s - P.h * tau;
    const double cx = P.c.dot(x), hz = P.h.dot(z);
    const double rt = kappa + cx + hz;

    const double pcost = cx / tau, dcost = -hz / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double pres = rz.norm() / tau / resz0;
    const double dres = rx.norm() / tau / resx0;
    res.primal_objective = pcost;
    res.dual_objective = dcost;
    res.primal_residual = pres;
    res.dual_residual = dres;
    res.gap = gap;

    if (pres <= opt.feastol && dres <= opt.feastol &&
        gap <= opt.gaptol * (1.0 + std::abs(pcost))) {
      res.status = SolveStatus::kOptimal;
      res.x = x / tau;
      res.s = s / tau;
      res.z = z / tau;
      return res;
    }
    if (hz < 0.0) {
      const double pinf = (P.G.transpose() * z).norm() / resx0 / (-hz);
      if (pinf <= opt.feastol) {
        res.status = SolveStatus::kInfeasible;
        res.x = VectorXd::Zero(m);
        res.s = VectorXd::Zero(N);
        res.z = z / (-hz);
        return res;
      }
    }
    if (cx < 0.0) {
      const double dinf = (P.G * x + s).norm() / resz0 / (-cx);
      if (dinf <= opt.feastol) {
        res.status = SolveStatus::kUnbounded;
        res.x = x / (-cx);
        res.s = s / (-cx);
        res.z = VectorXd::Zero(N);
        return res;
      }
    }
    if (iter == opt.max_iter) break;

    if (!compute_scaling(s, z, L, w)) break;
    const double mu = (s.dot(z) + tau * kappa) / (deg + 1.0);

    MatrixXd Gt(N, m);
    for (int j = 0; j < m; ++j) Gt.col(j) = scale_s(P.G.col(j), L, w);
    const VectorXd ht = scale_s(P.h, L, w);
    const Eigen::LLT<MatrixXd> llt = factor(Gt);
    if (llt.info() != Eigen::Success) break;

    // Solves G~'dz = bx, G~ dx - dz = r with two rounds of refinement on
    // the unsquared system.
    auto kkt = [&](const VectorXd& bx, const VectorXd& r, VectorXd& dxo, VectorXd& dzo) {
      dxo = llt.solve(bx + Gt.transpose() * r);
      dzo = Gt * dxo - r;
      for (int k = 0; k < 2; ++k) {
        const VectorXd e1 = bx - Gt.transpose() * dzo;
        const VectorXd e2 = r - (Gt * dxo - dzo);
        const VectorXd cx = llt.solve(e1 + Gt.transpose() * e2);
        dxo += cx;
        dzo += Gt * cx - e2;
      }
    };
    VectorXd dx2, dz2;
    kkt(-P.c, ht, dx2, dz2);
    const double denom2 = P.c.dot(dx2) + ht.dot(dz2);
    const VectorXd lsq = lambda_sq(L, w);

    auto inv_lambda = [](double a, double b) { return 2.0 / (a + b); };

    VectorXd dx, dzt, dst;
    double dtau = 0.0, dkappa = 0.0;
    // Solves the Newton system for right-hand sides scaled by (1 - sigma)
    // and complementarity target bs (scaled space), bk.
    auto newton = [&](double sigma, const VectorXd& bs, double bk) {
      const VectorXd bx = -(1.0 - sigma) * rx;
      const VectorXd bz = -(1.0 - sigma) * rz;
      const double bt = -(1.0 - sigma) * rt;
      const VectorXd u = lambda_op(bs, L, w, inv_lambda);
      const VectorXd r = scale_s(bz, L, w) - u;
      VectorXd dx1, dz1;
      kkt(bx, r, dx1, dz1);
      dtau = (bk - tau * (bt - P.c.dot(dx1) - ht.dot(dz1))) / (kappa - tau * denom2);
      dkappa = (bk - kappa * dtau) / tau;
      dx = dx1 + dtau * dx2;
      dzt = dz1 + dtau * dz2;
      dst = u - dzt;
    };
    auto step_length = [&]() {
      double a = std::min(max_step(dst, L, w), max_step(dzt, L, w));
      if (dtau < 0.0) a = std::min(a, -tau / dtau);
      if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    // Predictor (affine scaling).
    newton(0.0, -lsq, -tau * kappa);
    const double alpha_a = std::min(1.0, step_length());
    const double sigma = std::pow(1.0 - alpha_a, 3);

    // Corrector.
    const VectorXd corr = jordan(dst, dzt, L);
    const double kcorr = dtau * dkappa;
    newton(sigma, -lsq + sigma * mu * e - corr, -tau * kappa + sigma * mu - kcorr);
    const double alpha = std::min(1.0, 0.99 * step_length());

    x += alpha * dx;
    z += alpha * unscale_z(dzt, L, w);
    s += alpha * unscale_s(dst, L, w);
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (!x.allFinite() || !std::isfinite(tau) || !std::isfinite(kappa)) break;
  }
  res.status = SolveStatus::kMaxIterations;
  res.x = x / tau;
  res.s = s / tau;
  res.z = z / tau;
  return res;
}

}  // namespace

// Equilibrates G by a few rounds of column scaling (free variables) and
// per-cone-block row scaling (keeps every block inside its cone), solves,
// and maps the iterates back.
ConicResult solve_conic(const ConicProblem& P, const ConicOptions& opt) {
  const int m = static_cast<int>(P.G.cols());
  const int N = static_cast<int>(P.G.rows());
  if (N != P.dims.size() || P.h.size() != N || P.c.size() != m) {
    throw DimensionError("solve_conic: inconsistent problem dimensions");
  }
  const Layout L(P.dims);
  VectorXd col = VectorXd::Ones(m), row = VectorXd::Ones(N);
  ConicProblem Q = P;
  for (int round = 0; round < 4; ++round) {
    for (int j = 0; j < m; ++j) {
      const double n = Q.G.col(j).cwiseAbs().maxCoeff();
      if (n > 0.0) {
        const double f = 1.0 / std::sqrt(n);
        Q.G.col(j) *= f;
        col(j) *= f;
      }
    }
    auto scale_rows = [&](int begin, int len) {
      const double n = Q.G.middleRows(begin, len).cwiseAbs().maxCoeff();
      if (!(n > 0.0)) return;
      const double f = 1.0 / std::sqrt(n);
      Q.G.middleRows(begin, len) *= f;
      row.segment(begin, len) *= f;
    };
    for (int i = 0; i < P.dims.lp; ++i) scale_rows(i, 1);
    for (std::size_t k = 0; k < P.dims.psd.size(); ++k) {
      scale_rows(L.offset[k], svec_size(P.dims.psd[k]));
    }
  }
  Q.c = P.c.cwiseProduct(col);
  Q.h = P.h.cwiseProduct(row);
  ConicResult r = solve_scaled(Q, opt);
  if (r.x.size() == m) r.x = r.x.cwiseProduct(col);
  if (r.s.size() == N) r.s = r.s.cwiseQuotient(row);
  if (r.z.size() == N) r.z = r.z.cwiseProduct(row);
  return r;
}

}  // namespace ddctl::lmi
