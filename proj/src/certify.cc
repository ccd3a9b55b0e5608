#include "ddctl/certify.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "ddctl/errors.h"
#include "ddctl/lmi/solver.h"
#include "ddctl/matops.h"

namespace ddctl {

namespace {

LtiSystem with_channels(const MatrixXd& A, const MatrixXd& B, const Channels& ch) {
  return {A, B, ch.G, ch.C, ch.D, ch.H};
}

void require_hurwitz(const MatrixXd& A_K) {
  if (!is_hurwitz(A_K)) {
    throw StabilityError("closed loop is not Hurwitz (spectral abscissa " +
                         std::to_string(spectral_abscissa(A_K)) + "); the norm is infinite");
  }
}

// Bounded-real matrix of the closed loop at (P, gamma).
MatrixXd bounded_real(const LtiSystem& sys, const ClosedLoop& cl, const MatrixXd& P,
                      double gamma) {
  const int n = sys.nx(), d = sys.nd(), y = sys.ny();
  MatrixXd m = MatrixXd::Zero(n + d + y, n + d + y);
  m.topLeftCorner(n, n) = herm(P * cl.A_K);
  m.block(0, n, n, d) = P * sys.G;
  m.block(n, 0, d, n) = sys.G.transpose() * P;
  m.block(0, n + d, n, y) = cl.C_K.transpose();
  m.block(n + d, 0, y, n) = cl.C_K;
  m.block(n, n + d, d, y) = sys.H.transpose();
  m.block(n + d, n, y, d) = sys.H;
  m.block(n, n, d, d) = -gamma * MatrixXd::Identity(d, d);
  m.block(n + d, n + d, y, y) = -gamma * MatrixXd::Identity(y, y);
  return m;
}

double sigma_max(const LtiSystem& sys, const MatrixXd& K, double w) {
  const Eigen::MatrixXcd T = frequency_response(sys, K, w);
  if (T.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(T).singularValues()(0);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

double h2_norm(const LtiSystem& sys, const MatrixXd& K) {
  sys.validate();
  if (sys.H.size() > 0 && sys.H.cwiseAbs().maxCoeff() != 0.0) {
    throw UnsupportedChannelError("H2 norm is infinite with a nonzero feedthrough H");
  }
  const ClosedLoop cl = closed_loop(sys, K);
  require_hurwitz(cl.A_K);
  const SymMatrix Po = solve_lyapunov(cl.A_K, SymMatrix(cl.C_K.transpose() * cl.C_K));
  return std::sqrt(std::max(0.0, (sys.G.transpose() * Po.entries() * sys.G).trace()));
}

double hinf_grid(const LtiSystem& sys, const MatrixXd& K) {
  sys.validate();
  const ClosedLoop cl = closed_loop(sys, K);
  require_hurwitz(cl.A_K);
  const Eigen::VectorXcd ev = cl.A_K.eigenvalues();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double a = std::abs(ev(i));
    if (a > 0.0) lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!std::isfinite(lo)) lo = hi = 1.0;
  const double wmin = std::log10(lo) - 3.0, wmax = std::log10(hi) + 3.0;
  const int points = 2000;
  std::vector<double> w(points + 1);
  w[0] = 0.0;
  for (int i = 0; i < points; ++i) {
    w[i + 1] = std::pow(10.0, wmin + (wmax - wmin) * i / (points - 1));
  }
  int best = 0;
  double peak = -1.0;
  for (int i = 0; i <= points; ++i) {
    const double s = sigma_max(sys, K, w[i]);
    if (s > peak) {
      peak = s;
      best = i;
    }
  }
  // Golden-section refinement between the neighbours of the best point.
  double a = w[std::max(0, best - 1)], b = w[std::min(points, best + 1)];
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = sigma_max(sys, K, x1), f2 = sigma_max(sys, K, x2);
  for (int it = 0; it < 100 && b - a > 1e-12 * std::max(1.0, b); ++it) {
    if (f1 > f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - r * (b - a);
      f1 = sigma_max(sys, K, x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + r * (b - a);
      f2 = sigma_max(sys, K, x2);
    }
  }
  return std::max({peak, f1, f2});
}

bool hinf_feasible(const LtiSystem& sys, const MatrixXd& K, double gamma) {
  const ClosedLoop cl = closed_loop(sys, K);
  const int n = sys.nx(), d = sys.nd(), y = sys.ny();
  lmi::LmiProblem p;
  const lmi::Affine P = p.symmetric("P", n);
  const lmi::Affine s = p.scalar("s");
  const lmi::Affine gI_d = lmi::Affine(MatrixXd(-gamma * MatrixXd::Identity(d, d)));
  const lmi::Affine gI_y = lmi::Affine(MatrixXd(-gamma * MatrixXd::Identity(y, y)));
  const lmi::Affine lmi_expr =
      lmi::sym_bmat({{lmi::herm(P * cl.A_K)},
                     {sys.G.transpose() * P, gI_d},
                     {lmi::Affine(cl.C_K), lmi::Affine(sys.H), gI_y}});
  p.constrain(lmi::scale(s, MatrixXd::Identity(n + d + y, n + d + y)) - lmi_expr,
              lmi::Sense::kPosSemidef, "bounded-real");
  p.constrain(P, lmi::Sense::kPosSemidef, "P>=0");
  p.minimize(s);
  const lmi::LmiSolution sol = lmi::solve(p);
  if (sol.status != lmi::SolveStatus::kOptimal) return false;
  const MatrixXd Pv = sol["P"];
  return max_eig(bounded_real(sys, cl, 0.5 * (Pv + Pv.transpose()), gamma)) < 0.0;
}

double hinf_norm(const LtiSystem& sys, const MatrixXd& K, double tol) {
  if (!(tol > 0.0)) throw InputError("hinf_norm: tol must be > 0");
  const double g = hinf_grid(sys, K);
  double lo = 0.0, hi = 2.0 * g + 1.0;
  while (!hinf_feasible(sys, K, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw StabilityError("hinf_norm: no finite bound found");
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (hinf_feasible(sys, K, mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double structural_residual(const MatrixXd& K, const SparsityPattern& pat) {
  if (K.rows() != pat.rows() || K.cols() != pat.cols()) {
    throw DimensionError("structural_residual: K and pattern shapes differ");
  }
  return K.cwiseProduct(pat.complement_real()).norm();
}

CertificationReport certify_robust(const MatrixEllipsoid& ell, const SynthesisOutcome& outcome,
                                   Objective objective, const Channels& channels,
                                   const CertifyOptions& options) {
  if (options.samples < 0) throw InputError("certify_robust: samples must be >= 0");
  const MatrixXd& K = outcome.K;
  const MatrixXd& P = outcome.P;
  if (K.rows() != ell.nu() || K.cols() != ell.nx() || P.rows() != ell.nx() ||
      P.cols() != ell.nx()) {
    throw DimensionError("certify_robust: outcome does not match the ellipsoid");
  }
  const bool perf = objective != Objective::kStabilize;
  const double lambda = outcome.lambda.value_or(1.0);
  const double gamma = outcome.gamma.value_or(0.0);
  // gamma only enters the Hinf inequality; the H2 block does not use it.
  CertificationReport rep;
  rep.samples = options.samples;
  if (perf) rep.bound_gamma = outcome.gamma;
  if (options.pattern) rep.residual = structural_residual(K, *options.pattern);

  const double direct = robust_max_eig(objective, ell, channels, K, P, lambda, gamma);
  rep.lmi_margins["robust"] = -direct;
  rep.lmi_margins["P"] = min_eig(P);
  rep.direct_check = direct < 0.0 && min_eig(P) > 0.0;
  if (objective == Objective::kH2) {
    const double tr = (channels.G.transpose() * P * channels.G).trace();
    rep.lmi_margins["trace"] = gamma * gamma - tr;
  }

  rep.per_sample.resize(options.samples);
  auto check = [&](int i) {
    const auto [A, B] = sample_member(ell, i, options.seed);
    SampleMargin m;
    m.index = i;
    const MatrixXd A_K = A + B * K;
    m.abscissa = spectral_abscissa(A_K);
    m.hurwitz = m.abscissa < 0.0;
    m.lyapunov = -max_eig(herm(P * A_K));
    if (objective == Objective::kH2) {
      const LtiSystem s = with_channels(A, B, channels);
      const ClosedLoop cl = closed_loop(s, K);
      const int n = s.nx(), y = s.ny();
      MatrixXd big(n + y, n + y);
      big << herm(P * cl.A_K), cl.C_K.transpose(), cl.C_K, -MatrixXd::Identity(y, y);
      m.performance = -max_eig(big);
    } else if (objective == Objective::kHinf) {
      const LtiSystem s = with_channels(A, B, channels);
      m.performance = -max_eig(bounded_real(s, closed_loop(s, K), P, gamma));
    }
    rep.per_sample[i] = m;
  };
  const int jobs = std::max(1, std::min(options.jobs, options.samples));
  if (jobs == 1) {
    for (int i = 0; i < options.samples; ++i) check(i);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        for (int i = j; i < options.samples; i += jobs) check(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  int stable = 0, performing = 0;
  double worst_lyap = std::numeric_limits<double>::infinity();
  double worst_perf = std::numeric_limits<double>::infinity();
  for (const SampleMargin& m : rep.per_sample) {
    stable += m.hurwitz;
    performing += perf ? (m.performance > 0.0) : m.hurwitz;
    worst_lyap = std::min(worst_lyap, m.lyapunov);
    if (perf) worst_perf = std::min(worst_perf, m.performance);
  }
  if (options.samples > 0) {
    rep.hurwitz_sampled_fraction = static_cast<double>(stable) / options.samples;
    rep.performance_sampled_fraction = static_cast<double>(performing) / options.samples;
    rep.lmi_margins["sampled_lyapunov"] = worst_lyap;
    if (perf) rep.lmi_margins["sampled_performance"] = worst_perf;
  }

  if (options.truth) {
    LtiSystem truth = *options.truth;
    const MatrixXd A_K = truth.A + truth.B * K;
    rep.hurwitz_truth = is_hurwitz(A_K);
    if (*rep.hurwitz_truth && perf) {
      truth.C = channels.C;
      truth.D = channels.D;
      truth.G = channels.G;
      truth.H = channels.H;
      if (objective == Objective::kH2) rep.true_h2 = h2_norm(truth, K);
      if (objective == Objective::kHinf) rep.true_hinf = hinf_norm(truth, K);
    }
  }
  return rep;
}

std::string CertificationReport::to_text() const {
  std::ostringstream os;
  auto opt = [&](const char* key, const std::optional<double>& v) {
    os << key << " = " << (v ? fmt(*v) : std::string("none")) << "\n";
  };
  os << "hurwitz_truth = "
     << (hurwitz_truth ? (*hurwitz_truth ? "true" : "false") : "unknown") << "\n";
  os << "samples = " << samples << "\n";
  os << "hurwitz_sampled_fraction = " << fmt(hurwitz_sampled_fraction) << "\n";
  os << "performance_sampled_fraction = " << fmt(performance_sampled_fraction) << "\n";
  os << "direct_check = " << (direct_check ? "true" : "false") << "\n";
  opt("true_h2", true_h2);
  opt("true_hinf", true_hinf);
  opt("bound_gamma", bound_gamma);
  opt("residual", residual);
  for (const auto& [k, v] : lmi_margins) os << "margin." << k << " = " << fmt(v) << "\n";
  return os.str();
}

std::string CertificationReport::per_sample_csv() const {
  std::ostringstream os;
  os << "index,hurwitz,abscissa,lyapunov,performance\n";
  for (const SampleMargin& m : per_sample) {
    os << m.index << "," << (m.hurwitz ? 1 : 0) << "," << fmt(m.abscissa) << ","
       << fmt(m.lyapunov) << "," << fmt(m.performance) << "\n";
  }
  return os.str();
}

}  // namespace ddctl
