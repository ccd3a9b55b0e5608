#include "ddctl/uncertainty.h"

#include <cmath>
#include <random>
#include <string>

#include "ddctl/errors.h"
#include "ddctl/lmi/solver.h"
#include "ddctl/matops.h"

namespace ddctl {

MatrixXd MatrixEllipsoid::center_A() const { return delta.topRows(nx()).transpose(); }

MatrixXd MatrixEllipsoid::center_B() const { return delta.bottomRows(nu()).transpose(); }

std::vector<SampleBlock> sample_blocks(const DataSet& data, const MatrixXd& G, double eps) {
  data.validate();
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("eps must be finite and >= 0");
  if (G.rows() != data.X0.rows()) {
    throw DimensionError("G has " + std::to_string(G.rows()) + " rows, data have " +
                         std::to_string(data.X0.rows()) + " states");
  }
  const MatrixXd noise = eps * eps * G * G.transpose();
  std::vector<SampleBlock> blocks;
  blocks.reserve(data.T());
  for (int i = 0; i < data.T(); ++i) {
    VectorXd z(data.X0.rows() + data.U0.rows());
    z << data.X0.col(i), data.U0.col(i);
    const VectorXd xd = data.X1.col(i);
    blocks.push_back({xd * xd.transpose() - noise, -z * xd.transpose(), z * z.transpose()});
  }
  return blocks;
}

void complete_ellipsoid(MatrixEllipsoid& ell) {
  const SymMatrix As(ell.Astar);
  ell.Astar = As.entries();
  Eigen::LLT<MatrixXd> llt(ell.Astar);
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError("ellipsoid shape matrix is not positive definite");
  }
  ell.delta = -llt.solve(ell.Bstar);
  ell.AstarInvSqrt = inv_sqrt_spd(As).entries();
  ell.objective = -logdet_spd(As);
}

MatrixEllipsoid fit_min_ellipsoid(const std::vector<SampleBlock>& blocks) {
  if (blocks.empty()) throw DegenerateDataError("no samples to fit");
  const int nx = static_cast<int>(blocks.front().c.rows());
  const int nz = static_cast<int>(blocks.front().a.rows());
  MatrixXd sum_a = MatrixXd::Zero(nz, nz), sum_b = MatrixXd::Zero(nz, nx);
  bool noisy = false;
  for (const auto& blk : blocks) {
    if (blk.c.rows() != nx || blk.c.cols() != nx || blk.b.rows() != nz ||
        blk.b.cols() != nx || blk.a.rows() != nz || blk.a.cols() != nz) {
      throw DimensionError("sample blocks have inconsistent shapes");
    }
    sum_a += blk.a;
    sum_b += blk.b;
    const double scale = std::max(1.0, blk.c.cwiseAbs().maxCoeff());
    if (min_eig(0.5 * (blk.c + blk.c.transpose())) < -1e-14 * scale) noisy = true;
  }
  if (!noisy) {
    throw DegenerateDataError(
        "noise bound is zero: noise-free data pin the model exactly and the minimal "
        "ellipsoid is unbounded; use eps > 0");
  }
  Eigen::LDLT<MatrixXd> ldlt(sum_a);
  const SymEig ea = sym_eig(SymMatrix(sum_a));
  if (!(ea.values(0) > 1e-10 * std::max(1.0, ea.values(nz - 1)))) {
    throw DegenerateDataError(
        "data matrix [X0; U0] is rank deficient; collect more samples or excite all inputs");
  }

  // Re-center on the least-squares model and rescale the residual blocks,
  // a congruence that leaves the fitted set unchanged.
  const MatrixXd Z0 = -ldlt.solve(sum_b);
  std::vector<SampleBlock> nb;
  nb.reserve(blocks.size());
  double s2 = 0.0;
  for (const auto& blk : blocks) {
    SampleBlock r;
    const MatrixXd bz = blk.b + blk.a * Z0;
    r.c = blk.c + Z0.transpose() * blk.b + blk.b.transpose() * Z0 +
          Z0.transpose() * blk.a * Z0;
    r.c = (0.5 * (r.c + r.c.transpose())).eval();
    r.b = bz;
    r.a = blk.a;
    s2 = std::max(s2, spectral_norm(r.c));
    nb.push_back(std::move(r));
  }
  if (!(s2 > 0.0)) throw DegenerateDataError("residual blocks vanish; eps must be > 0");
  const double se = std::sqrt(s2);
  for (auto& r : nb) {
    r.c /= s2;
    r.b /= se;
  }

  lmi::LmiProblem p;
  const lmi::Affine A = p.symmetric("A", nz);
  const lmi::Affine B = p.matrix("B", nz, nx);
  lmi::Affine sc = lmi::Affine::Zero(nx, nx);
  lmi::Affine sb = lmi::Affine::Zero(nz, nx);
  lmi::Affine sa = lmi::Affine::Zero(nz, nz);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    const lmi::Affine th = p.nonneg("theta" + std::to_string(i));
    sc += lmi::scale(th, nb[i].c);
    sb += lmi::scale(th, nb[i].b);
    sa += lmi::scale(th, nb[i].a);
  }
  const lmi::Affine I = lmi::Affine::Identity(nx);
  const lmi::Affine Z = lmi::Affine::Zero(nz, nz);
  p.constrain(lmi::sym_bmat({{-I - sc}, {B - sb, A - sa}, {B, Z, -A}}),
              lmi::Sense::kNegSemidef, "s-procedure");

  const lmi::LmiSolution sol = lmi::maximize_logdet(p, "A");
  if (sol.status == lmi::SolveStatus::kInfeasible) {
    throw DegenerateDataError("ellipsoid fit is infeasible (no interior point); check the data");
  }
  if (sol.status == lmi::SolveStatus::kUnbounded) {
    throw DegenerateDataError(
        "ellipsoid fit is unbounded: eps is too small for the data, which pin the "
        "model exactly (the consistency set has empty interior)");
  }
  if (sol.status != lmi::SolveStatus::kOptimal) {
    throw DegenerateDataError("ellipsoid fit did not converge");
  }

  MatrixEllipsoid ell;
  const MatrixXd Ahat = 0.5 * (sol["A"] + sol["A"].transpose());
  ell.Astar = Ahat / s2;
  const MatrixXd dV = -Ahat.llt().solve(sol["B"]);
  const MatrixXd delta = Z0 + se * dV;
  ell.Bstar = -ell.Astar * delta;
  ell.theta.resize(static_cast<int>(nb.size()));
  for (std::size_t i = 0; i < nb.size(); ++i) {
    ell.theta(i) = sol["theta" + std::to_string(i)](0, 0) / s2;
  }
  complete_ellipsoid(ell);
  ell.delta = delta;  // avoids the round trip through Bstar
  return ell;
}

double membership_value(const MatrixEllipsoid& ell, const MatrixXd& A, const MatrixXd& B) {
  if (A.rows() != ell.nx() || A.cols() != ell.nx() || B.rows() != ell.nx() ||
      B.cols() != ell.nu()) {
    throw DimensionError("membership test: (A, B) do not match the ellipsoid");
  }
  MatrixXd Z(ell.nz(), ell.nx());
  Z << A.transpose(), B.transpose();
  const MatrixXd d = Z - ell.delta;
  return max_eig(0.5 * (d.transpose() * ell.Astar * d + (d.transpose() * ell.Astar * d).transpose()));
}

bool contains(const MatrixEllipsoid& ell, const MatrixXd& A, const MatrixXd& B, double tol) {
  return membership_value(ell, A, B) - 1.0 <= tol;
}

std::pair<MatrixXd, MatrixXd> sample_member(const MatrixEllipsoid& ell, int index,
                                            std::uint64_t seed) {
  const int nz = ell.nz(), nx = ell.nx();
  MatrixXd gamma = MatrixXd::Zero(nz, nx);
  if (index > 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double nrm = 0.0;
    do {
      for (int j = 0; j < nx; ++j) {
        for (int i = 0; i < nz; ++i) gamma(i, j) = normal(rng);
      }
      nrm = spectral_norm(gamma);
    } while (nrm == 0.0);
    const double radius = index == 1 ? 1.0 : unit(rng);
    gamma *= radius / nrm;
  }
  const MatrixXd Z = ell.delta + ell.AstarInvSqrt * gamma;
  return {Z.topRows(nx).transpose(), Z.bottomRows(nz - nx).transpose()};
}

std::vector<std::pair<MatrixXd, MatrixXd>> sample_members(const MatrixEllipsoid& ell,
                                                          int count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample_members: count must be >= 1");
  std::vector<std::pair<MatrixXd, MatrixXd>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(sample_member(ell, k, seed));
  return out;
}

MatrixEllipsoid make_point_ellipsoid(const MatrixXd& A, const MatrixXd& B, double rho) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw DimensionError("make_point_ellipsoid: A must be square and B match its rows");
  }
  if (!(rho > 0.0)) throw InputError("make_point_ellipsoid: rho must be positive");
  const int nx = static_cast<int>(A.rows());
  const int nz = nx + static_cast<int>(B.cols());
  MatrixEllipsoid ell;
  ell.delta.resize(nz, nx);
  ell.delta << A.transpose(), B.transpose();
  ell.Astar = rho * MatrixXd::Identity(nz, nz);
  ell.Bstar = -ell.Astar * ell.delta;
  ell.AstarInvSqrt = MatrixXd::Identity(nz, nz) / std::sqrt(rho);
  ell.objective = -nz * std::log(rho);
  return ell;
}

}  // namespace ddctl
