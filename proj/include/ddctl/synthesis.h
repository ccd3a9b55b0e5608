#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddctl/lti.h"
#include "ddctl/uncertainty.h"

namespace ddctl {

enum class Objective { kStabilize, kH2, kHinf };
enum class OutcomeStatus { kOk, kInfeasible, kNoConvergence };

const char* to_string(Objective objective);
const char* to_string(OutcomeStatus status);
Objective parse_objective(const std::string& name);

struct AlgoConfig {
  double beta0 = 1.0;
  double mu = 2.0;
  double beta_cap = 1e6;
  double eps_T = 0.01;
  double eta = 1e-6;
  int max_iter = 100;

  /// Throws InputError if the invariants mu > 1, eps_T > 0,
  /// beta_cap >= beta0 > 0, eta >= 0, max_iter >= 1 fail.
  void validate() const;
};

/// Performance channel y = C x + D u + H d, with d entering through G.
struct Channels {
  MatrixXd C, D, G, H;
  static Channels from(const LtiSystem& sys) { return {sys.C, sys.D, sys.G, sys.H}; }
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;  // value of the relaxed SDP
  double residual = 0.0;   // |K o I_Sc|_F
  double gamma = 0.0;      // bound carried by the iterate (0 for stabilization)
  double lambda = 0.0;
  double beta = 0.0;
  double dK = 0.0;         // |K_k - K_{k-1}|_F
  double dP = 0.0;         // |P_k - P_{k-1}|_F
  /// Largest eigenvalue of the robust (pre-relaxation) inequality at the
  /// iterate; negative means the iterate is certified.
  double robust_max_eig = 0.0;
};

struct SynthesisOutcome {
  Objective objective = Objective::kStabilize;
  OutcomeStatus status = OutcomeStatus::kInfeasible;
  MatrixXd K;
  MatrixXd P;
  std::optional<double> lambda;
  std::optional<double> gamma;
  /// Bound of the last iterate before the pattern projection (structured runs).
  std::optional<double> gamma_unprojected;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  std::string message;

  bool ok() const { return status == OutcomeStatus::kOk; }
};

// Unstructured designs (congruence-transformed, X = P^{-1}, Y = K X).
SynthesisOutcome stabilize_unstructured(const MatrixEllipsoid& ell, const AlgoConfig& cfg);
SynthesisOutcome h2_unstructured(const MatrixEllipsoid& ell, const Channels& ch,
                                 const AlgoConfig& cfg);
SynthesisOutcome hinf_unstructured(const MatrixEllipsoid& ell, const Channels& ch,
                                   const AlgoConfig& cfg);

// Structured designs by iterated linearized SDPs.
SynthesisOutcome stabilize_structured(const MatrixEllipsoid& ell, const SparsityPattern& pat,
                                      const AlgoConfig& cfg);
SynthesisOutcome h2_structured(const MatrixEllipsoid& ell, const Channels& ch,
                               const SparsityPattern& pat, const AlgoConfig& cfg);
SynthesisOutcome hinf_structured(const MatrixEllipsoid& ell, const Channels& ch,
                                 const SparsityPattern& pat, const AlgoConfig& cfg);

/// Unstructured SDP with X restricted to be diagonal and Y o I_Sc = 0.
SynthesisOutcome baseline_xdiag(const MatrixEllipsoid& ell, const SparsityPattern& pat,
                                Objective objective, const Channels& ch,
                                const AlgoConfig& cfg);

/// Dispatches to the unstructured or structured routine for `objective`.
SynthesisOutcome synthesize(const MatrixEllipsoid& ell, Objective objective,
                            const Channels& ch, const SparsityPattern& pat,
                            const AlgoConfig& cfg);

/// L(K,P | Kt,Pt) = G(Mt) + H(Mt' (delta (P - Pt) - [0; K - Kt])),
/// Mt = delta Pt - [I; Kt], with G(X) = X'X and H(X) = X + X'.
MatrixXd linearize_bilinear(const MatrixXd& K, const MatrixXd& P, const MatrixXd& Kt,
                            const MatrixXd& Pt, const MatrixEllipsoid& ell);

/// Largest eigenvalue of the robust inequality behind each design:
///   stabilize: H(P delta'[I;K]) + P P + M'M,
///   h2:        H(P delta'[I;K]) + lambda P P + M'M / lambda + C_K'C_K,
///   hinf:      [[H(P delta'[I;K]) + lambda P P + M'M / lambda, P G, C_K'],
///               [G'P, -gamma I, H'], [C_K, H, -gamma I]],
/// with M = Astar^{-1/2} [I; K]. gamma is unused for h2, where the bound
/// implied by P is sqrt(tr(G'PG)).
double robust_max_eig(Objective objective, const MatrixEllipsoid& ell, const Channels& ch,
                      const MatrixXd& K, const MatrixXd& P, double lambda, double gamma);

/// Best certificate (P, lambda, gamma) for a fixed gain K; status kInfeasible
/// if K admits none. lambda_hint only rescales the SDP rows.
SynthesisOutcome certify_fixed_gain(Objective objective, const MatrixEllipsoid& ell,
                                    const Channels& ch, const MatrixXd& K,
                                    const AlgoConfig& cfg, double lambda_hint = 1.0);

}  // namespace ddctl
