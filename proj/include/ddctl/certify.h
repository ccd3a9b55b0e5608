#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddctl/lti.h"
#include "ddctl/synthesis.h"
#include "ddctl/uncertainty.h"

namespace ddctl {

/// Worst-case slacks of one sampled member of the uncertainty set.
struct SampleMargin {
  int index = 0;
  bool hurwitz = false;
  double abscissa = 0.0;     // max Re(eig(A + B K))
  double lyapunov = 0.0;     // -max eig H(P (A + B K))
  double performance = 0.0;  // -max eig of the H2/Hinf inequality at (P, gamma); 0 for stabilization
};

struct CertificationReport {
  std::optional<bool> hurwitz_truth;
  double hurwitz_sampled_fraction = 0.0;
  /// Fraction of samples where the H2/Hinf inequality holds at the shared
  /// (P, gamma); equals the Hurwitz fraction for stabilization.
  double performance_sampled_fraction = 0.0;
  int samples = 0;
  std::optional<double> true_h2;
  std::optional<double> true_hinf;
  std::optional<double> bound_gamma;
  std::optional<double> residual;
  /// Direct eigencheck of the robust inequality at (K, P, lambda, gamma).
  bool direct_check = false;
  std::map<std::string, double> lmi_margins;
  std::vector<SampleMargin> per_sample;

  /// Flat key=value text.
  std::string to_text() const;
  /// index,hurwitz,abscissa,lyapunov,performance
  std::string per_sample_csv() const;
};

/// sqrt(tr(G' Po G)) with A_K' Po + Po A_K + C_K' C_K = 0. Throws
/// StabilityError if A_K is not Hurwitz, UnsupportedChannelError if H != 0.
double h2_norm(const LtiSystem& sys, const MatrixXd& K);

/// Bisection on the bounded-real LMI at fixed K. Bracket [0, 2 g + 1]
/// with g = hinf_grid(sys, K); stops when the bracket is below tol relative.
double hinf_norm(const LtiSystem& sys, const MatrixXd& K, double tol = 1e-4);

/// Peak of the largest singular value over a log grid (2000 points plus
/// w = 0), refined by golden-section search around the best grid point.
double hinf_grid(const LtiSystem& sys, const MatrixXd& K);

/// True iff some P >= 0 makes the bounded-real LMI negative definite at
/// gamma; the solver only proposes P, the decision is an eigencheck.
bool hinf_feasible(const LtiSystem& sys, const MatrixXd& K, double gamma);

/// Frobenius norm of K o I_{S^c}.
double structural_residual(const MatrixXd& K, const SparsityPattern& pat);

struct CertifyOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Ground truth; enables hurwitz_truth and the true norms.
  std::optional<LtiSystem> truth;
  std::optional<SparsityPattern> pattern;
};

/// Never consults solver status: every check is an eigenvalue computation.
/// The per-sample results do not depend on `jobs`.
CertificationReport certify_robust(const MatrixEllipsoid& ell, const SynthesisOutcome& outcome,
                                   Objective objective, const Channels& channels,
                                   const CertifyOptions& options);

}  // namespace ddctl
