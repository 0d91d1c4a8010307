#ifndef NCERG_CONVERGENCE_HPP
#define NCERG_CONVERGENCE_HPP

// Certificates for convergence in measure and bilateral almost uniform
// convergence, built from spectral projections of the differences, plus the
// corner analysis of density averages.

#include <optional>
#include <vector>

#include "ncerg/neveu.hpp"

namespace ncerg {

struct MeasureRecord {
  int index = 0;
  /// tau(1 - e_a).
  double delta = 0.0;
  int rank = 0;
  /// ||e_a D_a e_a||, recomputed after construction.
  double corner_norm = 0.0;
  Projection projection;
};

struct MeasureCertificate {
  double eps = 0.0;
  double delta_tol = 1e-6;
  int window = 5;
  std::vector<MeasureRecord> records;
  /// Index after which every delta stays within delta_tol.
  std::optional<int> n0;
  /// Records whose corner norm reached eps.
  int violations = 0;
  Verdict verdict = Verdict::unknown;
  std::string detail;
};

/// e_a = chi_[0, eps)(|X_a - X|); delta_a = tau(chi_[eps, inf)(|X_a - X|)).
/// An empty `indices` means 1..n.
MeasureCertificate measure_certify(const TracialAlgebra& A, const std::vector<Operator>& sequence,
                                   const Operator& limit, double eps,
                                   std::vector<int> indices = {}, double delta_tol = 1e-6,
                                   int window = 5);

struct BauCertificate {
  double eps = 0.0;
  double delta_budget = 0.0;
  int window = 5;
  Projection projection;
  /// tau(1 - e).
  double delta = 0.0;
  /// Spectral cut of the weighted tail sum.
  double theta = 0.0;
  /// First index entering the tail sum.
  int n0 = 0;
  std::vector<int> indices;
  /// ||e D_a e|| per tail index and sup over the tail starting there.
  std::vector<double> corner_norms;
  std::vector<double> tail_sups;
  /// First index whose tail sup is below eps.
  std::optional<int> tail_start;
  Verdict verdict = Verdict::unknown;
  std::string detail;
};

/// S = sum_k 2^{-k} |D_{a_k}| over the schedule positions k = 0, 1, ... from
/// the first index >= n0; e = chi_[0, theta](S) with theta the smallest
/// eigenvalue of S such that tau(1 - e) <= delta_budget.
BauCertificate bau_certify(const TracialAlgebra& A, const std::vector<Operator>& sequence,
                           const Operator& limit, double delta_budget, double eps,
                           std::vector<int> indices = {}, int n0 = 0, int window = 5);

struct StochasticOptions {
  std::vector<int> schedule;
  double eps = 0.1;
  double delta = 0.25;
  int window = 5;
};

/// Schedule 1, 2, ..., 64.
std::vector<int> default_stochastic_schedule();

struct CornerRecord {
  int index = 0;
  /// tau(1 - r_a) with r_a = p + q_a.
  double r_defect = 0.0;
  double cross_norm = 0.0;
  double cross_bound = 0.0;
  /// Past the combined burn-in, so both bounds are claimed.
  bool checked = false;
};

struct StochasticReport {
  /// E_*(X), the limit of the e1 corner.
  Operator limit;
  BauCertificate e1_corner;
  MeasureCertificate e2_corner;
  std::vector<CornerRecord> records;
  std::optional<int> burn_in;
  /// The cross-term bound needs A_a(X) >= 0.
  bool cross_term_applicable = false;
  int cross_violations = 0;
  int r_violations = 0;
  std::vector<CheckReport> corner_checks;
  Verdict verdict = Verdict::unknown;
  std::string detail;
};

/// Averages of a density X in the Schrodinger picture split along e1 + e2 = 1.
StochasticReport stochastic_run(const SemigroupAction& action,
                                const NeveuDecomposition& decomposition, const Operator& x,
                                const StochasticOptions& options);

/// ||e_i gamma(X) e_i - gamma(e_i X e_i)||_1 <= 1e-9 ||X||_1 for i = 1, 2 on
/// the density-picture generator. Throws precondition unless the action
/// carries a passing Lamperti attestation.
CheckReport corner_compatibility(const SemigroupAction& action,
                                 const NeveuDecomposition& decomposition, const Operator& x,
                                 std::size_t generator);

struct ConvexHullResult {
  /// Operator norm of sum_g lambda_g alpha_g(x) - E(x).
  double residual = 0.0;
  /// Hilbert-Schmidt objective at the returned weights.
  double objective = 0.0;
  std::vector<double> weights;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
};

/// Best convex combination of the orbit window of budget `a` approximating
/// E(x). Projected gradient from the barycenter, then a KKT polish on the
/// active set.
ConvexHullResult convex_hull_residual(const SemigroupAction& action, const Operator& x, int a);

/// Indicators of a sliding window on C^16: widths 8, 4, 2, 1, then `sweeps`
/// further width-1 passes. Converges to 0 in measure but not b.a.u.
std::vector<Operator> moving_bump_sequence(int sweeps = 2);

}  // namespace ncerg

#endif
