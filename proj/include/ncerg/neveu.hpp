#ifndef NCERG_NEVEU_HPP
#define NCERG_NEVEU_HPP

// Mean ergodic projection, invariant states and the splitting 1 = e1 + e2
// into the support of a maximal invariant state and a weakly wandering part.

#include <optional>
#include <vector>

#include "ncerg/dynamics.hpp"

namespace ncerg {

struct MeanErgodicProjection {
  Picture picture = Picture::heisenberg;
  /// E as a superoperator in `picture`.
  Matrix matrix;
  /// Hilbert-Schmidt orthonormal basis of the joint fixed space.
  std::vector<Operator> fixed_basis;
  std::vector<int> generator_fixed_dims;
  /// ||E^2 - E||.
  double idempotence_residual = 0.0;
  /// max_i max(||E G_i - E||, ||G_i E - E||).
  double invariance_residual = 0.0;
  /// ||A_16 - E|| and ||A_64 - E||.
  double residual_16 = 0.0;
  double residual_64 = 0.0;

  Operator apply(const TracialAlgebra& A, const Operator& x) const;
};

/// Joint fixed space from the stacked [G_1 - I; ...; G_d - I] (or the stacked
/// rates for r-plus-cube). `tol` scales the singular value threshold.
std::vector<Operator> fixed_space(const SemigroupAction& action, double tol = 1e-9);

/// Throws Error(numerical) when the algebraic projection and the iterated
/// averages disagree beyond the fitted C/a envelope.
MeanErgodicProjection mean_ergodic_projection(const SemigroupAction& action,
                                              double tol = 1e-9);

struct MeanEnvelope {
  std::vector<int> indices;
  /// ||A_a - E|| per index.
  std::vector<double> residuals;
  /// Least-squares C in residual ~ C / a.
  double fitted_c = 0.0;
  /// residual <= 2 C / a everywhere and non-increasing.
  Verdict verdict = Verdict::unknown;
};

MeanEnvelope mean_envelope(const SemigroupAction& action, const MeanErgodicProjection& mean,
                           const std::vector<int>& indices = {4, 8, 16, 32, 64});

/// E_*(phi0) / tau(E_*(phi0)), or nothing when all mass leaks.
std::optional<Operator> invariant_state(const SemigroupAction& action, const Operator& phi0,
                                        double tol = 1e-9);

struct DecayReport {
  std::vector<int> schedule;
  std::vector<double> norms;
  /// Least-squares slope of log norm against log a over the tail window.
  double slope = 0.0;
  double decay_tol = 1e-6;
  Verdict verdict = Verdict::unknown;
  std::string detail;
};

/// (a, ||A_a(x)||) in the Heisenberg picture.
DecayReport weakly_wandering_certificate(const SemigroupAction& action, const Operator& x,
                                         const std::vector<int>& schedule,
                                         double decay_tol = 1e-6, int window = 5);

struct InfProfile {
  double value = 0.0;
  int argmin = 1;
};

/// min over 1 <= a <= a_max of tau(phi A_a(p)), Heisenberg averages.
InfProfile inf_profile(const SemigroupAction& action, const Operator& phi, const Projection& p,
                       int a_max);

/// sum_j 2^{-j} q_j (j from 1), or sum_j w_j q_j with explicit weights.
Operator wandering_sum(const std::vector<Projection>& projections,
                       const std::vector<double>& weights = {});

struct WanderingSumReport {
  Operator sum;
  std::vector<DecayReport> parts;
  DecayReport combined;
  /// support(sum) equals the join of the parts.
  bool support_is_join = false;
  Verdict verdict = Verdict::unknown;
};

WanderingSumReport certify_wandering_sum(const SemigroupAction& action,
                                         const std::vector<Projection>& projections,
                                         const std::vector<int>& schedule,
                                         double decay_tol = 1e-6, int window = 5);

struct NeveuOptions {
  std::vector<int> schedule{1, 2, 4, 8, 16, 32, 64};
  double decay_tol = 1e-6;
  double tol_fixed = 1e-9;
  int window = 5;
  std::uint64_t seed = 0;
  /// Random faithful densities used to probe uniqueness of e1.
  int probes = 3;
};

struct NeveuDecomposition {
  Projection e1;
  Projection e2;
  /// Invariant density with tau(Y) = 1; absent when no invariant state exists.
  std::optional<Operator> invariant_density;
  Operator wandering_witness;
  DecayReport decay;
  /// Uniqueness probes, invariant checks and the wandering-sum replay.
  std::vector<CheckReport> checks;
  MeanErgodicProjection heisenberg_mean;
  MeanErgodicProjection schrodinger_mean;
  bool sampled_positivity = false;

  Verdict verdict() const;
};

/// Precondition: generators commute and none fails the contraction check.
NeveuDecomposition neveu_decompose(const SemigroupAction& action,
                                   const NeveuOptions& options = {});

/// e1 from a given faithful density; shared by the uniqueness probes.
Projection maximal_support(const TracialAlgebra& A, const MeanErgodicProjection& schrodinger,
                           const Operator& phi0);

}  // namespace ncerg

#endif
