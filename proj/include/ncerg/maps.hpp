#ifndef NCERG_MAPS_HPP
#define NCERG_MAPS_HPP

// Positive contractions on a tracial algebra, stored as dense matrices on
// the vectorization (block-major, each block column-stacked), together with
// the structural checks the ergodic machinery depends on.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

enum class MapSource { kraus, matrix, classical, conjugation, generator };
enum class Verdict { pass, fail, unknown };

const char* to_string(MapSource s) noexcept;
const char* to_string(Verdict v) noexcept;

struct CheckReport {
  std::string name;
  Verdict verdict = Verdict::unknown;
  /// Concrete violators for fail verdicts; for pass verdicts of sampled
  /// checks, optionally the inputs that were examined.
  std::vector<Operator> witnesses;
  std::map<std::string, double> tolerances;
  int samples = 0;
  std::uint64_t seed = 0;
  /// The quantity compared against the tolerance (worst case seen).
  double measured = 0.0;
  std::string detail;

  bool passed() const noexcept { return verdict == Verdict::pass; }
};

// Attestation keys.
inline constexpr const char* kCompletePositivity = "complete-positivity";
inline constexpr const char* kPositivitySampled = "positivity-sampled";
inline constexpr const char* kSubunital = "subunital";
inline constexpr const char* kL1Contractive = "l1-contractive";
inline constexpr const char* kLamperti = "lamperti";

class SuperOperator {
 public:
  SuperOperator() = default;
  SuperOperator(TracialAlgebra algebra, Matrix matrix, MapSource source);

  static SuperOperator identity(const TracialAlgebra& A);

  const TracialAlgebra& algebra() const noexcept { return algebra_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  MapSource source() const noexcept { return source_; }
  /// Heisenberg-form Kraus operators (hilbert_dim square), empty when the map
  /// was not built from them.
  const std::vector<Matrix>& kraus() const noexcept { return kraus_; }
  const std::optional<Matrix>& unitary() const noexcept { return unitary_; }
  const std::map<std::string, CheckReport>& attestations() const noexcept {
    return attestations_;
  }
  /// unknown when the check was never run.
  Verdict attested(const std::string& key) const;
  /// CP or sampled positivity passed.
  bool positive_attested() const;

  void attest(CheckReport report);
  void set_kraus(std::vector<Matrix> kraus) { kraus_ = std::move(kraus); }
  void set_unitary(Matrix u) { unitary_ = std::move(u); }

  Operator apply(const Operator& x) const;
  Vector apply_vec(const Vector& v) const { return matrix_ * v; }

 private:
  TracialAlgebra algebra_;
  Matrix matrix_;
  MapSource source_ = MapSource::matrix;
  std::vector<Matrix> kraus_;
  std::optional<Matrix> unitary_;
  std::map<std::string, CheckReport> attestations_;
};

/// outer after inner. Attestations that are closed under composition are
/// carried over.
SuperOperator compose(const SuperOperator& outer, const SuperOperator& inner);
/// sum_k c_k Gamma_k with c_k >= 0.
SuperOperator convex_combination(const std::vector<double>& coefficients,
                                 const std::vector<SuperOperator>& maps);

/// x -> sum_j K_j* x K_j with K_j acting on the whole Hilbert space. Throws
/// shape_mismatch when some K_j does not map the algebra into itself.
SuperOperator from_kraus(const TracialAlgebra& A, const std::vector<Matrix>& kraus);
/// (Lambda f)(i) = sum_j kernel[i][j] f(j) on a commutative algebra.
SuperOperator from_classical(const TracialAlgebra& A, const RealMatrix& kernel);
/// x -> U x U*. U may permute blocks of equal size.
SuperOperator from_conjugation(const TracialAlgebra& A, const Matrix& unitary);
/// Raw matrix; complete positivity is decided from the Choi matrix, and
/// positivity is sampled otherwise.
SuperOperator from_matrix(const TracialAlgebra& A, const Matrix& matrix,
                          std::uint64_t seed = 0);
/// Heisenberg Lindblad generator x -> i[H,x] + sum J* x J - {J*J, x}/2.
Matrix lindblad_generator(const TracialAlgebra& A, const Matrix& hamiltonian,
                          const std::vector<Matrix>& jumps);

/// Adjoint with respect to (X, y) -> tau(X y).
SuperOperator dual(const SuperOperator& map);
/// Same on bare matrices.
Matrix dual_matrix(const TracialAlgebra& A, const Matrix& m);

/// Superoperator of x -> U x U* for a full unitary on the Hilbert space.
Matrix conjugation_matrix(const TracialAlgebra& A, const Matrix& unitary);

CheckReport check_subunital(const SuperOperator& map);
CheckReport check_complete_positivity(const SuperOperator& map);
CheckReport check_positivity_sampled(const SuperOperator& map, int samples,
                                     std::uint64_t seed);
CheckReport check_contraction(const SuperOperator& map, std::uint64_t seed = 0);
/// `map` acts on densities. Deterministic standard-basis pairs are examined
/// first, then `trials` rounds of random splits and random-basis pairs.
CheckReport check_lamperti(const SuperOperator& map, int trials,
                           std::uint64_t seed);
CheckReport check_commuting(const std::vector<SuperOperator>& maps);

/// Spectral (2-)norm of a superoperator matrix.
double matrix_norm(const Matrix& m);

}  // namespace ncerg

#endif
