#ifndef NCERG_DYNAMICS_HPP
#define NCERG_DYNAMICS_HPP

// Semigroup actions generated by commuting positive contractions and their
// ergodic averages over Folner windows.

#include <optional>
#include <vector>

#include "ncerg/maps.hpp"

namespace ncerg {

enum class Picture { heisenberg, schrodinger };
enum class SchemeKind { zplus_box, z_symmetric_box, finite_group, rplus_cube };

const char* to_string(Picture p) noexcept;
const char* to_string(SchemeKind k) noexcept;

struct FolnerScheme {
  SchemeKind kind = SchemeKind::zplus_box;
  int d = 1;
  /// Only for finite groups.
  int group_order = 0;
};

class SemigroupAction {
 public:
  SemigroupAction() = default;

  /// zplus-box or z-symmetric-box. For the symmetric box, missing inverses
  /// are derived from the generator (adjoint unitary for conjugations, the
  /// matrix inverse otherwise) and must themselves be positive.
  static SemigroupAction discrete(SchemeKind kind, Picture picture,
                                  std::vector<SuperOperator> generators,
                                  std::vector<SuperOperator> inverses = {});
  /// elements[0] must be the identity; table[g][h] is the index of gh with
  /// Gamma_{gh} = Gamma_g o Gamma_h.
  static SemigroupAction finite_group(Picture picture,
                                      std::vector<SuperOperator> elements,
                                      std::vector<std::vector<int>> table);
  /// One-parameter semigroups t -> exp(t L_i) with commuting L_i.
  static SemigroupAction continuous(const TracialAlgebra& A, Picture picture,
                                    std::vector<Matrix> generators);

  const TracialAlgebra& algebra() const noexcept { return algebra_; }
  Picture picture() const noexcept { return picture_; }
  const FolnerScheme& scheme() const noexcept { return scheme_; }
  /// Discrete generators, group elements, or the unit-time maps exp(L_i).
  const std::vector<SuperOperator>& generators() const noexcept { return generators_; }
  const std::vector<SuperOperator>& inverses() const noexcept { return inverses_; }
  const std::vector<std::vector<int>>& group_table() const noexcept { return table_; }
  const std::vector<Matrix>& continuous_generators() const noexcept { return rates_; }
  int dimension() const noexcept { return scheme_.d; }

  const CheckReport& commuting() const noexcept { return commuting_; }
  const CheckReport& semigroup_law() const noexcept { return semigroup_law_; }
  /// Worst contraction verdict over the generators, evaluated on M.
  const CheckReport& contraction() const noexcept { return contraction_; }
  /// True when some generator is only positivity-sampled.
  bool sampled_positivity() const;

  SemigroupAction dual() const;
  SemigroupAction in_picture(Picture p) const;

  /// Lamperti check of the density-picture generators; the result is kept on
  /// the action and survives dual().
  const CheckReport& attest_lamperti(int trials, std::uint64_t seed);
  const std::optional<CheckReport>& lamperti() const noexcept { return lamperti_; }

 private:
  void run_structural_checks();

  TracialAlgebra algebra_;
  Picture picture_ = Picture::heisenberg;
  FolnerScheme scheme_;
  std::vector<SuperOperator> generators_;
  std::vector<SuperOperator> inverses_;
  std::vector<std::vector<int>> table_;
  std::vector<Matrix> rates_;
  CheckReport commuting_;
  CheckReport semigroup_law_;
  CheckReport contraction_;
  std::optional<CheckReport> lamperti_;
};

struct FolnerSet {
  /// Integer points, or group indices as one-element vectors.
  std::vector<std::vector<int>> points;
  /// r-plus-cube: no enumeration, the window is [0, side)^d.
  bool continuous = false;
  double side = 0.0;
  int d = 1;
};

FolnerSet folner_set(const FolnerScheme& scheme, int a);
/// m(K_a symmetric-difference (K_a + g)) / m(K_a).
double folner_ratio(const FolnerScheme& scheme, double a, const std::vector<int>& shift);

/// A_a(x) via per-axis Cesaro sums. Discrete schemes need integer a >= 1;
/// `steps` is the Simpson panel count used by r-plus-cube when a generator
/// is not diagonalizable.
Operator average(const SemigroupAction& action, const Operator& x, double a,
                 int steps = 256);
/// Superoperator of A_a in the action's picture.
SuperOperator average_super(const SemigroupAction& action, double a, int steps = 256);
/// Literal sum over the Folner window, for cross-checks at small a.
Operator average_enumerated(const SemigroupAction& action, const Operator& x, int a);

struct ContinuousAverage {
  Operator value;
  double error_estimate = 0.0;
  /// True when every axis used the eigenvalue closed form.
  bool closed_form = true;
};

ContinuousAverage continuous_average(const SemigroupAction& action,
                                     const Operator& x, double a, int steps = 256);

/// Images of x under the window elements used for convex-hull tests:
/// exponents {0..a}^d, {-a..a}^d, the whole group, or integer times {0..a}^d.
std::vector<Operator> orbit(const SemigroupAction& action, const Operator& x, int a);

/// (1/n) sum_{k<n} U^k xi.
Vector orbit_average_vector(const Matrix& unitary, const Vector& xi, int n);

}  // namespace ncerg

#endif
