#ifndef NCERG_ALGEBRA_HPP
#define NCERG_ALGEBRA_HPP

// Finite-dimensional tracial von Neumann algebras M = M_{n_1} + ... + M_{n_k}
// with trace tau(x) = sum_i w_i tr(x_i), their elements, and the spectral
// calculus every other module is built on.

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ncerg/error.hpp"

namespace ncerg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

class TracialAlgebra {
 public:
  TracialAlgebra() = default;
  /// Throws Error(validation) on empty blocks, n_i < 1, w_i <= 0, or an
  /// unnormalized weight vector when `normalized` is set.
  TracialAlgebra(std::vector<int> blocks, std::vector<double> weights,
                 bool normalized);

  /// M_n with the normalized trace tr/n.
  static TracialAlgebra matrix_algebra(int n);
  /// C^n with uniform weights 1/n.
  static TracialAlgebra diagonal(int n);
  /// C^n with the given point masses.
  static TracialAlgebra diagonal(std::vector<double> weights);

  const std::vector<int>& blocks() const noexcept { return blocks_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool normalized() const noexcept { return normalized_; }

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  int block_dim(std::size_t b) const { return blocks_.at(b); }
  double weight(std::size_t b) const { return weights_.at(b); }

  /// Dimension of the underlying Hilbert space, sum n_i.
  int hilbert_dim() const noexcept { return hilbert_dim_; }
  /// Dimension of the algebra as a vector space, sum n_i^2.
  int dim() const noexcept { return dim_; }
  /// Offset of block b in the vectorization (block-major, column-stacked).
  int vec_offset(std::size_t b) const { return vec_offsets_.at(b); }
  /// Offset of block b along the Hilbert space diagonal.
  int hilbert_offset(std::size_t b) const { return hilbert_offsets_.at(b); }
  bool commutative() const noexcept;
  /// tau(1) = sum w_i n_i.
  double total_mass() const noexcept;

  bool operator==(const TracialAlgebra& other) const {
    return blocks_ == other.blocks_ && weights_ == other.weights_ &&
           normalized_ == other.normalized_;
  }

 private:
  std::vector<int> blocks_;
  std::vector<double> weights_;
  bool normalized_ = false;
  int hilbert_dim_ = 0;
  int dim_ = 0;
  std::vector<int> vec_offsets_;
  std::vector<int> hilbert_offsets_;
};

/// A block-diagonal element. Serves as x in M and as a density X in L^1(M, tau)
/// depending on which norm is applied. Immutable once built.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::vector<Matrix> blocks);
  Operator(const Operator& other);
  Operator(Operator&& other) noexcept;
  Operator& operator=(const Operator& other);
  Operator& operator=(Operator&& other) noexcept;

  static Operator zero(const TracialAlgebra& A);
  static Operator identity(const TracialAlgebra& A);
  /// Inverse of vec(): block-major, each block column-stacked.
  static Operator from_vec(const TracialAlgebra& A, const Vector& v);
  /// Diagonal blocks of a full hilbert_dim x hilbert_dim matrix; off-block
  /// entries must vanish.
  static Operator from_dense(const TracialAlgebra& A, const Matrix& m);
  static Operator diagonal(const TracialAlgebra& A,
                           const std::vector<double>& entries);

  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t b) const { return blocks_.at(b); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }

  Vector vec() const;
  Matrix dense() const;
  Operator adjoint() const;
  bool same_shape(const Operator& other) const noexcept;

  /// Cached: ||x - x*|| <= 1e-12 ||x||.
  bool hermitian() const;
  /// Cached: hermitian within 1e-10 and min eigenvalue >= -1e-10 ||x||.
  bool positive() const;

  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator operator*(Complex s) const;
  Operator operator*(double s) const { return (*this) * Complex(s, 0.0); }

 private:
  std::vector<Matrix> blocks_;
  // -1 unknown, 0 false, 1 true. Recomputation is idempotent.
  mutable std::atomic<signed char> hermitian_{-1};
  mutable std::atomic<signed char> positive_{-1};
};

inline Operator operator*(double s, const Operator& x) { return x * s; }

bool conforms(const TracialAlgebra& A, const Operator& x) noexcept;
void require_conforms(const TracialAlgebra& A, const Operator& x,
                      const char* what);

/// Half-open [lo, hi) by default; endpoints may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = false;

  static Interval half_open(double lo, double hi) { return {lo, hi, true, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  /// (lo, inf)
  static Interval above(double lo) {
    return {lo, std::numeric_limits<double>::infinity(), false, false};
  }
  /// [lo, inf)
  static Interval at_least(double lo) {
    return {lo, std::numeric_limits<double>::infinity(), true, false};
  }
  /// Values within `tol` of an endpoint count as sitting on it.
  bool contains(double v, double tol) const noexcept;
};

class Projection {
 public:
  Projection() = default;
  /// Validates e^2 = e, e = e* (1e-10) and spectrum within 1e-8 of {0,1}.
  static Projection from_operator(const Operator& e);
  static Projection zero(const TracialAlgebra& A);
  static Projection identity(const TracialAlgebra& A);
  /// For spectral constructions that are projections by construction.
  static Projection unchecked(Operator e, std::vector<int> ranks) {
    return Projection(std::move(e), std::move(ranks));
  }

  const Operator& op() const noexcept { return op_; }
  const std::vector<int>& ranks() const noexcept { return ranks_; }
  int rank() const noexcept;
  bool is_zero() const noexcept { return rank() == 0; }
  Projection complement() const;

 private:
  Projection(Operator op, std::vector<int> ranks)
      : op_(std::move(op)), ranks_(std::move(ranks)) {}

  Operator op_;
  std::vector<int> ranks_;
};

struct SpectralComponent {
  double value;
  Projection projection;
};

Complex trace(const TracialAlgebra& A, const Operator& x);
/// tau(|x|).
double trace_norm(const TracialAlgebra& A, const Operator& x);
/// Largest singular value over all blocks.
double op_norm(const Operator& x);
/// Unweighted Frobenius norm of the vectorization.
double hs_norm(const Operator& x);
/// (x* x)^{1/2}
Operator abs(const Operator& x);
Operator hermitian_part(const Operator& x);
double min_eigenvalue(const Operator& h);

/// Eigenvalues ascending, clusters merged at gap <= 1e-10 ||h||. The
/// projections are mutually orthogonal and sum to 1.
std::vector<SpectralComponent> spectral_decompose(const TracialAlgebra& A,
                                                  const Operator& h);
/// chi_I(h). Eigenvalues within 1e-10 of an endpoint follow the interval's
/// closedness at that endpoint.
Projection spectral_projection(const TracialAlgebra& A, const Operator& h,
                               const Interval& interval);
/// s(x) = chi_(theta, inf)(x), theta = 1e-10 max(lambda_max, 1).
Projection support(const TracialAlgebra& A, const Operator& x);
/// tau(chi_(eps, inf)(|x|)).
double distribution(const TracialAlgebra& A, const Operator& x, double eps);
/// min spec(y - x) >= -1e-9 (||x|| + ||y|| + 1).
bool order_leq(const Operator& x, const Operator& y);

// Seeded generators shared by the checks and the tests.
Matrix random_gaussian(int rows, int cols, Rng& rng);
Matrix random_unitary(int n, Rng& rng);
Operator random_operator(const TracialAlgebra& A, Rng& rng);
Operator random_hermitian(const TracialAlgebra& A, Rng& rng);
Operator random_positive(const TracialAlgebra& A, Rng& rng);
/// Full-rank density with tau(Y) = 1.
Operator random_faithful_density(const TracialAlgebra& A, Rng& rng);
/// 1 / tau(1).
Operator uniform_density(const TracialAlgebra& A);

}  // namespace ncerg

#endif
