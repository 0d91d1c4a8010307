#include "ncerg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncerg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::not_hermitian: return "not-hermitian";
    case ErrorCode::not_positive: return "not-positive";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::validation: return "validation";
    case ErrorCode::schema: return "schema";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr double kClusterGap = 1e-10;
constexpr double kBoundaryTol = 1e-10;

double block_op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

// ---------------------------------------------------------------------------
// TracialAlgebra

TracialAlgebra::TracialAlgebra(std::vector<int> blocks,
                               std::vector<double> weights, bool normalized)
    : blocks_(std::move(blocks)), weights_(std::move(weights)),
      normalized_(normalized) {
  if (blocks_.empty()) raise(ErrorCode::validation, "algebra has no blocks");
  if (blocks_.size() != weights_.size()) {
    std::ostringstream os;
    os << "algebra has " << blocks_.size() << " blocks but " << weights_.size()
       << " weights";
    raise(ErrorCode::validation, os.str());
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b] < 1) {
      raise(ErrorCode::validation,
            "block " + std::to_string(b) + " has dimension < 1");
    }
    if (!(weights_[b] > 0.0) || !std::isfinite(weights_[b])) {
      raise(ErrorCode::validation,
            "block " + std::to_string(b) + " has non-positive trace weight");
    }
  }
  if (normalized_ && std::abs(total_mass() - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "normalized algebra has tau(1) = " << total_mass();
    raise(ErrorCode::validation, os.str());
  }
  int voff = 0;
  int hoff = 0;
  for (int n : blocks_) {
    vec_offsets_.push_back(voff);
    hilbert_offsets_.push_back(hoff);
    voff += n * n;
    hoff += n;
  }
  dim_ = voff;
  hilbert_dim_ = hoff;
}

TracialAlgebra TracialAlgebra::matrix_algebra(int n) {
  return TracialAlgebra({n}, {1.0 / n}, true);
}

TracialAlgebra TracialAlgebra::diagonal(int n) {
  return TracialAlgebra(std::vector<int>(n, 1), std::vector<double>(n, 1.0 / n),
                        true);
}

TracialAlgebra TracialAlgebra::diagonal(std::vector<double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const std::size_t n = weights.size();
  return TracialAlgebra(std::vector<int>(n, 1), std::move(weights),
                        std::abs(sum - 1.0) <= 1e-12);
}

bool TracialAlgebra::commutative() const noexcept {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](int n) { return n == 1; });
}

double TracialAlgebra::total_mass() const noexcept {
  double s = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) s += weights_[b] * blocks_[b];
  return s;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  for (const auto& m : blocks_) {
    if (m.rows() != m.cols()) {
      raise(ErrorCode::shape_mismatch, "operator block is not square");
    }
  }
}

Operator::Operator(const Operator& other)
    : blocks_(other.blocks_),
      hermitian_(other.hermitian_.load(std::memory_order_relaxed)),
      positive_(other.positive_.load(std::memory_order_relaxed)) {}

Operator::Operator(Operator&& other) noexcept
    : blocks_(std::move(other.blocks_)),
      hermitian_(other.hermitian_.load(std::memory_order_relaxed)),
      positive_(other.positive_.load(std::memory_order_relaxed)) {}

Operator& Operator::operator=(const Operator& other) {
  if (this != &other) {
    blocks_ = other.blocks_;
    hermitian_.store(other.hermitian_.load(std::memory_order_relaxed));
    positive_.store(other.positive_.load(std::memory_order_relaxed));
  }
  return *this;
}

Operator& Operator::operator=(Operator&& other) noexcept {
  blocks_ = std::move(other.blocks_);
  hermitian_.store(other.hermitian_.load(std::memory_order_relaxed));
  positive_.store(other.positive_.load(std::memory_order_relaxed));
  return *this;
}

Operator Operator::zero(const TracialAlgebra& A) {
  std::vector<Matrix> b;
  for (int n : A.blocks()) b.push_back(Matrix::Zero(n, n));
  return Operator(std::move(b));
}

Operator Operator::identity(const TracialAlgebra& A) {
  std::vector<Matrix> b;
  for (int n : A.blocks()) b.push_back(Matrix::Identity(n, n));
  return Operator(std::move(b));
}

Operator Operator::from_vec(const TracialAlgebra& A, const Vector& v) {
  if (v.size() != A.dim()) {
    raise(ErrorCode::shape_mismatch,
          "vector of length " + std::to_string(v.size()) +
              " does not match algebra dimension " + std::to_string(A.dim()));
  }
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < A.num_blocks(); ++i) {
    const int n = A.block_dim(i);
    b.push_back(Eigen::Map<const Matrix>(v.data() + A.vec_offset(i), n, n));
  }
  return Operator(std::move(b));
}

Operator Operator::from_dense(const TracialAlgebra& A, const Matrix& m) {
  const int h = A.hilbert_dim();
  if (m.rows() != h || m.cols() != h) {
    raise(ErrorCode::shape_mismatch,
          "dense matrix is " + std::to_string(m.rows()) + "x" +
              std::to_string(m.cols()) + ", algebra acts on dimension " +
              std::to_string(h));
  }
  Matrix rest = m;
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < A.num_blocks(); ++i) {
    const int off = A.hilbert_offset(i);
    const int n = A.block_dim(i);
    b.push_back(m.block(off, off, n, n));
    rest.block(off, off, n, n).setZero();
  }
  if (rest.norm() > 1e-12 * std::max(1.0, m.norm())) {
    raise(ErrorCode::shape_mismatch,
          "dense matrix has entries outside the algebra's diagonal blocks");
  }
  return Operator(std::move(b));
}

Operator Operator::diagonal(const TracialAlgebra& A,
                            const std::vector<double>& entries) {
  if (static_cast<int>(entries.size()) != A.hilbert_dim()) {
    raise(ErrorCode::shape_mismatch, "diagonal entry count mismatch");
  }
  Matrix m = Matrix::Zero(A.hilbert_dim(), A.hilbert_dim());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return from_dense(A, m);
}

Vector Operator::vec() const {
  Eigen::Index total = 0;
  for (const auto& m : blocks_) total += m.size();
  Vector v(total);
  Eigen::Index off = 0;
  for (const auto& m : blocks_) {
    v.segment(off, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
    off += m.size();
  }
  return v;
}

Matrix Operator::dense() const {
  Eigen::Index h = 0;
  for (const auto& m : blocks_) h += m.rows();
  Matrix d = Matrix::Zero(h, h);
  Eigen::Index off = 0;
  for (const auto& m : blocks_) {
    d.block(off, off, m.rows(), m.cols()) = m;
    off += m.rows();
  }
  return d;
}

Operator Operator::adjoint() const {
  std::vector<Matrix> b;
  for (const auto& m : blocks_) b.push_back(m.adjoint());
  return Operator(std::move(b));
}

bool Operator::same_shape(const Operator& other) const noexcept {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != other.blocks_[i].rows()) return false;
  }
  return true;
}

bool Operator::hermitian() const {
  signed char c = hermitian_.load(std::memory_order_relaxed);
  if (c < 0) {
    double diff = 0.0;
    double norm = 0.0;
    for (const auto& m : blocks_) {
      diff = std::max(diff, (m - m.adjoint()).norm());
      norm = std::max(norm, m.norm());
    }
    c = diff <= 1e-12 * norm ? 1 : 0;
    hermitian_.store(c, std::memory_order_relaxed);
  }
  return c == 1;
}

bool Operator::positive() const {
  signed char c = positive_.load(std::memory_order_relaxed);
  if (c < 0) {
    double diff = 0.0;
    double norm = 0.0;
    double min_eig = 0.0;
    for (const auto& m : blocks_) {
      diff = std::max(diff, (m - m.adjoint()).norm());
      norm = std::max(norm, m.norm());
    }
    bool ok = diff <= 1e-10 * std::max(norm, 1e-300);
    if (ok) {
      for (const auto& m : blocks_) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m),
                                                 Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues()(0));
      }
      ok = min_eig >= -1e-10 * norm;
    }
    c = ok ? 1 : 0;
    positive_.store(c, std::memory_order_relaxed);
  }
  return c == 1;
}

namespace {

void require_same_shape(const Operator& a, const Operator& b) {
  if (!a.same_shape(b)) {
    raise(ErrorCode::shape_mismatch, "operators have different block shapes");
  }
}

}  // namespace

Operator Operator::operator+(const Operator& o) const {
  require_same_shape(*this, o);
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < blocks_.size(); ++i) b.push_back(blocks_[i] + o.blocks_[i]);
  return Operator(std::move(b));
}

Operator Operator::operator-(const Operator& o) const {
  require_same_shape(*this, o);
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < blocks_.size(); ++i) b.push_back(blocks_[i] - o.blocks_[i]);
  return Operator(std::move(b));
}

Operator Operator::operator*(const Operator& o) const {
  require_same_shape(*this, o);
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < blocks_.size(); ++i) b.push_back(blocks_[i] * o.blocks_[i]);
  return Operator(std::move(b));
}

Operator Operator::operator*(Complex s) const {
  std::vector<Matrix> b;
  for (const auto& m : blocks_) b.push_back(m * s);
  return Operator(std::move(b));
}

bool conforms(const TracialAlgebra& A, const Operator& x) noexcept {
  if (x.num_blocks() != A.num_blocks()) return false;
  for (std::size_t i = 0; i < A.num_blocks(); ++i) {
    if (x.block(i).rows() != A.block_dim(i)) return false;
  }
  return true;
}

void require_conforms(const TracialAlgebra& A, const Operator& x,
                      const char* what) {
  if (!conforms(A, x)) {
    std::ostringstream os;
    os << what << ": operator shape [";
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
      os << (i ? "," : "") << x.block(i).rows();
    }
    os << "] does not match algebra blocks [";
    for (std::size_t i = 0; i < A.num_blocks(); ++i) {
      os << (i ? "," : "") << A.block_dim(i);
    }
    os << "]";
    raise(ErrorCode::shape_mismatch, os.str());
  }
}

// ---------------------------------------------------------------------------
// Interval, Projection

bool Interval::contains(double v, double tol) const noexcept {
  if (std::isfinite(lo) && std::abs(v - lo) <= tol) return lo_closed;
  if (std::isfinite(hi) && std::abs(v - hi) <= tol) return hi_closed;
  return v > lo && v < hi;
}

Projection Projection::from_operator(const Operator& e) {
  std::vector<int> ranks;
  for (const auto& m : e.blocks()) {
    if ((m * m - m).norm() > 1e-10) {
      raise(ErrorCode::validation, "operator is not idempotent");
    }
    if ((m - m.adjoint()).norm() > 1e-10) {
      raise(ErrorCode::validation, "operator is not self-adjoint");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
    int r = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double l = es.eigenvalues()(k);
      if (std::abs(l - 1.0) <= 1e-8) {
        ++r;
      } else if (std::abs(l) > 1e-8) {
        raise(ErrorCode::validation, "operator has spectrum outside {0, 1}");
      }
    }
    ranks.push_back(r);
  }
  return Projection(e, std::move(ranks));
}

Projection Projection::zero(const TracialAlgebra& A) {
  return Projection(Operator::zero(A), std::vector<int>(A.num_blocks(), 0));
}

Projection Projection::identity(const TracialAlgebra& A) {
  return Projection(Operator::identity(A), A.blocks());
}

int Projection::rank() const noexcept {
  return std::accumulate(ranks_.begin(), ranks_.end(), 0);
}

Projection Projection::complement() const {
  std::vector<Matrix> b;
  std::vector<int> r;
  for (std::size_t i = 0; i < op_.num_blocks(); ++i) {
    const auto& m = op_.block(i);
    b.push_back(Matrix::Identity(m.rows(), m.cols()) - m);
    r.push_back(static_cast<int>(m.rows()) - ranks_[i]);
  }
  return Projection(Operator(std::move(b)), std::move(r));
}

// ---------------------------------------------------------------------------
// Traces and norms

Complex trace(const TracialAlgebra& A, const Operator& x) {
  require_conforms(A, x, "trace");
  Complex s = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    s += A.weight(b) * x.block(b).trace();
  }
  return s;
}

double trace_norm(const TracialAlgebra& A, const Operator& x) {
  require_conforms(A, x, "trace_norm");
  double s = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(x.block(b));
    s += A.weight(b) * svd.singularValues().sum();
  }
  return s;
}

double op_norm(const Operator& x) {
  double n = 0.0;
  for (const auto& m : x.blocks()) n = std::max(n, block_op_norm(m));
  return n;
}

double hs_norm(const Operator& x) {
  double s = 0.0;
  for (const auto& m : x.blocks()) s += m.squaredNorm();
  return std::sqrt(s);
}

Operator abs(const Operator& x) {
  std::vector<Matrix> b;
  for (const auto& m : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Matrix& v = svd.matrixV();
    b.push_back(hermitize(v * svd.singularValues().cast<Complex>().asDiagonal() *
                          v.adjoint()));
  }
  return Operator(std::move(b));
}

Operator hermitian_part(const Operator& x) {
  std::vector<Matrix> b;
  for (const auto& m : x.blocks()) b.push_back(hermitize(m));
  return Operator(std::move(b));
}

namespace {

void require_hermitian(const Operator& h, const char* what) {
  double diff = 0.0;
  double norm = 0.0;
  for (const auto& m : h.blocks()) {
    diff = std::max(diff, (m - m.adjoint()).norm());
    norm = std::max(norm, m.norm());
  }
  if (diff > 1e-9 * std::max(1.0, norm)) {
    raise(ErrorCode::not_hermitian, std::string(what) + ": operator is not hermitian");
  }
}

struct EigenPair {
  double value;
  std::size_t block;
  Vector vector;
};

}  // namespace

double min_eigenvalue(const Operator& h) {
  require_hermitian(h, "min_eigenvalue");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : h.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(b), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

std::vector<SpectralComponent> spectral_decompose(const TracialAlgebra& A,
                                                  const Operator& h) {
  require_conforms(A, h, "spectral_decompose");
  require_hermitian(h, "spectral_decompose");

  std::vector<EigenPair> pairs;
  double norm = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h.block(b)));
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      pairs.push_back({es.eigenvalues()(k), b, es.eigenvectors().col(k)});
      norm = std::max(norm, std::abs(es.eigenvalues()(k)));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) {
                     return a.value < b.value;
                   });

  const double gap = kClusterGap * norm;
  std::vector<SpectralComponent> out;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() && pairs[end].value - pairs[end - 1].value <= gap) {
      ++end;
    }
    std::vector<Matrix> blocks;
    for (int n : A.blocks()) blocks.push_back(Matrix::Zero(n, n));
    std::vector<int> ranks(A.num_blocks(), 0);
    double mean = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      blocks[pairs[k].block] += pairs[k].vector * pairs[k].vector.adjoint();
      ranks[pairs[k].block] += 1;
      mean += pairs[k].value;
    }
    mean /= static_cast<double>(end - start);
    out.push_back({mean, Projection::unchecked(Operator(std::move(blocks)),
                                               std::move(ranks))});
    start = end;
  }
  return out;
}

Projection spectral_projection(const TracialAlgebra& A, const Operator& h,
                               const Interval& interval) {
  const auto parts = spectral_decompose(A, h);
  std::vector<Matrix> blocks;
  for (int n : A.blocks()) blocks.push_back(Matrix::Zero(n, n));
  std::vector<int> ranks(A.num_blocks(), 0);
  for (const auto& c : parts) {
    if (!interval.contains(c.value, kBoundaryTol)) continue;
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      blocks[b] += c.projection.op().block(b);
      ranks[b] += c.projection.ranks()[b];
    }
  }
  return Projection::unchecked(Operator(std::move(blocks)), std::move(ranks));
}

Projection support(const TracialAlgebra& A, const Operator& x) {
  require_conforms(A, x, "support");
  if (!x.positive()) raise(ErrorCode::not_positive, "support: operator is not positive");
  double lmax = 0.0;
  for (const auto& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(b), Eigen::EigenvaluesOnly);
    lmax = std::max(lmax, es.eigenvalues()(es.eigenvalues().size() - 1));
  }
  const double theta = 1e-10 * std::max(lmax, 1.0);
  return spectral_projection(A, x, Interval::above(theta));
}

double distribution(const TracialAlgebra& A, const Operator& x, double eps) {
  if (!(eps > 0.0)) raise(ErrorCode::invalid_argument, "distribution: eps must be > 0");
  const Projection p = spectral_projection(A, abs(x), Interval::above(eps));
  return trace(A, p.op()).real();
}

bool order_leq(const Operator& x, const Operator& y) {
  require_hermitian(x, "order_leq");
  require_hermitian(y, "order_leq");
  const double bound = -1e-9 * (op_norm(x) + op_norm(y) + 1.0);
  return min_eigenvalue(y - x) >= bound;
}

// ---------------------------------------------------------------------------
// Random elements

Matrix random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

Matrix random_unitary(int n, Rng& rng) {
  const Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

Operator random_operator(const TracialAlgebra& A, Rng& rng) {
  std::vector<Matrix> b;
  for (int n : A.blocks()) b.push_back(random_gaussian(n, n, rng));
  return Operator(std::move(b));
}

Operator random_hermitian(const TracialAlgebra& A, Rng& rng) {
  return hermitian_part(random_operator(A, rng));
}

Operator random_positive(const TracialAlgebra& A, Rng& rng) {
  const Operator g = random_operator(A, rng);
  return hermitian_part(g * g.adjoint());
}

Operator random_faithful_density(const TracialAlgebra& A, Rng& rng) {
  const Operator p = random_positive(A, rng) + Operator::identity(A) * 0.1;
  return p * (1.0 / trace(A, p).real());
}

Operator uniform_density(const TracialAlgebra& A) {
  return Operator::identity(A) * (1.0 / A.total_mass());
}

}  // namespace ncerg
