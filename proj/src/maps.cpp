#include "ncerg/maps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace ncerg {

const char* to_string(MapSource s) noexcept {
  switch (s) {
    case MapSource::kraus: return "kraus";
    case MapSource::matrix: return "matrix";
    case MapSource::classical: return "classical";
    case MapSource::conjugation: return "conjugation";
    case MapSource::generator: return "generator";
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

constexpr double kOffBlockTol = 1e-10;

// Weight of the block owning each vectorization index, and the index of the
// transposed entry.
struct VecLayout {
  std::vector<double> weight;
  std::vector<int> transpose;
};

VecLayout layout(const TracialAlgebra& A) {
  VecLayout l;
  l.weight.resize(A.dim());
  l.transpose.resize(A.dim());
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const int n = A.block_dim(b);
    const int off = A.vec_offset(b);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        l.weight[off + i + j * n] = A.weight(b);
        l.transpose[off + i + j * n] = off + j + i * n;
      }
    }
  }
  return l;
}

// Superoperator of a map given on full Hilbert-space matrices. Throws if the
// map leaks out of the block-diagonal algebra.
Matrix matrix_from_action(const TracialAlgebra& A,
                          const std::function<Matrix(const Matrix&)>& f,
                          const char* what) {
  const int D = A.dim();
  const int H = A.hilbert_dim();
  Matrix G = Matrix::Zero(D, D);
  double leak = 0.0;
  double scale = 0.0;
  for (std::size_t bq = 0; bq < A.num_blocks(); ++bq) {
    const int n = A.block_dim(bq);
    const int hoff = A.hilbert_offset(bq);
    for (int q = 0; q < n; ++q) {
      for (int p = 0; p < n; ++p) {
        Matrix e = Matrix::Zero(H, H);
        e(hoff + p, hoff + q) = 1.0;
        Matrix out = f(e);
        const int col = A.vec_offset(bq) + p + q * n;
        scale = std::max(scale, out.norm());
        for (std::size_t b = 0; b < A.num_blocks(); ++b) {
          const int m = A.block_dim(b);
          const int ho = A.hilbert_offset(b);
          const int vo = A.vec_offset(b);
          for (int s = 0; s < m; ++s) {
            for (int r = 0; r < m; ++r) G(vo + r + s * m, col) = out(ho + r, ho + s);
          }
          out.block(ho, ho, m, m).setZero();
        }
        leak = std::max(leak, out.norm());
      }
    }
  }
  if (leak > kOffBlockTol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << what << ": map sends algebra elements outside the block structure "
       << "(off-block mass " << leak << ")";
    raise(ErrorCode::shape_mismatch, os.str());
  }
  return G;
}

void require_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << what << ": expected " << n << "x" << n << ", got " << m.rows() << "x"
       << m.cols();
    raise(ErrorCode::shape_mismatch, os.str());
  }
}

CheckReport carried(const std::string& name, const std::string& detail) {
  CheckReport r;
  r.name = name;
  r.verdict = Verdict::pass;
  r.detail = detail;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

SuperOperator::SuperOperator(TracialAlgebra algebra, Matrix matrix,
                             MapSource source)
    : algebra_(std::move(algebra)), matrix_(std::move(matrix)), source_(source) {
  require_square(matrix_, algebra_.dim(), "superoperator");
}

SuperOperator SuperOperator::identity(const TracialAlgebra& A) {
  SuperOperator s(A, Matrix::Identity(A.dim(), A.dim()), MapSource::matrix);
  s.set_kraus({Matrix::Identity(A.hilbert_dim(), A.hilbert_dim())});
  s.attest(carried(kCompletePositivity, "identity"));
  s.attest(check_subunital(s));
  return s;
}

Verdict SuperOperator::attested(const std::string& key) const {
  auto it = attestations_.find(key);
  return it == attestations_.end() ? Verdict::unknown : it->second.verdict;
}

bool SuperOperator::positive_attested() const {
  return attested(kCompletePositivity) == Verdict::pass ||
         attested(kPositivitySampled) == Verdict::pass;
}

void SuperOperator::attest(CheckReport report) {
  std::string key = report.name;
  attestations_[key] = std::move(report);
}

Operator SuperOperator::apply(const Operator& x) const {
  require_conforms(algebra_, x, "apply");
  return Operator::from_vec(algebra_, matrix_ * x.vec());
}

SuperOperator compose(const SuperOperator& outer, const SuperOperator& inner) {
  if (!(outer.algebra() == inner.algebra())) {
    raise(ErrorCode::shape_mismatch, "compose: maps act on different algebras");
  }
  SuperOperator s(outer.algebra(), outer.matrix() * inner.matrix(),
                  MapSource::matrix);
  if (!outer.kraus().empty() && !inner.kraus().empty()) {
    std::vector<Matrix> k;
    for (const auto& ki : inner.kraus()) {
      for (const auto& ko : outer.kraus()) k.push_back(ki * ko);
    }
    s.set_kraus(std::move(k));
  }
  if (outer.attested(kCompletePositivity) == Verdict::pass &&
      inner.attested(kCompletePositivity) == Verdict::pass) {
    s.attest(carried(kCompletePositivity, "composition of completely positive maps"));
  } else if (outer.positive_attested() && inner.positive_attested()) {
    s.attest(carried(kPositivitySampled, "composition of positive maps"));
  }
  s.attest(check_subunital(s));
  return s;
}

SuperOperator convex_combination(const std::vector<double>& coefficients,
                                 const std::vector<SuperOperator>& maps) {
  if (maps.empty() || coefficients.size() != maps.size()) {
    raise(ErrorCode::invalid_argument,
          "convex_combination: need one coefficient per map");
  }
  const TracialAlgebra& A = maps.front().algebra();
  Matrix G = Matrix::Zero(A.dim(), A.dim());
  bool all_kraus = true;
  bool all_cp = true;
  bool all_pos = true;
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (!(maps[k].algebra() == A)) {
      raise(ErrorCode::shape_mismatch, "convex_combination: algebra mismatch");
    }
    if (!(coefficients[k] >= 0.0)) {
      raise(ErrorCode::invalid_argument,
            "convex_combination: coefficient " + std::to_string(k) + " is negative");
    }
    G += coefficients[k] * maps[k].matrix();
    all_kraus = all_kraus && !maps[k].kraus().empty();
    all_cp = all_cp && maps[k].attested(kCompletePositivity) == Verdict::pass;
    all_pos = all_pos && maps[k].positive_attested();
    for (const auto& K : maps[k].kraus()) kraus.push_back(std::sqrt(coefficients[k]) * K);
  }
  SuperOperator s(A, std::move(G), all_kraus ? MapSource::kraus : MapSource::matrix);
  if (all_kraus) s.set_kraus(std::move(kraus));
  if (all_cp) {
    s.attest(carried(kCompletePositivity, "combination of completely positive maps"));
  } else if (all_pos) {
    s.attest(carried(kPositivitySampled, "combination of positive maps"));
  }
  s.attest(check_subunital(s));
  return s;
}

// ---------------------------------------------------------------------------
// Constructors

SuperOperator from_kraus(const TracialAlgebra& A, const std::vector<Matrix>& kraus) {
  if (kraus.empty()) raise(ErrorCode::invalid_argument, "from_kraus: empty Kraus list");
  const int H = A.hilbert_dim();
  for (std::size_t j = 0; j < kraus.size(); ++j) {
    require_square(kraus[j], H, ("Kraus operator " + std::to_string(j)).c_str());
  }
  Matrix G = matrix_from_action(
      A,
      [&](const Matrix& x) {
        Matrix y = Matrix::Zero(H, H);
        for (const auto& K : kraus) y += K.adjoint() * x * K;
        return y;
      },
      "from_kraus");
  SuperOperator s(A, std::move(G), MapSource::kraus);
  s.set_kraus(kraus);
  s.attest(carried(kCompletePositivity, "Kraus form"));
  s.attest(check_subunital(s));
  return s;
}

SuperOperator from_classical(const TracialAlgebra& A, const RealMatrix& kernel) {
  if (!A.commutative()) {
    raise(ErrorCode::invalid_argument, "from_classical: algebra is not commutative");
  }
  const int n = A.hilbert_dim();
  if (kernel.rows() != n || kernel.cols() != n) {
    std::ostringstream os;
    os << "from_classical: kernel is " << kernel.rows() << "x" << kernel.cols()
       << ", algebra has " << n << " points";
    raise(ErrorCode::shape_mismatch, os.str());
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double k = kernel(i, j);
      if (!std::isfinite(k) || k < 0.0) {
        std::ostringstream os;
        os << "from_classical: kernel entry [" << i << "][" << j << "] = " << k
           << " is negative";
        raise(ErrorCode::validation, os.str());
      }
      row += k;
    }
    if (row > 1.0 + 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "from_classical: kernel row " << i << " sums to " << row << " > 1";
      raise(ErrorCode::validation, os.str());
    }
  }
  SuperOperator s(A, kernel.cast<Complex>(), MapSource::classical);
  s.attest(carried(kCompletePositivity, "nonnegative kernel on a commutative algebra"));
  s.attest(check_subunital(s));
  return s;
}

Matrix conjugation_matrix(const TracialAlgebra& A, const Matrix& unitary) {
  require_square(unitary, A.hilbert_dim(), "conjugation unitary");
  return matrix_from_action(
      A, [&](const Matrix& x) { return Matrix(unitary * x * unitary.adjoint()); },
      "from_conjugation");
}

SuperOperator from_conjugation(const TracialAlgebra& A, const Matrix& unitary) {
  require_square(unitary, A.hilbert_dim(), "conjugation unitary");
  const double defect =
      (unitary.adjoint() * unitary - Matrix::Identity(unitary.rows(), unitary.cols()))
          .norm();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "from_conjugation: ||U*U - 1|| = " << defect << " exceeds 1e-10";
    raise(ErrorCode::invalid_argument, os.str());
  }
  SuperOperator s(A, conjugation_matrix(A, unitary), MapSource::conjugation);
  s.set_kraus({unitary.adjoint()});
  s.set_unitary(unitary);
  s.attest(carried(kCompletePositivity, "unitary conjugation"));
  s.attest(check_subunital(s));
  return s;
}

SuperOperator from_matrix(const TracialAlgebra& A, const Matrix& matrix,
                          std::uint64_t seed) {
  SuperOperator s(A, matrix, MapSource::matrix);
  CheckReport cp = check_complete_positivity(s);
  const bool cp_ok = cp.passed();
  s.attest(std::move(cp));
  if (!cp_ok) s.attest(check_positivity_sampled(s, 200, seed));
  s.attest(check_subunital(s));
  return s;
}

Matrix lindblad_generator(const TracialAlgebra& A, const Matrix& hamiltonian,
                          const std::vector<Matrix>& jumps) {
  const int H = A.hilbert_dim();
  require_square(hamiltonian, H, "hamiltonian");
  if ((hamiltonian - hamiltonian.adjoint()).norm() > 1e-10) {
    raise(ErrorCode::not_hermitian, "lindblad_generator: hamiltonian is not hermitian");
  }
  Matrix jj = Matrix::Zero(H, H);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    require_square(jumps[k], H, ("jump operator " + std::to_string(k)).c_str());
    jj += jumps[k].adjoint() * jumps[k];
  }
  const Complex i(0.0, 1.0);
  return matrix_from_action(
      A,
      [&](const Matrix& x) {
        Matrix y = i * (hamiltonian * x - x * hamiltonian);
        for (const auto& J : jumps) y += J.adjoint() * x * J;
        y -= 0.5 * (jj * x + x * jj);
        return y;
      },
      "lindblad_generator");
}

// ---------------------------------------------------------------------------
// Duality

Matrix dual_matrix(const TracialAlgebra& A, const Matrix& m) {
  require_square(m, A.dim(), "dual");
  const VecLayout l = layout(A);
  const int D = A.dim();
  Matrix d(D, D);
  for (int c = 0; c < D; ++c) {
    for (int r = 0; r < D; ++r) {
      d(r, c) = m(l.transpose[c], l.transpose[r]) * (l.weight[c] / l.weight[r]);
    }
  }
  return d;
}

SuperOperator dual(const SuperOperator& map) {
  const TracialAlgebra& A = map.algebra();
  SuperOperator s(A, dual_matrix(A, map.matrix()), map.source());
  if (!map.kraus().empty()) {
    // Heisenberg Kraus of the dual: W^{1/2} K* P_b w_b^{-1/2}, one per block.
    const int H = A.hilbert_dim();
    Eigen::VectorXd sqrt_w(H);
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      sqrt_w.segment(A.hilbert_offset(b), A.block_dim(b)).setConstant(std::sqrt(A.weight(b)));
    }
    std::vector<Matrix> k;
    for (const auto& K : map.kraus()) {
      const Matrix left = sqrt_w.cast<Complex>().asDiagonal() * K.adjoint();
      if (A.num_blocks() == 1) {
        k.push_back(left);
        continue;
      }
      for (std::size_t b = 0; b < A.num_blocks(); ++b) {
        Matrix piece = Matrix::Zero(H, H);
        const int off = A.hilbert_offset(b);
        const int n = A.block_dim(b);
        piece.middleCols(off, n) = left.middleCols(off, n) / std::sqrt(A.weight(b));
        if (piece.norm() > 0.0) k.push_back(std::move(piece));
      }
    }
    s.set_kraus(std::move(k));
  }
  if (map.unitary()) {
    const Matrix ustar = map.unitary()->adjoint();
    if ((conjugation_matrix(A, ustar) - s.matrix()).norm() <= 1e-10 * std::max(1.0, s.matrix().norm())) {
      s.set_unitary(ustar);
    }
  }
  const Verdict cp = map.attested(kCompletePositivity);
  if (cp == Verdict::pass) {
    s.attest(carried(kCompletePositivity, "dual of a completely positive map"));
  } else if (map.positive_attested()) {
    s.attest(carried(kPositivitySampled, "dual of a positive map"));
  }
  s.attest(check_subunital(s));
  return s;
}

// ---------------------------------------------------------------------------
// Checks

double matrix_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

CheckReport check_subunital(const SuperOperator& map) {
  CheckReport r;
  r.name = kSubunital;
  r.tolerances["order"] = 1e-10;
  const TracialAlgebra& A = map.algebra();
  const Operator one = Operator::identity(A);
  const Operator image = map.apply(one);
  double herm = 0.0;
  for (const auto& b : image.blocks()) herm = std::max(herm, (b - b.adjoint()).norm());
  if (herm > 1e-10 * std::max(1.0, op_norm(image))) {
    r.verdict = Verdict::fail;
    r.measured = herm;
    r.detail = "image of 1 is not hermitian";
    r.witnesses.push_back(one);
    return r;
  }
  const Operator h = hermitian_part(image);
  const double top = -min_eigenvalue(h * -1.0);
  r.measured = top;
  if (top <= 1.0 + 1e-10) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::fail;
    r.witnesses.push_back(one);
    std::ostringstream os;
    os.precision(17);
    os << "largest eigenvalue of image of 1 is " << top;
    r.detail = os.str();
  }
  return r;
}

CheckReport check_complete_positivity(const SuperOperator& map) {
  CheckReport r;
  r.name = kCompletePositivity;
  r.tolerances["choi_min_eigenvalue"] = 1e-10;
  const TracialAlgebra& A = map.algebra();
  const int H = A.hilbert_dim();
  double worst = 0.0;
  for (std::size_t bq = 0; bq < A.num_blocks(); ++bq) {
    const int n = A.block_dim(bq);
    Matrix choi = Matrix::Zero(n * H, n * H);
    for (int q = 0; q < n; ++q) {
      for (int p = 0; p < n; ++p) {
        Vector e = Vector::Zero(A.dim());
        e(A.vec_offset(bq) + p + q * n) = 1.0;
        choi.block(p * H, q * H, H, H) = Operator::from_vec(A, map.matrix() * e).dense();
      }
    }
    const double herm = (choi - choi.adjoint()).norm();
    const double scale = std::max(1.0, choi.norm());
    if (herm > 1e-10 * scale) {
      r.verdict = Verdict::fail;
      r.measured = herm;
      r.detail = "Choi matrix is not hermitian (map is not hermiticity preserving)";
      return r;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es((choi + choi.adjoint()) * 0.5,
                                             Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    worst = std::min(worst, lo);
    if (lo < -1e-10 * scale) {
      r.verdict = Verdict::fail;
      r.measured = lo;
      r.detail = "Choi matrix of block " + std::to_string(bq) + " has a negative eigenvalue";
      return r;
    }
  }
  r.verdict = Verdict::pass;
  r.measured = worst;
  return r;
}

CheckReport check_positivity_sampled(const SuperOperator& map, int samples,
                                     std::uint64_t seed) {
  CheckReport r;
  r.name = kPositivitySampled;
  r.samples = samples;
  r.seed = seed;
  r.tolerances["min_eigenvalue"] = 1e-10;
  const TracialAlgebra& A = map.algebra();
  Rng rng(seed);
  const double gnorm = std::max(1.0, matrix_norm(map.matrix()));
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Operator x;
    if (s % 2 == 0) {
      // Rank-one projection inside a random block.
      std::uniform_int_distribution<std::size_t> pick(0, A.num_blocks() - 1);
      const std::size_t b = pick(rng);
      std::vector<Matrix> blocks;
      for (int n : A.blocks()) blocks.push_back(Matrix::Zero(n, n));
      Vector v = random_gaussian(A.block_dim(b), 1, rng).col(0);
      v.normalize();
      blocks[b] = v * v.adjoint();
      x = Operator(std::move(blocks));
    } else {
      x = random_positive(A, rng);
    }
    const Operator y = map.apply(x);
    const double scale = gnorm * std::max(1.0, op_norm(x));
    double herm = 0.0;
    for (const auto& b : y.blocks()) herm = std::max(herm, (b - b.adjoint()).norm());
    double lo = 0.0;
    if (herm <= 1e-10 * scale) lo = min_eigenvalue(hermitian_part(y));
    worst = std::min(worst, lo);
    if (herm > 1e-10 * scale || lo < -1e-10 * scale) {
      r.verdict = Verdict::fail;
      r.measured = herm > 1e-10 * scale ? herm : lo;
      r.witnesses.push_back(x);
      r.detail = herm > 1e-10 * scale ? "image of a positive element is not hermitian"
                                      : "image of a positive element has a negative eigenvalue";
      return r;
    }
  }
  r.verdict = Verdict::pass;
  r.measured = worst;
  return r;
}

CheckReport check_contraction(const SuperOperator& map, std::uint64_t seed) {
  CheckReport r;
  r.name = "contraction";
  r.seed = seed;
  r.tolerances["norm"] = 1e-10;
  const TracialAlgebra& A = map.algebra();
  const Operator one = Operator::identity(A);
  const double image_norm = op_norm(map.apply(one));
  r.measured = image_norm;
  if (image_norm > 1.0 + 1e-10) {
    r.verdict = Verdict::fail;
    r.witnesses.push_back(one);
    std::ostringstream os;
    os.precision(17);
    os << "||Gamma(1)|| = " << image_norm;
    r.detail = os.str();
    return r;
  }
  if (map.attested(kCompletePositivity) == Verdict::pass) {
    r.verdict = Verdict::pass;
    r.detail = "completely positive: norm equals ||Gamma(1)||";
    return r;
  }
  CheckReport pos = check_positivity_sampled(map, 200, seed);
  r.samples = pos.samples;
  if (!pos.passed()) {
    r.verdict = Verdict::fail;
    r.witnesses = pos.witnesses;
    r.detail = "not positive: " + pos.detail;
    return r;
  }
  // Power iteration over hermitian inputs, operator norm ratio of the iterate.
  Rng rng(seed + 1);
  Operator x = random_hermitian(A, rng);
  double ratio = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double nx = op_norm(x);
    if (nx == 0.0) break;
    x = x * (1.0 / nx);
    Operator y = hermitian_part(map.apply(x));
    ratio = std::max(ratio, op_norm(y));
    x = std::move(y);
  }
  r.measured = std::max(image_norm, ratio);
  if (ratio > 1.0 + 1e-10) {
    r.verdict = Verdict::fail;
    r.witnesses.push_back(x);
    r.detail = "power iteration found an expanding hermitian input";
    return r;
  }
  r.verdict = Verdict::unknown;
  r.detail = "positivity sampled only; no exact norm certificate";
  return r;
}

CheckReport check_lamperti(const SuperOperator& map, int trials,
                           std::uint64_t seed) {
  if (!map.positive_attested()) {
    raise(ErrorCode::precondition, "check_lamperti: map is not positivity-attested");
  }
  CheckReport r;
  r.name = kLamperti;
  r.seed = seed;
  r.tolerances["product_norm"] = 1e-9;
  const TracialAlgebra& A = map.algebra();
  int tested = 0;
  double worst = 0.0;

  auto test = [&](const Operator& p, const Operator& q) {
    const Operator gp = map.apply(p);
    const Operator gq = map.apply(q);
    const double v = op_norm(gp * gq);
    ++tested;
    worst = std::max(worst, v);
    if (v > 1e-9) {
      r.verdict = Verdict::fail;
      r.witnesses = {p, q};
      std::ostringstream os;
      os.precision(17);
      os << "||Gamma(p) Gamma(q)|| = " << v << " for orthogonal p, q";
      r.detail = os.str();
      return false;
    }
    return true;
  };

  // Minimal projections for the columns of a block-diagonal unitary.
  auto minimal_projections = [&](const std::vector<Matrix>& bases) {
    std::vector<Operator> out;
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      for (int k = 0; k < A.block_dim(b); ++k) {
        std::vector<Matrix> blocks;
        for (int n : A.blocks()) blocks.push_back(Matrix::Zero(n, n));
        blocks[b] = bases[b].col(k) * bases[b].col(k).adjoint();
        out.emplace_back(std::move(blocks));
      }
    }
    return out;
  };
  auto test_pairs = [&](const std::vector<Operator>& projs) {
    std::vector<Operator> images;
    for (const auto& p : projs) images.push_back(map.apply(p));
    for (std::size_t i = 0; i < projs.size(); ++i) {
      for (std::size_t j = i + 1; j < projs.size(); ++j) {
        const double v = op_norm(images[i] * images[j]);
        ++tested;
        worst = std::max(worst, v);
        if (v > 1e-9) {
          r.verdict = Verdict::fail;
          r.witnesses = {projs[i], projs[j]};
          std::ostringstream os;
          os.precision(17);
          os << "||Gamma(p) Gamma(q)|| = " << v << " for orthogonal p, q";
          r.detail = os.str();
          return false;
        }
      }
    }
    return true;
  };

  std::vector<Matrix> standard;
  for (int n : A.blocks()) standard.push_back(Matrix::Identity(n, n));
  if (!test_pairs(minimal_projections(standard))) {
    r.samples = tested;
    r.measured = worst;
    return r;
  }

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Operator h = random_hermitian(A, rng);
    const Projection p = spectral_projection(A, h, Interval::at_least(0.0));
    if (!test(p.op(), p.complement().op())) break;
    std::vector<Matrix> bases;
    for (int n : A.blocks()) bases.push_back(random_unitary(n, rng));
    if (!test_pairs(minimal_projections(bases))) break;
  }
  r.samples = tested;
  r.measured = worst;
  if (r.verdict != Verdict::fail) {
    r.verdict = Verdict::pass;
    r.detail = "no orthogonality violation among sampled pairs";
  }
  return r;
}

CheckReport check_commuting(const std::vector<SuperOperator>& maps) {
  if (maps.size() < 2) {
    raise(ErrorCode::invalid_argument, "check_commuting: need at least two maps");
  }
  for (const auto& m : maps) {
    if (!(m.algebra() == maps.front().algebra())) {
      raise(ErrorCode::shape_mismatch, "check_commuting: maps act on different algebras");
    }
  }
  CheckReport r;
  r.name = "commuting";
  r.tolerances["commutator_norm"] = 1e-10;
  double worst = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t j = i + 1; j < maps.size(); ++j) {
      const Matrix c = maps[i].matrix() * maps[j].matrix() - maps[j].matrix() * maps[i].matrix();
      Eigen::BDCSVD<Matrix> svd(c, Eigen::ComputeThinV);
      const double v = svd.singularValues()(0);
      if (v > worst) {
        worst = v;
        if (v > 1e-10) {
          r.witnesses = {Operator::from_vec(maps.front().algebra(), svd.matrixV().col(0))};
          r.detail = "generators " + std::to_string(i) + " and " + std::to_string(j) +
                     " do not commute";
        }
      }
    }
  }
  r.measured = worst;
  r.samples = static_cast<int>(maps.size() * (maps.size() - 1) / 2);
  r.verdict = worst <= 1e-10 ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace ncerg
