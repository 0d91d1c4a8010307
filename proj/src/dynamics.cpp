#include "ncerg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace ncerg {

const char* to_string(Picture p) noexcept {
  return p == Picture::heisenberg ? "heisenberg" : "schrodinger";
}

const char* to_string(SchemeKind k) noexcept {
  switch (k) {
    case SchemeKind::zplus_box: return "zplus-box";
    case SchemeKind::z_symmetric_box: return "z-symmetric-box";
    case SchemeKind::finite_group: return "finite-group";
    case SchemeKind::rplus_cube: return "r-plus-cube";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kLawSeed = 0x5eed1a3ULL;

CheckReport trivial_pass(const std::string& name, const std::string& detail) {
  CheckReport r;
  r.name = name;
  r.verdict = Verdict::pass;
  r.detail = detail;
  return r;
}

SuperOperator derive_inverse(const SuperOperator& g, std::size_t index) {
  if (g.unitary()) {
    return from_conjugation(g.algebra(), g.unitary()->adjoint());
  }
  Eigen::FullPivLU<Matrix> lu(g.matrix());
  if (!lu.isInvertible()) {
    raise(ErrorCode::invalid_argument,
          "z-symmetric-box generator " + std::to_string(index) + " is not invertible");
  }
  SuperOperator inv = from_matrix(g.algebra(), lu.inverse(), kLawSeed + index);
  if (!inv.positive_attested()) {
    raise(ErrorCode::invalid_argument, "inverse of z-symmetric-box generator " +
                                           std::to_string(index) + " is not positive");
  }
  return inv;
}

double rel_residual(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// (1/a) int_0^a exp(tL) dt as a matrix.
struct AxisIntegral {
  Matrix op;
  double error = 0.0;
  bool closed = true;
};

Complex cesaro_weight(Complex z) {
  // (e^z - 1)/z, series near 0.
  if (std::abs(z) < 1e-6) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

AxisIntegral axis_integral(const Matrix& L, double a, int steps) {
  AxisIntegral out;
  const int D = static_cast<int>(L.rows());
  const double lnorm = std::max(1.0, L.norm());
  Eigen::ComplexEigenSolver<Matrix> es(L);
  if (es.info() == Eigen::Success) {
    const Matrix& V = es.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(V);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
    if (cond <= 1e8) {
      const Matrix Vinv = V.partialPivLu().inverse();
      const double recon =
          (V * es.eigenvalues().asDiagonal() * Vinv - L).norm();
      if (recon <= 1e-9 * lnorm) {
        Vector f(D);
        for (int k = 0; k < D; ++k) f(k) = cesaro_weight(a * es.eigenvalues()(k));
        out.op = V * f.asDiagonal() * Vinv;
        out.error = recon * a * cond;
        out.closed = true;
        return out;
      }
    }
  }
  // Composite Simpson on [0, a].
  int n = std::max(2, steps);
  if (n % 2) ++n;
  const double h = a / n;
  const Matrix step = (Matrix(L * h)).exp();
  Matrix power = Matrix::Identity(D, D);
  Matrix fine = Matrix::Zero(D, D);
  Matrix coarse = Matrix::Zero(D, D);
  for (int k = 0; k <= n; ++k) {
    const double c = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    fine += c * power;
    if (k % 2 == 0) {
      const int m = k / 2;
      const int half = n / 2;
      const double cc = (m == 0 || m == half) ? 1.0 : (m % 2 ? 4.0 : 2.0);
      coarse += cc * power;
    }
    power = step * power;
  }
  fine *= h / (3.0 * a);
  if ((n / 2) % 2 == 0) {
    coarse *= 2.0 * h / (3.0 * a);
    out.error = matrix_norm(fine - coarse) / 15.0;
  } else {
    // Half the panels would be odd; fall back to the trapezoid comparison.
    Matrix trap = Matrix::Zero(D, D);
    power = Matrix::Identity(D, D);
    for (int k = 0; k <= n; ++k) {
      trap += ((k == 0 || k == n) ? 0.5 : 1.0) * power;
      power = step * power;
    }
    trap *= h / a;
    out.error = matrix_norm(fine - trap);
  }
  out.op = std::move(fine);
  out.closed = false;
  return out;
}

void require_integer_window(double a) {
  if (!(a >= 1.0) || a != std::floor(a)) {
    std::ostringstream os;
    os << "discrete average needs an integer a >= 1, got " << a;
    raise(ErrorCode::invalid_argument, os.str());
  }
}

// Per-axis Cesaro average of column block `v` (vector or matrix).
template <class M>
M cesaro(const Matrix& g, const M& v, int a) {
  M acc = v;
  M z = v;
  for (int k = 1; k < a; ++k) {
    z = g * z;
    acc += z;
  }
  return acc / static_cast<double>(a);
}

template <class M>
M symmetric_cesaro(const Matrix& g, const Matrix& ginv, const M& v, int a) {
  std::vector<M> neg;
  M z = v;
  for (int k = 1; k <= a; ++k) {
    z = ginv * z;
    neg.push_back(z);
  }
  M acc = neg.empty() ? M(v * 0.0) : neg.back();
  for (int k = a - 1; k >= 1; --k) acc += neg[k - 1];
  acc += v;
  z = v;
  for (int k = 1; k <= a; ++k) {
    z = g * z;
    acc += z;
  }
  return acc / static_cast<double>(2 * a + 1);
}

template <class M>
M apply_average(const SemigroupAction& action, const M& v, double a, int steps,
                double* error, bool* closed) {
  const auto& sch = action.scheme();
  if (error) *error = 0.0;
  if (closed) *closed = true;
  switch (sch.kind) {
    case SchemeKind::zplus_box: {
      require_integer_window(a);
      M y = v;
      for (const auto& g : action.generators()) y = cesaro(g.matrix(), y, static_cast<int>(a));
      return y;
    }
    case SchemeKind::z_symmetric_box: {
      require_integer_window(a);
      M y = v;
      for (std::size_t i = 0; i < action.generators().size(); ++i) {
        y = symmetric_cesaro(action.generators()[i].matrix(), action.inverses()[i].matrix(), y,
                             static_cast<int>(a));
      }
      return y;
    }
    case SchemeKind::finite_group: {
      M acc = v * 0.0;
      for (const auto& g : action.generators()) acc += g.matrix() * v;
      return acc / static_cast<double>(action.generators().size());
    }
    case SchemeKind::rplus_cube: {
      if (!(a > 0.0)) raise(ErrorCode::invalid_argument, "continuous average needs a > 0");
      M y = v;
      for (const auto& L : action.continuous_generators()) {
        AxisIntegral ax = axis_integral(L, a, steps);
        y = ax.op * y;
        if (error) *error += ax.error;
        if (closed) *closed = *closed && ax.closed;
      }
      return y;
    }
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

SemigroupAction SemigroupAction::discrete(SchemeKind kind, Picture picture,
                                          std::vector<SuperOperator> generators,
                                          std::vector<SuperOperator> inverses) {
  if (kind != SchemeKind::zplus_box && kind != SchemeKind::z_symmetric_box) {
    raise(ErrorCode::invalid_argument, "discrete: scheme must be a box scheme");
  }
  if (generators.empty()) raise(ErrorCode::invalid_argument, "discrete: no generators");
  SemigroupAction s;
  s.algebra_ = generators.front().algebra();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (!(generators[i].algebra() == s.algebra_)) {
      raise(ErrorCode::shape_mismatch,
            "generator " + std::to_string(i) + " acts on a different algebra");
    }
  }
  s.picture_ = picture;
  s.scheme_ = {kind, static_cast<int>(generators.size()), 0};
  if (kind == SchemeKind::z_symmetric_box) {
    if (!inverses.empty() && inverses.size() != generators.size()) {
      raise(ErrorCode::invalid_argument, "z-symmetric-box: one inverse per generator");
    }
    if (inverses.empty()) {
      for (std::size_t i = 0; i < generators.size(); ++i) {
        inverses.push_back(derive_inverse(generators[i], i));
      }
    }
    for (std::size_t i = 0; i < generators.size(); ++i) {
      const Matrix prod = generators[i].matrix() * inverses[i].matrix();
      const double err = (prod - Matrix::Identity(prod.rows(), prod.cols())).norm();
      if (err > 1e-10 * std::max(1.0, generators[i].matrix().norm())) {
        raise(ErrorCode::invalid_argument,
              "z-symmetric-box: inverse " + std::to_string(i) + " does not invert its generator");
      }
    }
    s.inverses_ = std::move(inverses);
  }
  s.generators_ = std::move(generators);
  s.run_structural_checks();
  return s;
}

SemigroupAction SemigroupAction::finite_group(Picture picture,
                                              std::vector<SuperOperator> elements,
                                              std::vector<std::vector<int>> table) {
  const int n = static_cast<int>(elements.size());
  if (n == 0) raise(ErrorCode::invalid_argument, "finite_group: no elements");
  if (static_cast<int>(table.size()) != n) {
    raise(ErrorCode::invalid_argument, "finite_group: table must be order x order");
  }
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) {
      raise(ErrorCode::invalid_argument, "finite_group: table must be order x order");
    }
    for (int v : row) {
      if (v < 0 || v >= n) raise(ErrorCode::invalid_argument, "finite_group: table entry out of range");
    }
  }
  const Matrix& e = elements.front().matrix();
  if ((e - Matrix::Identity(e.rows(), e.cols())).norm() > 1e-10) {
    raise(ErrorCode::invalid_argument, "finite_group: element 0 must be the identity");
  }
  SemigroupAction s;
  s.algebra_ = elements.front().algebra();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!(elements[i].algebra() == s.algebra_)) {
      raise(ErrorCode::shape_mismatch,
            "group element " + std::to_string(i) + " acts on a different algebra");
    }
  }
  s.picture_ = picture;
  s.scheme_ = {SchemeKind::finite_group, 1, n};
  s.generators_ = std::move(elements);
  s.table_ = std::move(table);
  s.run_structural_checks();
  return s;
}

SemigroupAction SemigroupAction::continuous(const TracialAlgebra& A, Picture picture,
                                            std::vector<Matrix> generators) {
  if (generators.empty()) raise(ErrorCode::invalid_argument, "continuous: no generators");
  SemigroupAction s;
  s.algebra_ = A;
  s.picture_ = picture;
  s.scheme_ = {SchemeKind::rplus_cube, static_cast<int>(generators.size()), 0};
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].rows() != A.dim() || generators[i].cols() != A.dim()) {
      raise(ErrorCode::shape_mismatch,
            "generator " + std::to_string(i) + " does not match algebra dimension " +
                std::to_string(A.dim()));
    }
    s.generators_.push_back(from_matrix(A, generators[i].exp(), kLawSeed + i));
  }
  s.rates_ = std::move(generators);
  s.run_structural_checks();
  return s;
}

void SemigroupAction::run_structural_checks() {
  // Commutation.
  if (scheme_.kind == SchemeKind::finite_group) {
    commuting_ = trivial_pass("commuting", "full group average; commutation not required");
  } else if (generators_.size() < 2) {
    commuting_ = trivial_pass("commuting", "single generator");
  } else if (scheme_.kind == SchemeKind::rplus_cube) {
    std::vector<SuperOperator> wrapped;
    for (const auto& L : rates_) wrapped.emplace_back(algebra_, L, MapSource::generator);
    commuting_ = check_commuting(wrapped);
  } else {
    commuting_ = check_commuting(generators_);
  }

  // Semigroup law on random inputs.
  semigroup_law_ = CheckReport{};
  semigroup_law_.name = "semigroup-law";
  semigroup_law_.seed = kLawSeed;
  semigroup_law_.tolerances["relative_residual"] = 1e-10;
  Rng rng(kLawSeed);
  double worst = 0.0;
  int samples = 0;
  const int trials = 4;
  for (int t = 0; t < trials; ++t) {
    const Vector x = random_operator(algebra_, rng).vec();
    switch (scheme_.kind) {
      case SchemeKind::zplus_box:
      case SchemeKind::z_symmetric_box:
        for (std::size_t i = 0; i < generators_.size(); ++i) {
          for (std::size_t j = 0; j < generators_.size(); ++j) {
            const Matrix& gi = generators_[i].matrix();
            const Matrix& gj = generators_[j].matrix();
            worst = std::max(worst, rel_residual(gi * (gj * x), gj * (gi * x)));
            ++samples;
          }
          if (!inverses_.empty()) {
            worst = std::max(worst, rel_residual(generators_[i].matrix() * (inverses_[i].matrix() * x), x));
            ++samples;
          }
        }
        break;
      case SchemeKind::finite_group:
        for (std::size_t g = 0; g < generators_.size(); ++g) {
          for (std::size_t h = 0; h < generators_.size(); ++h) {
            const Vector lhs = generators_[g].matrix() * (generators_[h].matrix() * x);
            const Vector rhs = generators_[table_[g][h]].matrix() * x;
            worst = std::max(worst, rel_residual(lhs, rhs));
            ++samples;
          }
        }
        break;
      case SchemeKind::rplus_cube:
        for (std::size_t i = 0; i < rates_.size(); ++i) {
          const Matrix a = (Matrix(rates_[i] * 0.3)).exp();
          const Matrix b = (Matrix(rates_[i] * 0.7)).exp();
          worst = std::max(worst, rel_residual(a * (b * x), generators_[i].matrix() * x));
          ++samples;
          for (std::size_t j = i + 1; j < rates_.size(); ++j) {
            const Matrix& gi = generators_[i].matrix();
            const Matrix& gj = generators_[j].matrix();
            worst = std::max(worst, rel_residual(gi * (gj * x), gj * (gi * x)));
            ++samples;
          }
        }
        break;
    }
  }
  semigroup_law_.samples = samples;
  semigroup_law_.measured = worst;
  semigroup_law_.verdict = worst <= 1e-10 ? Verdict::pass : Verdict::fail;
  if (semigroup_law_.verdict == Verdict::fail) {
    semigroup_law_.detail = "composition of generators disagrees with the composite element";
  }

  // Contraction on M, evaluated on the Heisenberg form of every generator.
  contraction_ = CheckReport{};
  contraction_.name = "contraction";
  contraction_.verdict = Verdict::pass;
  auto fold = [&](const SuperOperator& g, std::size_t idx, const char* what) {
    const SuperOperator h = picture_ == Picture::heisenberg ? g : ncerg::dual(g);
    CheckReport r = check_contraction(h, kLawSeed + idx);
    contraction_.measured = std::max(contraction_.measured, r.measured);
    contraction_.samples += std::max(1, r.samples);
    if (r.verdict == Verdict::fail && contraction_.verdict != Verdict::fail) {
      contraction_.verdict = Verdict::fail;
      contraction_.witnesses = r.witnesses;
      contraction_.detail = std::string(what) + " " + std::to_string(idx) + ": " + r.detail;
    } else if (r.verdict == Verdict::unknown && contraction_.verdict == Verdict::pass) {
      contraction_.verdict = Verdict::unknown;
      contraction_.detail = std::string(what) + " " + std::to_string(idx) + ": " + r.detail;
    }
  };
  for (std::size_t i = 0; i < generators_.size(); ++i) fold(generators_[i], i, "generator");
  for (std::size_t i = 0; i < inverses_.size(); ++i) fold(inverses_[i], i, "inverse");
}

bool SemigroupAction::sampled_positivity() const {
  for (const auto& g : generators_) {
    if (g.attested(kCompletePositivity) != Verdict::pass) return true;
  }
  for (const auto& g : inverses_) {
    if (g.attested(kCompletePositivity) != Verdict::pass) return true;
  }
  return false;
}

SemigroupAction SemigroupAction::dual() const {
  SemigroupAction s = *this;
  s.picture_ = picture_ == Picture::heisenberg ? Picture::schrodinger : Picture::heisenberg;
  for (auto& g : s.generators_) g = ncerg::dual(g);
  for (auto& g : s.inverses_) g = ncerg::dual(g);
  for (auto& L : s.rates_) L = dual_matrix(algebra_, L);
  if (!table_.empty()) {
    const std::size_t n = table_.size();
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t h = 0; h < n; ++h) s.table_[g][h] = table_[h][g];
    }
  }
  // Commutation and the law are preserved by duality; rerun the law check so
  // the report describes the stored matrices.
  CheckReport comm = commuting_;
  CheckReport contraction = contraction_;
  s.run_structural_checks();
  s.commuting_ = comm;
  s.contraction_ = contraction;
  return s;
}

SemigroupAction SemigroupAction::in_picture(Picture p) const {
  return p == picture_ ? *this : dual();
}

const CheckReport& SemigroupAction::attest_lamperti(int trials, std::uint64_t seed) {
  const SemigroupAction pred = in_picture(Picture::schrodinger);
  CheckReport agg;
  agg.name = kLamperti;
  agg.seed = seed;
  agg.verdict = Verdict::pass;
  agg.tolerances["product_norm"] = 1e-9;
  for (std::size_t i = 0; i < pred.generators().size(); ++i) {
    const SuperOperator& g = pred.generators()[i];
    if (!g.positive_attested()) {
      agg.verdict = Verdict::unknown;
      agg.detail = "generator " + std::to_string(i) + " is not positivity-attested";
      break;
    }
    CheckReport r = check_lamperti(g, trials, seed + i);
    agg.samples += r.samples;
    agg.measured = std::max(agg.measured, r.measured);
    if (r.verdict == Verdict::fail) {
      agg.verdict = Verdict::fail;
      agg.witnesses = r.witnesses;
      agg.detail = "generator " + std::to_string(i) + ": " + r.detail;
      break;
    }
  }
  lamperti_ = agg;
  return *lamperti_;
}

// ---------------------------------------------------------------------------
// Folner windows

FolnerSet folner_set(const FolnerScheme& scheme, int a) {
  if (a < 1) raise(ErrorCode::invalid_argument, "folner_set: a must be >= 1");
  if (scheme.d < 1) raise(ErrorCode::invalid_argument, "folner_set: d must be >= 1");
  FolnerSet out;
  out.d = scheme.d;
  int lo = 0, hi = a - 1;
  switch (scheme.kind) {
    case SchemeKind::rplus_cube:
      out.continuous = true;
      out.side = a;
      return out;
    case SchemeKind::finite_group:
      if (scheme.group_order < 1) raise(ErrorCode::invalid_argument, "folner_set: empty group");
      for (int g = 0; g < scheme.group_order; ++g) out.points.push_back({g});
      out.side = scheme.group_order;
      return out;
    case SchemeKind::z_symmetric_box:
      lo = -a;
      hi = a;
      break;
    case SchemeKind::zplus_box:
      break;
  }
  out.side = hi - lo + 1;
  std::vector<int> idx(scheme.d, lo);
  while (true) {
    out.points.push_back(idx);
    int axis = 0;
    while (axis < scheme.d && idx[axis] == hi) idx[axis++] = lo;
    if (axis == scheme.d) break;
    ++idx[axis];
  }
  return out;
}

double folner_ratio(const FolnerScheme& scheme, double a, const std::vector<int>& shift) {
  if (scheme.kind == SchemeKind::finite_group) return 0.0;
  if (static_cast<int>(shift.size()) != scheme.d) {
    raise(ErrorCode::shape_mismatch, "folner_ratio: shift has the wrong dimension");
  }
  const double side = scheme.kind == SchemeKind::z_symmetric_box ? 2.0 * a + 1.0 : a;
  double vol = 1.0, overlap = 1.0;
  for (int g : shift) {
    vol *= side;
    overlap *= std::max(0.0, side - std::abs(g));
  }
  return 2.0 * (vol - overlap) / vol;
}

// ---------------------------------------------------------------------------
// Averages

Operator average(const SemigroupAction& action, const Operator& x, double a, int steps) {
  require_conforms(action.algebra(), x, "average");
  const Vector v = apply_average(action, x.vec(), a, steps, nullptr, nullptr);
  return Operator::from_vec(action.algebra(), v);
}

SuperOperator average_super(const SemigroupAction& action, double a, int steps) {
  const int D = action.algebra().dim();
  Matrix I = Matrix::Identity(D, D);
  Matrix m = apply_average(action, I, a, steps, nullptr, nullptr);
  return SuperOperator(action.algebra(), std::move(m), MapSource::matrix);
}

ContinuousAverage continuous_average(const SemigroupAction& action, const Operator& x,
                                     double a, int steps) {
  if (action.scheme().kind != SchemeKind::rplus_cube) {
    raise(ErrorCode::invalid_argument, "continuous_average: action is not an r-plus-cube action");
  }
  if (action.commuting().verdict == Verdict::fail) {
    raise(ErrorCode::precondition, "continuous_average: generators do not commute");
  }
  require_conforms(action.algebra(), x, "continuous_average");
  ContinuousAverage out;
  double err = 0.0;
  bool closed = true;
  const Vector v = apply_average(action, x.vec(), a, steps, &err, &closed);
  out.value = Operator::from_vec(action.algebra(), v);
  out.error_estimate = err * x.vec().norm();
  out.closed_form = closed;
  return out;
}

namespace {

// Images of x under prod_i G_i^{k_i} for k in the given exponent range.
std::vector<Vector> box_images(const SemigroupAction& action, const Vector& x, int lo, int hi) {
  std::vector<Vector> current{x};
  for (std::size_t i = 0; i < action.generators().size(); ++i) {
    const Matrix& g = action.generators()[i].matrix();
    std::vector<Vector> next;
    for (const auto& y : current) {
      std::vector<Vector> row;
      if (lo < 0) {
        const Matrix& ginv = action.inverses()[i].matrix();
        std::vector<Vector> neg;
        Vector z = y;
        for (int k = -1; k >= lo; --k) {
          z = ginv * z;
          neg.push_back(z);
        }
        for (auto it = neg.rbegin(); it != neg.rend(); ++it) row.push_back(*it);
      }
      Vector z = y;
      for (int k = 0; k <= hi; ++k) {
        if (k >= std::max(lo, 0)) row.push_back(z);
        z = g * z;
      }
      for (auto& r : row) next.push_back(std::move(r));
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace

Operator average_enumerated(const SemigroupAction& action, const Operator& x, int a) {
  require_conforms(action.algebra(), x, "average_enumerated");
  if (a < 1) raise(ErrorCode::invalid_argument, "average_enumerated: a must be >= 1");
  const Vector v = x.vec();
  std::vector<Vector> images;
  switch (action.scheme().kind) {
    case SchemeKind::zplus_box:
      images = box_images(action, v, 0, a - 1);
      break;
    case SchemeKind::z_symmetric_box:
      images = box_images(action, v, -a, a);
      break;
    case SchemeKind::finite_group:
      for (const auto& g : action.generators()) images.push_back(g.matrix() * v);
      break;
    case SchemeKind::rplus_cube:
      raise(ErrorCode::invalid_argument, "average_enumerated: continuous window");
  }
  Vector acc = Vector::Zero(v.size());
  for (const auto& y : images) acc += y;
  return Operator::from_vec(action.algebra(), acc / static_cast<double>(images.size()));
}

std::vector<Operator> orbit(const SemigroupAction& action, const Operator& x, int a) {
  require_conforms(action.algebra(), x, "orbit");
  if (a < 0) raise(ErrorCode::invalid_argument, "orbit: a must be >= 0");
  const Vector v = x.vec();
  std::vector<Vector> images;
  switch (action.scheme().kind) {
    case SchemeKind::zplus_box:
    case SchemeKind::rplus_cube:
      images = box_images(action, v, 0, a);
      break;
    case SchemeKind::z_symmetric_box:
      images = box_images(action, v, -a, a);
      break;
    case SchemeKind::finite_group:
      for (const auto& g : action.generators()) images.push_back(g.matrix() * v);
      break;
  }
  std::vector<Operator> out;
  out.reserve(images.size());
  for (const auto& y : images) out.push_back(Operator::from_vec(action.algebra(), y));
  return out;
}

Vector orbit_average_vector(const Matrix& unitary, const Vector& xi, int n) {
  if (unitary.rows() != unitary.cols() || unitary.cols() != xi.size()) {
    raise(ErrorCode::shape_mismatch, "orbit_average_vector: unitary and vector sizes differ");
  }
  if (n < 1) raise(ErrorCode::invalid_argument, "orbit_average_vector: n must be >= 1");
  Vector acc = xi;
  Vector z = xi;
  for (int k = 1; k < n; ++k) {
    z = unitary * z;
    acc += z;
  }
  return acc / static_cast<double>(n);
}

}  // namespace ncerg
