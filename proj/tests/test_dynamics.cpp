#include "doctest.h"

#include <cmath>

#include "ncerg/dynamics.hpp"
#include "oracles.hpp"

using namespace ncerg;

namespace {

std::vector<Matrix> amplitude_damping_kraus(double g) {
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - g);
  k1(0, 1) = std::sqrt(g);
  return {k0, k1};
}

std::vector<Matrix> dephasing_kraus(double p) {
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  return {std::sqrt(1 - p) * Matrix::Identity(2, 2), std::sqrt(p) * z};
}

Operator e(int i, int j) {
  Matrix m = Matrix::Zero(2, 2);
  m(i, j) = 1.0;
  return Operator({m});
}

SemigroupAction single(const SuperOperator& g) {
  return SemigroupAction::discrete(SchemeKind::zplus_box, Picture::heisenberg, {g});
}

// Largest ||A(x)|| over random hermitian x with ||x|| = 1.
double sampled_norm(const SuperOperator& m, Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    Operator x = random_hermitian(m.algebra(), rng);
    x = x * (1.0 / op_norm(x));
    worst = std::max(worst, op_norm(m.apply(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("folner sets and ratios") {
  FolnerScheme z1{SchemeKind::zplus_box, 1, 0};
  auto s = folner_set(z1, 3);
  REQUIRE(s.points.size() == 3);
  CHECK(s.points[0][0] == 0);
  CHECK(s.points[2][0] == 2);
  CHECK(folner_set(FolnerScheme{SchemeKind::zplus_box, 2, 0}, 2).points.size() == 4);
  auto sym = folner_set(FolnerScheme{SchemeKind::z_symmetric_box, 1, 0}, 2);
  REQUIRE(sym.points.size() == 5);
  CHECK(sym.points.front()[0] == -2);
  CHECK(sym.points.back()[0] == 2);
  CHECK(folner_set(FolnerScheme{SchemeKind::rplus_cube, 2, 0}, 3).continuous);
  CHECK_THROWS_AS(folner_set(z1, 0), Error);

  CHECK(std::abs(folner_ratio(z1, 10, {1}) - 0.2) < 1e-15);
  CHECK(std::abs(folner_ratio(FolnerScheme{SchemeKind::zplus_box, 2, 0}, 10, {1, 0}) - 0.2) < 1e-15);
  CHECK(folner_ratio(FolnerScheme{SchemeKind::finite_group, 1, 3}, 5, {1}) == 0.0);
  // The ratio vanishes along the window sequence.
  double prev = 1.0;
  for (int a : {2, 4, 8, 16, 32}) {
    const double r = folner_ratio(FolnerScheme{SchemeKind::z_symmetric_box, 2, 0}, a, {0, 1});
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("averages: basic examples") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  Matrix u(2, 2);
  u << 1, 0, 0, -1;
  auto ad = single(from_conjugation(M2, u));
  for (int a : {2, 4, 10}) CHECK(op_norm(average(ad, e(0, 1), a)) < 1e-15);
  CHECK(op_norm(average(ad, e(0, 0), 7) - e(0, 0)) < 1e-15);

  auto damp = single(from_kraus(M2, amplitude_damping_kraus(0.5)));
  const double g = 0.5;
  for (int a = 1; a <= 64; ++a) {
    const double expect = (1 - std::pow(1 - g, a)) / (a * g);
    CHECK(std::abs(op_norm(average(damp, e(1, 1), a)) - expect) < 1e-12);
  }
  CHECK(std::abs(op_norm(average(damp, e(1, 1), 10)) - 0.19980) < 1e-5);

  // a = 1 is the identity element of the window.
  auto s1 = average_super(damp, 1);
  CHECK((s1.matrix() - Matrix::Identity(4, 4)).norm() < 1e-15);
  CHECK_THROWS_AS(average(damp, e(0, 0), 0.5), Error);
}

TEST_CASE("product formula matches enumeration") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  auto a = from_kraus(M2, amplitude_damping_kraus(0.4));
  auto b = from_kraus(M2, dephasing_kraus(0.3));
  auto act = SemigroupAction::discrete(SchemeKind::zplus_box, Picture::heisenberg, {a, b});
  CHECK(act.commuting().passed());
  CHECK(act.semigroup_law().passed());
  Rng rng(4);
  for (int n = 1; n <= 4; ++n) {
    const Operator x = random_operator(M2, rng);
    CHECK(op_norm(average(act, x, n) - average_enumerated(act, x, n)) <= 1e-12);
  }

  Rng r2(8);
  const Matrix U = random_unitary(2, r2);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::exp(Complex(0, 0.7));
  d(1, 1) = std::exp(Complex(0, -0.2));
  Matrix d2 = d * d * d;
  auto sym = SemigroupAction::discrete(SchemeKind::z_symmetric_box, Picture::heisenberg,
                                       {from_conjugation(M2, U * d * U.adjoint()),
                                        from_conjugation(M2, U * d2 * U.adjoint())});
  CHECK(sym.commuting().passed());
  for (int n = 1; n <= 4; ++n) {
    const Operator x = random_operator(M2, rng);
    CHECK(op_norm(average(sym, x, n) - average_enumerated(sym, x, n)) <= 1e-12);
  }
}

TEST_CASE("average_super agrees with basis application and duality") {
  const TracialAlgebra A({2, 1}, {0.25, 0.5}, true);
  Matrix K0 = Matrix::Zero(3, 3), K1 = Matrix::Zero(3, 3);
  K0(0, 0) = 1.0;
  K0(1, 1) = std::sqrt(0.5);
  K0(2, 2) = std::sqrt(0.6);
  K1(1, 2) = std::sqrt(0.4);
  K1(2, 1) = std::sqrt(0.5);
  auto act = single(from_kraus(A, {K0, K1}));
  for (int a : {1, 3, 8}) {
    const SuperOperator s = average_super(act, a);
    for (int k = 0; k < A.dim(); ++k) {
      Vector v = Vector::Zero(A.dim());
      v(k) = 1.0;
      const Operator x = Operator::from_vec(A, v);
      CHECK((s.matrix().col(k) - average(act, x, a).vec()).norm() <= 1e-12);
    }
    const SuperOperator sd = average_super(act.dual(), a);
    CHECK((dual_matrix(A, s.matrix()) - sd.matrix()).norm() <= 1e-12);
  }
  CHECK((average_super(single(SuperOperator::identity(A)), 5).matrix() -
         Matrix::Identity(A.dim(), A.dim())).norm() < 1e-14);
}

TEST_CASE("average properties") {
  Rng rng(12);
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  auto a = from_kraus(M2, amplitude_damping_kraus(0.3));
  auto b = from_kraus(M2, dephasing_kraus(0.2));
  auto act = SemigroupAction::discrete(SchemeKind::zplus_box, Picture::heisenberg, {a, b});
  for (int n : {1, 2, 5, 9}) {
    const SuperOperator s = average_super(act, n);
    CHECK(sampled_norm(s, rng) <= 1.0 + 1e-9);
    for (int t = 0; t < 10; ++t) {
      const Operator x = random_positive(M2, rng);
      CHECK(average(act, x, n).positive());
      // Asymptotic invariance along each axis.
      for (int i = 0; i < 2; ++i) {
        std::vector<int> shift(2, 0);
        shift[i] = 1;
        const Operator gx = act.generators()[i].apply(x);
        const double lhs = op_norm(average(act, gx, n) - average(act, x, n));
        CHECK(lhs <= op_norm(x) * folner_ratio(act.scheme(), n, shift) + 1e-10);
      }
    }
  }
}

TEST_CASE("finite group action") {
  const auto C3 = TracialAlgebra::diagonal(3);
  Matrix p = Matrix::Zero(3, 3);
  p(1, 0) = p(2, 1) = p(0, 2) = 1.0;
  std::vector<SuperOperator> elems{SuperOperator::identity(C3), from_conjugation(C3, p),
                                   from_conjugation(C3, p * p)};
  std::vector<std::vector<int>> table{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  auto g = SemigroupAction::finite_group(Picture::heisenberg, elems, table);
  CHECK(g.semigroup_law().passed());
  const Operator x = Operator::diagonal(C3, {3, 0, 0});
  CHECK(op_norm(average(g, x, 4) - Operator::identity(C3)) < 1e-14);
  CHECK(op_norm(average_enumerated(g, x, 1) - Operator::identity(C3)) < 1e-14);
  std::vector<std::vector<int>> bad{{0, 1, 2}, {1, 0, 2}, {2, 2, 1}};
  CHECK_FALSE(SemigroupAction::finite_group(Picture::heisenberg, elems, bad).semigroup_law().passed());
  CHECK(g.dual().semigroup_law().passed());
}

TEST_CASE("continuous averages") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  auto zero = SemigroupAction::continuous(M2, Picture::heisenberg, {Matrix::Zero(4, 4)});
  Rng rng(2);
  const Operator x = random_operator(M2, rng);
  auto c0 = continuous_average(zero, x, 3.0);
  CHECK(op_norm(c0.value - x) < 1e-14);
  CHECK(c0.closed_form);

  // exp(tL) = Ad_{exp(itH)}, x commuting with H.
  Matrix h(2, 2);
  h << 0.5, 0, 0, -0.5;
  const Matrix L = lindblad_generator(M2, h, {});
  auto rot = SemigroupAction::continuous(M2, Picture::heisenberg, {L});
  CHECK(op_norm(continuous_average(rot, e(0, 0), 2.5).value - e(0, 0)) < 1e-13);
  // The off-diagonal corner rotates with frequency 1.
  const Complex z(0.0, 1.0 * 2.5);
  const Complex expect = (std::exp(z) - 1.0) / z;
  const Operator off = continuous_average(rot, e(0, 1), 2.5).value;
  CHECK(std::abs(std::abs(off.block(0)(0, 1)) - std::abs(expect)) < 1e-12);

  // Scalar closed form on a commutative one-point algebra.
  const auto C1 = TracialAlgebra::diagonal(1);
  Matrix minus_one(1, 1);
  minus_one(0, 0) = -1.0;
  auto sc = SemigroupAction::continuous(C1, Picture::heisenberg, {minus_one});
  const double v = continuous_average(sc, Operator::identity(C1), 2.0).value.block(0)(0, 0).real();
  CHECK(std::abs(v - (1 - std::exp(-2.0)) / 2.0) < 1e-14);
  CHECK(std::abs(v - 0.43233) < 1e-5);

  // A Jordan block forces quadrature; compare with the exact integral.
  const auto C2 = TracialAlgebra::diagonal(2);
  Matrix jordan(2, 2);
  jordan << -1, 1, 0, -1;
  auto jb = SemigroupAction::continuous(C2, Picture::heisenberg, {jordan});
  auto cj = continuous_average(jb, Operator::diagonal(C2, {0.0, 1.0}), 2.0, 64);
  CHECK_FALSE(cj.closed_form);
  // (1/2) int_0^2 t e^{-t} dt = (1 - 3 e^{-2}) / 2.
  const double exact = (1 - 3 * std::exp(-2.0)) / 2.0;
  CHECK(std::abs(cj.value.block(0)(0, 0).real() - exact) < 1e-7);
  CHECK(cj.error_estimate < 1e-6);
  CHECK(cj.error_estimate >= 0.0);
}

TEST_CASE("z-symmetric inverse derivation") {
  const auto C2 = TracialAlgebra::diagonal(2);
  RealMatrix sw(2, 2);
  sw << 0, 1, 1, 0;
  auto act = SemigroupAction::discrete(SchemeKind::z_symmetric_box, Picture::heisenberg,
                                       {from_classical(C2, sw)});
  CHECK(act.inverses().size() == 1);
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  CHECK_THROWS_AS(SemigroupAction::discrete(SchemeKind::z_symmetric_box, Picture::heisenberg,
                                            {from_kraus(M2, amplitude_damping_kraus(0.5))}),
                  Error);
}

TEST_CASE("orbit average of vectors") {
  Matrix sw(2, 2);
  sw << 0, 1, 1, 0;
  Vector xi(2);
  xi << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  CHECK(orbit_average_vector(sw, xi, 4).norm() < 1e-15);
  Vector fixed(2);
  fixed << 1, 1;
  CHECK((orbit_average_vector(sw, fixed, 5) - fixed).norm() < 1e-15);

  // Generic vector: converges to its component in ker(U - 1) within C/n.
  Rng rng(5);
  const Matrix d = Eigen::Vector3cd(1.0, std::exp(Complex(0, 2.0)), std::exp(Complex(0, -1.1))).asDiagonal();
  const Matrix v = random_unitary(3, rng);
  const Matrix U = v * d * v.adjoint();
  const Vector x = random_gaussian(3, 1, rng).col(0);
  const Vector limit = v.col(0) * (v.col(0).adjoint() * x);
  for (int n : {10, 100, 1000}) {
    CHECK((orbit_average_vector(U, x, n) - limit).norm() <= 10.0 * x.norm() / n);
  }
  CHECK_THROWS_AS(orbit_average_vector(sw, Vector::Zero(3), 2), Error);
}
