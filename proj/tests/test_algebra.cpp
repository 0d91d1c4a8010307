#include "doctest.h"

#include "ncerg/algebra.hpp"
#include "oracles.hpp"

using namespace ncerg;

namespace {

Operator diag_op(const TracialAlgebra& A, std::vector<double> d) {
  return Operator::diagonal(A, d);
}

}  // namespace

TEST_CASE("algebra validation") {
  CHECK_THROWS_AS(TracialAlgebra({}, {}, false), Error);
  CHECK_THROWS_AS(TracialAlgebra({2}, {0.0}, false), Error);
  CHECK_THROWS_AS(TracialAlgebra({0}, {1.0}, false), Error);
  CHECK_THROWS_AS(TracialAlgebra({2}, {0.3}, true), Error);
  CHECK_NOTHROW(TracialAlgebra({2, 1}, {0.25, 0.5}, true));
  const TracialAlgebra A({2, 3}, {0.1, 0.2}, false);
  CHECK(A.dim() == 13);
  CHECK(A.hilbert_dim() == 5);
  CHECK(A.vec_offset(1) == 4);
  CHECK(A.hilbert_offset(1) == 2);
  CHECK_FALSE(A.commutative());
  CHECK(TracialAlgebra::diagonal(4).commutative());
}

TEST_CASE("trace examples") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  CHECK(std::abs(trace(M2, Operator::identity(M2)) - 1.0) < 1e-15);
  CHECK(std::abs(trace(M2, diag_op(M2, {1, -1}))) < 1e-15);
  const auto C3 = TracialAlgebra::diagonal(3);
  CHECK(std::abs(trace(C3, diag_op(C3, {3, 1, 0.1})).real() - 4.1 / 3.0) < 1e-14);
  CHECK_THROWS_AS(trace(C3, Operator::identity(M2)), Error);
}

TEST_CASE("trace norm and operator norm") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  CHECK(trace_norm(M2, Operator::zero(M2)) == 0.0);
  CHECK(std::abs(trace_norm(M2, diag_op(M2, {1, -1})) - 1.0) < 1e-14);
  CHECK(op_norm(Operator::zero(M2)) == 0.0);
  CHECK(std::abs(op_norm(diag_op(M2, {0.3, 0.9})) - 0.9) < 1e-15);
  CHECK(std::abs(op_norm(diag_op(M2, {0.0, 1.0})) - 1.0) < 1e-15);

  const TracialAlgebra A({3, 2}, {0.2, 0.2}, true);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Operator x = random_operator(A, rng);
    double expect = 0.0;
    for (auto [s, w] : oracle::weighted_singular_values(A, x)) expect += s * w;
    CHECK(std::abs(trace_norm(A, x) - expect) < 1e-12);
  }
}

TEST_CASE("spectral decomposition") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  auto one = spectral_decompose(M2, Operator::identity(M2));
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].value - 1.0) < 1e-14);
  CHECK(one[0].projection.rank() == 2);
  auto two = spectral_decompose(M2, diag_op(M2, {0, 1}));
  REQUIRE(two.size() == 2);
  CHECK(two[0].projection.rank() == 1);
  CHECK(two[1].projection.rank() == 1);

  Matrix nh(2, 2);
  nh << 0, 1, 0, 0;
  CHECK_THROWS_AS(spectral_decompose(M2, Operator({nh})), Error);

  const TracialAlgebra A({4, 1, 3}, {0.1, 0.3, 0.1}, false);
  Rng rng(11);
  for (int t = 0; t < 25; ++t) {
    const Operator h = random_hermitian(A, rng);
    const auto parts = spectral_decompose(A, h);
    Operator sum = Operator::zero(A);
    Operator idsum = Operator::zero(A);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0) CHECK(parts[k].value > parts[k - 1].value);
      sum = sum + parts[k].projection.op() * parts[k].value;
      idsum = idsum + parts[k].projection.op();
      for (std::size_t l = k + 1; l < parts.size(); ++l) {
        CHECK(op_norm(parts[k].projection.op() * parts[l].projection.op()) < 1e-10);
      }
    }
    CHECK(op_norm(sum - h) <= 1e-10);
    CHECK(op_norm(idsum - Operator::identity(A)) <= 1e-10);
  }
}

TEST_CASE("spectral projection conventions") {
  const auto C3 = TracialAlgebra::diagonal(3);
  auto p = spectral_projection(C3, diag_op(C3, {0.3, 0.6, 0.9}), Interval::half_open(0.5, 1.0));
  CHECK(op_norm(p.op() - diag_op(C3, {0, 1, 1})) < 1e-14);
  auto z = spectral_projection(C3, Operator::zero(C3), Interval::half_open(0.5, 1.0));
  CHECK(z.is_zero());
  auto edge = spectral_projection(C3, diag_op(C3, {0.5, 0.2, 1.0}), Interval::half_open(0.5, 1.0));
  CHECK(op_norm(edge.op() - diag_op(C3, {1, 0, 0})) < 1e-14);
}

TEST_CASE("support") {
  const auto C3 = TracialAlgebra::diagonal(3);
  auto s = support(C3, diag_op(C3, {0.5, 0, 2}));
  CHECK(op_norm(s.op() - diag_op(C3, {1, 0, 1})) < 1e-14);
  CHECK(support(C3, Operator::zero(C3)).is_zero());
  CHECK_THROWS_AS(support(C3, diag_op(C3, {1, -1, 0})), Error);

  // Minimality against every spectral projection that fixes x.
  const TracialAlgebra A({3, 2}, {0.25, 0.125}, true);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Matrix g = random_gaussian(3, 1, rng);
    const Operator x({g * g.adjoint(), Matrix::Zero(2, 2)});
    const Projection sx = support(A, x);
    CHECK(op_norm(sx.op() * x - x) <= 1e-9);
    CHECK(sx.rank() == 1);
    for (const auto& c : spectral_decompose(A, x)) {
      const Projection p = spectral_projection(A, x, Interval::at_least(c.value));
      if (op_norm(p.op() * x - x) <= 1e-9) CHECK(order_leq(sx.op(), p.op()));
    }
  }
}

TEST_CASE("distribution") {
  const auto C3 = TracialAlgebra::diagonal(3);
  CHECK(std::abs(distribution(C3, diag_op(C3, {3, 1, 0.1}), 0.5) - 2.0 / 3.0) < 1e-14);
  CHECK(distribution(C3, Operator::zero(C3), 0.1) == 0.0);
  CHECK_THROWS_AS(distribution(C3, Operator::zero(C3), 0.0), Error);

  const TracialAlgebra A({3, 2, 1}, {0.1, 0.2, 0.3}, false);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Operator x = random_operator(A, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps = 0.05; eps < 5.0; eps *= 1.3) {
      const double d = distribution(A, x, eps);
      CHECK(std::abs(d - oracle::mass_above(A, x, eps, false)) < 1e-12);
      CHECK(d <= prev + 1e-15);
      prev = d;
      // Right-continuity: a slightly larger eps gives the same mass.
      CHECK(std::abs(distribution(A, x, eps * (1 + 1e-13)) - d) < 1e-12);
    }
  }
}

TEST_CASE("order") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  const auto one = Operator::identity(M2);
  CHECK(order_leq(one, one));
  CHECK(order_leq(diag_op(M2, {0, 1}), one));
  CHECK_FALSE(order_leq(diag_op(M2, {2, 0}), one));
}

TEST_CASE("tracial property and norm inequalities") {
  const TracialAlgebra A({2, 3}, {0.3, 0.1}, false);
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Operator x = random_operator(A, rng);
    const Operator y = random_operator(A, rng);
    CHECK(trace(A, x.adjoint() * x).real() >= 0.0);
    CHECK(std::abs(trace(A, x * y) - trace(A, y * x)) <= 1e-10 * op_norm(x) * op_norm(y));
    CHECK(trace_norm(A, x + y) <= trace_norm(A, x) + trace_norm(A, y) + 1e-12);
    const Operator u({random_unitary(2, rng), random_unitary(3, rng)});
    const Operator v({random_unitary(2, rng), random_unitary(3, rng)});
    CHECK(trace_norm(A, u * x * v) <= trace_norm(A, x) + 1e-12);
    // Dense oracle for the weighted trace.
    CHECK(std::abs(trace(A, x) - oracle::weighted_trace(A, x.dense())) < 1e-12);
  }
}

TEST_CASE("vectorization round trip") {
  const TracialAlgebra A({2, 3}, {0.3, 0.1}, false);
  Rng rng(2);
  const Operator x = random_operator(A, rng);
  const Operator y = Operator::from_vec(A, x.vec());
  CHECK(op_norm(x - y) == 0.0);
  CHECK(x.vec()(1) == x.block(0)(1, 0));
  CHECK(op_norm(Operator::from_dense(A, x.dense()) - x) == 0.0);
  Matrix leak = x.dense();
  leak(0, 4) = 1.0;
  CHECK_THROWS_AS(Operator::from_dense(A, leak), Error);
}

TEST_CASE("projection validation") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  CHECK_NOTHROW(Projection::from_operator(diag_op(M2, {1, 0})));
  CHECK_THROWS_AS(Projection::from_operator(diag_op(M2, {0.5, 0})), Error);
  const auto p = Projection::from_operator(diag_op(M2, {1, 0}));
  CHECK(p.complement().rank() == 1);
}

TEST_CASE("cached flags are stable under concurrent reads") {
  const auto M2 = TracialAlgebra::matrix_algebra(2);
  const Operator x = diag_op(M2, {1, 2});
  CHECK(x.hermitian());
  CHECK(x.positive());
  const Operator copy = x;
  CHECK(copy.positive());
  CHECK_FALSE(diag_op(M2, {1, -2}).positive());
}
