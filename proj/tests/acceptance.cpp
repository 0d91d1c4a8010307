// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ncerg/scenarios.hpp"
#include "oracles.hpp"

using namespace ncerg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Scenario& gallery_item(const std::vector<Scenario>& items, const std::string& name) {
  for (const auto& sc : items) {
    if (sc.name == name) return sc;
  }
  throw Error(ErrorCode::invalid_argument, "no gallery item " + name);
}

std::vector<int> one_to(int n) {
  std::vector<int> out;
  for (int a = 1; a <= n; ++a) out.push_back(a);
  return out;
}

double damping_average(double g, int a) { return (1.0 - std::pow(1.0 - g, a)) / (a * g); }

Outcome identity_decomposition(const std::vector<Scenario>& items) {
  const Scenario& sc = gallery_item(items, "identity");
  const TracialAlgebra& A = sc.algebra;
  const auto t0 = Clock::now();
  const NeveuDecomposition d = neveu_decompose(sc.action);
  const double secs = seconds_since(t0);
  const Matrix one = Matrix::Identity(A.hilbert_dim(), A.hilbert_dim());
  const double e1_err = oracle::dense_norm(d.e1.op().dense() - one);
  const double e2_err = oracle::dense_norm(d.e2.op().dense());
  double y_err = 1.0;
  if (d.invariant_density) {
    y_err = oracle::dense_norm(d.invariant_density->dense() -
                               one / oracle::weighted_trace(A, one).real());
  }
  std::ostringstream os;
  os << "|e1-1|=" << e1_err << " |e2|=" << e2_err << " |Y-1/tau(1)|=" << y_err
     << " time=" << secs << "s";
  return {e1_err <= 1e-12 && e2_err <= 1e-12 && y_err <= 1e-12 && secs < 0.1, os.str()};
}

Outcome amplitude_damping_decay(const std::vector<Scenario>& items) {
  const Scenario& sc = gallery_item(items, "amplitude-damping");
  const auto t0 = Clock::now();
  NeveuOptions opt;
  opt.schedule = one_to(64);
  opt.seed = sc.seed.value_or(0);
  const NeveuDecomposition d = neveu_decompose(sc.action, opt);
  const double secs = seconds_since(t0);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  const bool ground_state = d.e1.rank() == 1 && oracle::dense_norm(d.e1.op().dense() - ground) <= 1e-12;
  double worst = 0.0;
  bool complete = d.decay.norms.size() == 64;
  for (std::size_t k = 0; complete && k < d.decay.norms.size(); ++k) {
    worst = std::max(worst, std::abs(d.decay.norms[k] - damping_average(0.5, d.decay.schedule[k])));
  }
  const double at10 = complete ? d.decay.norms[9] : -1.0;
  std::ostringstream os;
  os << "e1 ground=" << ground_state << " max|norm-geom|=" << worst << " a=10:" << at10
     << " time=" << secs << "s";
  return {ground_state && complete && worst <= 1e-10 && std::abs(at10 - 0.199805) < 1e-6 &&
              secs < 1.0,
          os.str()};
}

RealMatrix random_substochastic(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealMatrix k = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (u(rng) < 0.3) k(i, j) = u(rng);
    }
    const double s = k.row(i).sum();
    if (s > 0) k.row(i) /= s;
    if (u(rng) < 0.08) k.row(i) *= 0.4 + 0.5 * u(rng);
  }
  return k;
}

Outcome classical_oracle(std::uint64_t seed) {
  Rng rng(seed);
  const auto t0 = Clock::now();
  int agree = 0, nonempty = 0, transient = 0;
  const int n = 6;
  const auto C = TracialAlgebra::diagonal(n);
  for (int t = 0; t < 100; ++t) {
    const RealMatrix k = random_substochastic(n, rng);
    const auto expect = oracle::stationary_support_eigen(k);
    const auto d = neveu_decompose(
        SemigroupAction::discrete(SchemeKind::zplus_box, Picture::heisenberg, {from_classical(C, k)}));
    bool same = true;
    int support = 0;
    for (int i = 0; i < n; ++i) {
      const double got = d.e1.op().block(i)(0, 0).real();
      if (std::abs(got - (expect[i] ? 1.0 : 0.0)) > 1e-8) same = false;
      support += expect[i];
    }
    agree += same;
    nonempty += support > 0;
    transient += support < n;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << agree << "/100 agree (" << nonempty << " with invariant mass, " << transient
     << " with transient states) time=" << secs << "s";
  return {agree == 100 && secs < 30.0, os.str()};
}

double superop_norm(const Matrix& m) { return oracle::dense_norm(m); }

Outcome mean_projection(const std::vector<Scenario>& items) {
  std::ostringstream os;
  bool ok = true;
  double worst_idem = 0.0, worst_inv = 0.0;
  for (const auto& sc : items) {
    const MeanErgodicProjection mean = mean_ergodic_projection(sc.action, sc.tolerances.fixed);
    const Matrix& E = mean.matrix;
    const double idem = superop_norm(E * E - E);
    double inv = 0.0;
    for (const auto& g : sc.action.generators()) {
      inv = std::max(inv, superop_norm(E * g.matrix() - E));
      inv = std::max(inv, superop_norm(g.matrix() * E - E));
    }
    worst_idem = std::max(worst_idem, idem);
    worst_inv = std::max(worst_inv, inv);

    // C/a envelope with a non-increasing tail, recomputed from the averages.
    const std::vector<int> grid{4, 8, 16, 32, 64};
    std::vector<double> r;
    double num = 0.0, den = 0.0;
    for (int a : grid) {
      r.push_back(superop_norm(average_super(sc.action, a).matrix() - E));
      num += r.back() / a;
      den += 1.0 / (double(a) * a);
    }
    const double c = num / den;
    bool envelope = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (r[k] > 2.0 * c / grid[k] + 1e-12) envelope = false;
      if (k > 0 && r[k] > r[k - 1] + 1e-12) envelope = false;
    }
    const MeanEnvelope lib = mean_envelope(sc.action, mean);
    const bool item_ok = idem <= 1e-9 && inv <= 1e-9 && envelope && lib.verdict == Verdict::pass;
    if (!item_ok) {
      os << sc.name << " failed (idem " << idem << ", inv " << inv << ", envelope " << envelope
         << "); ";
    }
    ok = ok && item_ok;
  }
  os << items.size() << " actions, max|E^2-E|=" << worst_idem << " max|EG-E|,|GE-E|=" << worst_inv;
  return {ok, os.str()};
}

Outcome measure_exactness(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> nblocks(1, 3), bdim(1, 3), len(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, violations = 0, records = 0;
  double worst_delta = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> blocks;
    std::vector<double> weights;
    const int nb = nblocks(rng);
    for (int b = 0; b < nb; ++b) {
      blocks.push_back(bdim(rng));
      weights.push_back(0.1 + u(rng));
    }
    const TracialAlgebra A(blocks, weights, false);
    const Operator limit = random_hermitian(A, rng);
    std::vector<Operator> seq;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) seq.push_back(limit + random_hermitian(A, rng) * (2.0 * u(rng)));
    const double eps = 0.05 + 2.0 * u(rng);
    const auto cert = measure_certify(A, seq, limit, eps);
    for (int k = 0; k < n; ++k) {
      const Operator diff = seq[k] - limit;
      const double expect = oracle::mass_above(A, diff, eps, true);
      const double err = std::abs(cert.records[k].delta - expect);
      worst_delta = std::max(worst_delta, err);
      if (err > 1e-12 * std::max(1.0, expect)) ++mismatches;
      const Matrix e = cert.records[k].projection.op().dense();
      if (oracle::dense_norm(e * diff.dense() * e) > eps) ++violations;
      ++records;
    }
  }
  std::ostringstream os;
  os << "1000 instances, " << records << " records, delta mismatches=" << mismatches
     << " (max err " << worst_delta << "), corner violations=" << violations;
  return {mismatches == 0 && violations == 0, os.str()};
}

Outcome cross_term(const std::vector<Scenario>& items, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int runs = 0, evaluated = 0, violations = 0, reported = 0;
  double tightest = 0.0;
  for (const auto& sc : items) {
    const TracialAlgebra& A = sc.algebra;
    NeveuOptions nopt;
    nopt.seed = sc.seed.value_or(0);
    const NeveuDecomposition d = neveu_decompose(sc.action, nopt);
    const SemigroupAction dens = sc.action.in_picture(Picture::schrodinger);
    const Matrix e1 = d.e1.op().dense(), e2 = d.e2.op().dense();
    for (int t = 0; t < 100; ++t) {
      Operator x = random_positive(A, rng);
      x = x * (1.0 / trace(A, x).real());
      StochasticOptions opt;
      opt.eps = 0.02 + 0.2 * u(rng);
      opt.delta = 0.1 + 0.8 * u(rng);
      const StochasticReport rep = stochastic_run(sc.action, d, x, opt);
      ++runs;
      reported += rep.cross_violations;
      const Matrix p = oracle::round_projection(e1 * rep.e1_corner.projection.op().dense() * e1);
      const Matrix limit = rep.limit.dense();
      const double bound = std::sqrt(opt.eps * (opt.eps + oracle::dense_norm(p * e1 * limit * e1 * p)));
      for (std::size_t k = 0; k < rep.records.size(); ++k) {
        if (!rep.records[k].checked) continue;
        const int a = rep.records[k].index;
        const Matrix q = oracle::round_projection(
            e2 * rep.e2_corner.records[k].projection.op().dense() * e2);
        const Matrix r = p + q;
        const Matrix xa = average(dens, x, a).dense();
        const double cross = oracle::dense_norm(r * e1 * xa * e2 * r);
        ++evaluated;
        if (cross > bound + 1e-10) ++violations;
        tightest = std::max(tightest, cross / bound);
      }
    }
  }
  std::ostringstream os;
  os << runs << " runs on " << items.size() << " actions, " << evaluated
     << " indices past burn-in, violations=" << violations << " (library " << reported
     << "), max cross/bound=" << tightest;
  return {runs >= 1000 && evaluated > 0 && violations == 0 && reported == 0, os.str()};
}

Matrix permutation_matrix(const std::vector<int>& sigma) {
  const int n = static_cast<int>(sigma.size());
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(sigma[i], i) = 1.0;
  return m;
}

SuperOperator depolarizing(const TracialAlgebra& A, double p) {
  const Eigen::Index D = A.dim();
  const Vector one = Operator::identity(A).vec();
  Matrix tau_row = Matrix::Zero(1, D);
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    for (int i = 0; i < A.block_dim(b); ++i) {
      tau_row(0, A.vec_offset(b) + i + i * A.block_dim(b)) = A.weight(b);
    }
  }
  const Matrix G = (1.0 - p) * Matrix::Identity(D, D) + p * one * tau_row / A.total_mass();
  return from_matrix(A, G, 1);
}

Outcome lamperti_classification(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pass_cases = 0, pass_ok = 0, corner_fail = 0, fail_cases = 0, fail_ok = 0;
  double worst_corner = 0.0;

  auto expect_pass = [&](SemigroupAction action) {
    ++pass_cases;
    if (!action.attest_lamperti(20, seed + pass_cases).passed()) return;
    ++pass_ok;
    const auto d = neveu_decompose(action);
    const TracialAlgebra& A = action.algebra();
    const SemigroupAction dens = action.in_picture(Picture::schrodinger);
    for (int s = 0; s < 5; ++s) {
      const Operator x = s % 2 ? random_positive(A, rng) : random_operator(A, rng);
      const auto rep = corner_compatibility(action, d, x, 0);
      // Independent replay of both corners.
      const Matrix gx = dens.generators()[0].apply(x).dense();
      double gap = 0.0;
      for (const Projection* e : {&d.e1, &d.e2}) {
        const Operator ex = e->op() * x * e->op();
        const Matrix em = e->op().dense();
        const Operator diff = Operator::from_dense(A, em * gx * em) - dens.generators()[0].apply(ex);
        gap = std::max(gap, trace_norm(A, diff));
      }
      const double rel = gap / trace_norm(A, x);
      worst_corner = std::max(worst_corner, rel);
      if (!rep.passed() || rel > 1e-9) ++corner_fail;
    }
  };
  auto single = [](SuperOperator g) {
    return SemigroupAction::discrete(SchemeKind::zplus_box, Picture::heisenberg, {std::move(g)});
  };

  for (int t = 0; t < 10; ++t) {
    const int n = 2 + t % 4;
    std::vector<int> sigma = one_to(n);
    for (int& s : sigma) --s;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    // Permutation conjugations on M_n and on C^n.
    expect_pass(single(from_conjugation(TracialAlgebra::matrix_algebra(n), permutation_matrix(sigma))));
    expect_pass(single(from_conjugation(TracialAlgebra::diagonal(n), permutation_matrix(sigma))));
    // Deterministic kernels: permutations and partial injections.
    RealMatrix perm = RealMatrix::Zero(n, n), inj = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) perm(i, sigma[i]) = 1.0;
    for (int i = 0; i < n; ++i) {
      if (u(rng) < 0.7) inj(i, sigma[i]) = 1.0;
    }
    expect_pass(single(from_classical(TracialAlgebra::diagonal(n), perm)));
    expect_pass(single(from_classical(TracialAlgebra::diagonal(n), inj)));
  }

  // Depolarizing-type maps must fail with an orthogonal pair whose images overlap.
  const std::vector<TracialAlgebra> algebras{TracialAlgebra::matrix_algebra(2),
                                             TracialAlgebra::matrix_algebra(3),
                                             TracialAlgebra({2, 1}, {0.25, 0.5}, true)};
  for (const auto& A : algebras) {
    for (double p : {0.25, 0.5, 0.75, 1.0}) {
      ++fail_cases;
      auto action = single(depolarizing(A, p));
      const CheckReport rep = action.attest_lamperti(20, seed + 100 + fail_cases);
      if (rep.passed() || rep.witnesses.size() < 2) continue;
      const Matrix a = rep.witnesses[0].dense(), b = rep.witnesses[1].dense();
      const SemigroupAction dens = action.in_picture(Picture::schrodinger);
      const Matrix ga = dens.generators()[0].apply(rep.witnesses[0]).dense();
      const Matrix gb = dens.generators()[0].apply(rep.witnesses[1]).dense();
      const bool orthogonal = oracle::dense_norm(a * b) <= 1e-10 && rep.witnesses[0].positive() &&
                              rep.witnesses[1].positive();
      if (orthogonal && oracle::dense_norm(ga * gb) > 1e-8) ++fail_ok;
    }
  }
  std::ostringstream os;
  os << "passing " << pass_ok << "/" << pass_cases << " (corner failures " << corner_fail
     << ", max rel gap " << worst_corner << "), depolarizing witnessed " << fail_ok << "/"
     << fail_cases;
  return {pass_ok == pass_cases && corner_fail == 0 && fail_ok == fail_cases, os.str()};
}

Outcome convex_hull(const std::vector<Scenario>& items) {
  const Scenario& swap = gallery_item(items, "swap-automorphism");
  const Operator x = swap.observable.value_or(Operator::identity(swap.algebra));
  const auto s = convex_hull_residual(swap.action, x, 2);
  const Scenario& damp = gallery_item(items, "amplitude-damping");
  const TracialAlgebra& A = damp.algebra;
  const Operator e11 = Operator::diagonal(A, {0.0, 1.0});
  double worst = -1.0;
  bool ok = s.residual <= 1e-10;
  for (int a = 1; a <= 16; ++a) {
    const double r = convex_hull_residual(damp.action, e11, a).residual;
    const double bound = std::pow(0.5, a);
    worst = std::max(worst, r - bound);
    if (r > bound + 1e-10) ok = false;
  }
  std::ostringstream os;
  os << "swap a=2 residual=" << s.residual << ", damping max(residual-(1-g)^a)=" << worst
     << " over a=1..16";
  return {ok, os.str()};
}

Outcome moving_bump() {
  const auto seq = moving_bump_sequence();
  const auto C16 = TracialAlgebra::diagonal(16);
  const Operator zero = Operator::zero(C16);
  const auto m = measure_certify(C16, seq, zero, 0.5, {}, 1.0 / 16.0);
  const auto b = bau_certify(C16, seq, zero, 0.25, 0.5);
  std::ostringstream os;
  os << seq.size() << " terms, measure " << to_string(m.verdict) << " (n0="
     << (m.n0 ? std::to_string(*m.n0) : "none") << "), bau " << to_string(b.verdict)
     << " (delta=" << b.delta << ", final tail sup=" << (b.tail_sups.empty() ? -1.0 : b.tail_sups.back())
     << ")";
  return {m.verdict == Verdict::pass && b.verdict == Verdict::fail, os.str()};
}

Outcome uniqueness(const std::vector<Scenario>& items, std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream os;
  bool ok = true;
  double worst = 0.0;
  for (const auto& sc : items) {
    const TracialAlgebra& A = sc.algebra;
    NeveuOptions nopt;
    nopt.seed = sc.seed.value_or(0);
    const NeveuDecomposition d = neveu_decompose(sc.action, nopt);
    const Projection base = maximal_support(A, d.schrodinger_mean, uniform_density(A));
    for (int t = 0; t < 10; ++t) {
      const Projection other = maximal_support(A, d.schrodinger_mean, random_faithful_density(A, rng));
      const double dist = oracle::dense_norm(other.op().dense() - base.op().dense());
      worst = std::max(worst, dist);
      if (other.rank() != base.rank() || dist > 1e-8) {
        ok = false;
        os << sc.name << " probe " << t << " differs; ";
      }
    }
    if (oracle::dense_norm(d.e1.op().dense() - base.op().dense()) > 1e-8) {
      ok = false;
      os << sc.name << " e1 differs from the uniform support; ";
    }
  }
  os << items.size() << " actions x 10 densities, max|delta e1|=" << worst;
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::uint64_t seed = 20240601;
  const std::vector<Scenario> items = gallery();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"identity decomposition", [&] { return identity_decomposition(items); }},
      {"amplitude damping decay", [&] { return amplitude_damping_decay(items); }},
      {"classical stationary support", [&] { return classical_oracle(seed + 3); }},
      {"mean ergodic projection", [&] { return mean_projection(items); }},
      {"measure certifier exactness", [&] { return measure_exactness(seed + 5); }},
      {"cross-term bound", [&] { return cross_term(items, seed + 6); }},
      {"lamperti classification", [&] { return lamperti_classification(seed + 7); }},
      {"convex hull residual", [&] { return convex_hull(items); }},
      {"measure vs bau separation", [] { return moving_bump(); }},
      {"decomposition uniqueness", [&] { return uniqueness(items, seed + 10); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("[%s] %2zu %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                out.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
