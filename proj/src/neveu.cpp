#include "ncerg/neveu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncerg {

namespace {

double generator_scale(const SemigroupAction& action) {
  double s = 1.0;
  if (action.scheme().kind == SchemeKind::rplus_cube) {
    for (const auto& L : action.continuous_generators()) s = std::max(s, matrix_norm(L));
  } else {
    for (const auto& g : action.generators()) s = std::max(s, matrix_norm(g.matrix()));
  }
  return s;
}

// Matrices whose joint kernel is the fixed space.
std::vector<Matrix> kernel_targets(const SemigroupAction& action) {
  std::vector<Matrix> out;
  if (action.scheme().kind == SchemeKind::rplus_cube) {
    out = action.continuous_generators();
  } else {
    for (const auto& g : action.generators()) {
      out.push_back(g.matrix() - Matrix::Identity(g.matrix().rows(), g.matrix().cols()));
    }
  }
  return out;
}

// Spectral projection of M onto ker(M) along the range of M. Requires the
// zero eigenvalue to be semisimple.
Matrix riesz_null_projection(const Matrix& M, double threshold, int* null_dim) {
  const Eigen::Index D = M.rows();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  const Eigen::Index k = D - rank;
  if (null_dim) *null_dim = static_cast<int>(k);
  if (k == 0) return Matrix::Zero(D, D);
  const Matrix right = svd.matrixV().rightCols(k);
  const Matrix left = svd.matrixU().rightCols(k);
  const Matrix overlap = left.adjoint() * right;
  Eigen::JacobiSVD<Matrix> osvd(overlap);
  const auto& os = osvd.singularValues();
  if (os(os.size() - 1) < 1e-8) {
    raise(ErrorCode::numerical,
          "fixed eigenvalue is not semisimple; the Cesaro limit is not a projection");
  }
  return right * overlap.partialPivLu().solve(left.adjoint());
}

Verdict fold(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
  return Verdict::pass;
}

CheckReport threshold_check(const std::string& name, double measured, double tol,
                            const std::string& detail = {}) {
  CheckReport r;
  r.name = name;
  r.measured = measured;
  r.tolerances["max"] = tol;
  r.verdict = measured <= tol ? Verdict::pass : Verdict::fail;
  r.detail = detail;
  return r;
}

CheckReport not_applicable(const std::string& name, const std::string& why) {
  CheckReport r;
  r.name = name;
  r.verdict = Verdict::pass;
  r.detail = why;
  return r;
}

// Rank-one projections q_j with sum q_j = p, one per eigenvector.
std::vector<Projection> minimal_decomposition(const TracialAlgebra& A, const Projection& p) {
  std::vector<Projection> out;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const Matrix& m = p.op().block(b);
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) * 0.5);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()(k) < 0.5) continue;
      std::vector<Matrix> blocks;
      for (int n : A.blocks()) blocks.push_back(Matrix::Zero(n, n));
      const Vector v = es.eigenvectors().col(k);
      blocks[b] = v * v.adjoint();
      std::vector<int> ranks(A.num_blocks(), 0);
      ranks[b] = 1;
      out.push_back(Projection::unchecked(Operator(std::move(blocks)), std::move(ranks)));
    }
  }
  return out;
}

}  // namespace

Operator MeanErgodicProjection::apply(const TracialAlgebra& A, const Operator& x) const {
  require_conforms(A, x, "mean ergodic projection");
  return Operator::from_vec(A, matrix * x.vec());
}

std::vector<Operator> fixed_space(const SemigroupAction& action, double tol) {
  const TracialAlgebra& A = action.algebra();
  const auto targets = kernel_targets(action);
  const Eigen::Index D = A.dim();
  Matrix stacked(D * static_cast<Eigen::Index>(targets.size()), D);
  for (std::size_t i = 0; i < targets.size(); ++i) stacked.middleRows(i * D, D) = targets[i];
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = tol * generator_scale(action);
  std::vector<Operator> basis;
  for (Eigen::Index k = 0; k < D; ++k) {
    if (k >= sv.size() || sv(k) <= threshold) {
      basis.push_back(Operator::from_vec(A, svd.matrixV().col(k)));
    }
  }
  return basis;
}

MeanErgodicProjection mean_ergodic_projection(const SemigroupAction& action, double tol) {
  const TracialAlgebra& A = action.algebra();
  const Eigen::Index D = A.dim();
  const Matrix I = Matrix::Identity(D, D);
  MeanErgodicProjection out;
  out.picture = action.picture();
  const double threshold = tol * generator_scale(action);

  if (action.scheme().kind == SchemeKind::finite_group) {
    out.matrix = Matrix::Zero(D, D);
    for (const auto& g : action.generators()) out.matrix += g.matrix();
    out.matrix /= static_cast<double>(action.generators().size());
    for (const auto& g : action.generators()) {
      int dim = 0;
      riesz_null_projection(g.matrix() - I, threshold, &dim);
      out.generator_fixed_dims.push_back(dim);
    }
  } else {
    out.matrix = I;
    for (const auto& t : kernel_targets(action)) {
      int dim = 0;
      out.matrix = out.matrix * riesz_null_projection(t, threshold, &dim);
      out.generator_fixed_dims.push_back(dim);
    }
  }
  out.fixed_basis = fixed_space(action, tol);

  out.idempotence_residual = matrix_norm(out.matrix * out.matrix - out.matrix);
  for (const auto& g : action.generators()) {
    out.invariance_residual = std::max(
        {out.invariance_residual, matrix_norm(out.matrix * g.matrix() - out.matrix),
         matrix_norm(g.matrix() * out.matrix - out.matrix)});
  }
  out.residual_16 = matrix_norm(average_super(action, 16).matrix() - out.matrix);
  out.residual_64 = matrix_norm(average_super(action, 64).matrix() - out.matrix);
  // C fitted from a = 16; the iterated limit must stay within 10 C / a.
  const double envelope = 10.0 * (16.0 * out.residual_16) / 64.0 + 1e-9;
  if (out.residual_64 > envelope) {
    std::ostringstream os;
    os.precision(6);
    os << "mean ergodic projection disagrees with the averages: ||A_16 - E|| = "
       << out.residual_16 << ", ||A_64 - E|| = " << out.residual_64;
    raise(ErrorCode::numerical, os.str());
  }
  return out;
}

MeanEnvelope mean_envelope(const SemigroupAction& action, const MeanErgodicProjection& mean,
                           const std::vector<int>& indices) {
  if (mean.picture != action.picture()) {
    raise(ErrorCode::invalid_argument, "mean projection and action use different pictures");
  }
  MeanEnvelope out;
  out.indices = indices;
  double num = 0.0, den = 0.0;
  for (int a : indices) {
    const double r = matrix_norm(average_super(action, a).matrix() - mean.matrix);
    out.residuals.push_back(r);
    num += r / a;
    den += 1.0 / (static_cast<double>(a) * a);
  }
  out.fitted_c = den > 0.0 ? num / den : 0.0;
  bool ok = true;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (out.residuals[k] > 2.0 * out.fitted_c / indices[k] + 1e-12) ok = false;
    if (k > 0 && out.residuals[k] > out.residuals[k - 1] + 1e-12) ok = false;
  }
  out.verdict = ok ? Verdict::pass : Verdict::fail;
  return out;
}

namespace {

void require_faithful(const TracialAlgebra& A, const Operator& phi0) {
  require_conforms(A, phi0, "invariant_state");
  if (!phi0.positive()) raise(ErrorCode::not_positive, "initial density is not positive");
  const double lo = min_eigenvalue(hermitian_part(phi0));
  if (!(lo > 1e-12 * std::max(1.0, op_norm(phi0)))) {
    raise(ErrorCode::invalid_argument, "initial density is not faithful");
  }
}

}  // namespace

std::optional<Operator> invariant_state(const SemigroupAction& action, const Operator& phi0,
                                        double tol) {
  const TracialAlgebra& A = action.algebra();
  require_faithful(A, phi0);
  const auto es = mean_ergodic_projection(action.in_picture(Picture::schrodinger), tol);
  const Operator y = hermitian_part(es.apply(A, phi0));
  const double mass = trace(A, y).real();
  if (mass <= 1e-12) return std::nullopt;
  return y * (1.0 / mass);
}

Projection maximal_support(const TracialAlgebra& A, const MeanErgodicProjection& schrodinger,
                           const Operator& phi0) {
  require_faithful(A, phi0);
  const Operator y = hermitian_part(schrodinger.apply(A, phi0));
  const double mass = trace(A, y).real();
  if (mass <= 1e-12) return Projection::zero(A);
  return support(A, y * (1.0 / mass));
}

// ---------------------------------------------------------------------------

DecayReport weakly_wandering_certificate(const SemigroupAction& action, const Operator& x,
                                         const std::vector<int>& schedule, double decay_tol,
                                         int window) {
  const TracialAlgebra& A = action.algebra();
  require_conforms(A, x, "weakly_wandering_certificate");
  if (!x.positive()) raise(ErrorCode::not_positive, "weakly_wandering_certificate: x is not positive");
  const SemigroupAction h = action.in_picture(Picture::heisenberg);
  DecayReport r;
  r.schedule = schedule;
  r.decay_tol = decay_tol;
  for (int a : schedule) r.norms.push_back(op_norm(average(h, x, a)));
  if (r.norms.empty()) {
    r.verdict = Verdict::unknown;
    r.detail = "empty schedule";
    return r;
  }
  const std::size_t n = r.norms.size();
  const std::size_t w = std::min<std::size_t>(std::max(window, 2), n);
  std::vector<double> lx, ly;
  bool decreasing = true;
  for (std::size_t k = n - w; k < n; ++k) {
    if (k > n - w && r.norms[k] > r.norms[k - 1] * (1.0 + 1e-12) + 1e-15) decreasing = false;
    if (r.norms[k] > 1e-300) {
      lx.push_back(std::log(static_cast<double>(schedule[k])));
      ly.push_back(std::log(r.norms[k]));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k];
      my += ly[k];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ly[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    r.slope = sxx > 0 ? sxy / sxx : 0.0;
  }
  if (r.norms.back() <= decay_tol) {
    r.verdict = Verdict::pass;
    r.detail = "final norm below decay tolerance";
  } else if (n >= 2 && r.slope <= -0.9 && decreasing) {
    r.verdict = Verdict::pass;
    r.detail = "tail decays at rate 1/a or faster";
  } else {
    r.verdict = Verdict::fail;
    std::ostringstream os;
    os.precision(6);
    os << "decay stalls: final norm " << r.norms.back() << ", tail slope " << r.slope;
    r.detail = os.str();
  }
  return r;
}

InfProfile inf_profile(const SemigroupAction& action, const Operator& phi, const Projection& p,
                       int a_max) {
  const TracialAlgebra& A = action.algebra();
  require_conforms(A, phi, "inf_profile");
  if (a_max < 1) raise(ErrorCode::invalid_argument, "inf_profile: a_max must be >= 1");
  const SemigroupAction h = action.in_picture(Picture::heisenberg);
  InfProfile out;
  out.value = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= a_max; ++a) {
    const double v = trace(A, phi * average(h, p.op(), a)).real();
    if (v < out.value) {
      out.value = v;
      out.argmin = a;
    }
  }
  return out;
}

Operator wandering_sum(const std::vector<Projection>& projections,
                       const std::vector<double>& weights) {
  if (projections.empty()) raise(ErrorCode::invalid_argument, "wandering_sum: no projections");
  if (!weights.empty() && weights.size() != projections.size()) {
    raise(ErrorCode::invalid_argument, "wandering_sum: one weight per projection");
  }
  Operator sum = projections.front().op() * 0.0;
  double w = 1.0;
  for (std::size_t j = 0; j < projections.size(); ++j) {
    if (!projections[j].op().same_shape(sum)) {
      raise(ErrorCode::shape_mismatch, "wandering_sum: projection " + std::to_string(j) +
                                           " has a different shape");
    }
    w *= 0.5;
    sum = sum + projections[j].op() * (weights.empty() ? w : weights[j]);
  }
  return sum;
}

WanderingSumReport certify_wandering_sum(const SemigroupAction& action,
                                         const std::vector<Projection>& projections,
                                         const std::vector<int>& schedule, double decay_tol,
                                         int window) {
  const TracialAlgebra& A = action.algebra();
  WanderingSumReport r;
  r.sum = wandering_sum(projections);
  for (const auto& q : projections) {
    r.parts.push_back(weakly_wandering_certificate(action, q.op(), schedule, decay_tol, window));
  }
  r.combined = weakly_wandering_certificate(action, r.sum, schedule, decay_tol, window);
  Operator total = Operator::zero(A);
  for (const auto& q : projections) total = total + q.op();
  const Projection join = support(A, total);
  const Projection s = support(A, r.sum);
  r.support_is_join = s.rank() == join.rank() && op_norm(s.op() - join.op()) <= 1e-8;
  const bool parts_ok = std::all_of(r.parts.begin(), r.parts.end(),
                                    [](const DecayReport& d) { return d.verdict == Verdict::pass; });
  if (!r.support_is_join || r.combined.verdict == Verdict::fail) {
    r.verdict = Verdict::fail;
  } else if (parts_ok && r.combined.verdict == Verdict::pass) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::unknown;
  }
  return r;
}

// ---------------------------------------------------------------------------

Verdict NeveuDecomposition::verdict() const {
  Verdict v = decay.verdict;
  for (const auto& c : checks) v = fold(v, c.verdict);
  return v;
}

NeveuDecomposition neveu_decompose(const SemigroupAction& action, const NeveuOptions& options) {
  if (action.commuting().verdict == Verdict::fail) {
    raise(ErrorCode::precondition, "neveu_decompose: generators do not commute");
  }
  if (action.contraction().verdict == Verdict::fail) {
    raise(ErrorCode::precondition,
          "neveu_decompose: action is not contractive (" + action.contraction().detail + ")");
  }
  const TracialAlgebra& A = action.algebra();
  const SemigroupAction heis = action.in_picture(Picture::heisenberg);
  const SemigroupAction schr = action.in_picture(Picture::schrodinger);

  NeveuDecomposition out;
  out.sampled_positivity = action.sampled_positivity();
  out.heisenberg_mean = mean_ergodic_projection(heis, options.tol_fixed);
  out.schrodinger_mean = mean_ergodic_projection(schr, options.tol_fixed);
  out.checks.push_back(threshold_check(
      "mean-duality",
      matrix_norm(dual_matrix(A, out.heisenberg_mean.matrix) - out.schrodinger_mean.matrix), 1e-8,
      "Heisenberg and density-picture projections are dual"));

  const Operator phi0 = uniform_density(A);
  const Operator ybar = hermitian_part(out.schrodinger_mean.apply(A, phi0));
  const double mass = trace(A, ybar).real();
  if (mass > 1e-12) {
    out.invariant_density = ybar * (1.0 / mass);
    out.e1 = support(A, *out.invariant_density);
  } else {
    out.e1 = Projection::zero(A);
  }
  out.e2 = out.e1.complement();
  out.wandering_witness = out.e2.op();

  if (out.e2.is_zero()) {
    out.decay.decay_tol = options.decay_tol;
    out.decay.verdict = Verdict::pass;
    out.decay.detail = "e2 = 0; nothing to certify";
  } else {
    out.decay = weakly_wandering_certificate(heis, out.e2.op(), options.schedule,
                                             options.decay_tol, options.window);
  }

  // Uniqueness of e1 across faithful initial densities.
  {
    CheckReport r;
    r.name = "uniqueness";
    r.seed = options.seed;
    r.samples = options.probes;
    r.tolerances["projection_distance"] = 1e-8;
    r.verdict = Verdict::pass;
    Rng rng(options.seed + 101);
    for (int k = 0; k < options.probes; ++k) {
      const Operator phi = random_faithful_density(A, rng);
      const Projection e = maximal_support(A, out.schrodinger_mean, phi);
      const double d = op_norm(e.op() - out.e1.op());
      r.measured = std::max(r.measured, d);
      if (e.rank() != out.e1.rank() || d > 1e-8) {
        r.verdict = Verdict::fail;
        r.witnesses = {phi, e.op()};
        r.detail = "probe " + std::to_string(k) + " produced a different e1";
        break;
      }
    }
    out.checks.push_back(std::move(r));
  }

  const auto& gens_h = heis.generators();
  const auto& gens_s = schr.generators();
  Rng rng(options.seed + 202);

  if (out.invariant_density) {
    const Operator& Y = *out.invariant_density;
    double worst = 0.0;
    for (const auto& g : gens_s) worst = std::max(worst, op_norm(g.apply(Y) - Y));
    out.checks.push_back(threshold_check("invariant-density", worst, 1e-9));

    double rho = 0.0;
    for (int t = 0; t < 8; ++t) {
      const Operator x = random_operator(A, rng);
      for (const auto& g : gens_h) {
        rho = std::max(rho, std::abs(trace(A, Y * g.apply(x)) - trace(A, Y * x)) / op_norm(x));
      }
    }
    out.checks.push_back(threshold_check("state-invariance", rho, 1e-9));
    out.checks.push_back(threshold_check(
        "state-annihilates-witness", std::abs(trace(A, Y * out.wandering_witness)), 1e-10));
  } else {
    out.checks.push_back(not_applicable("invariant-density", "no invariant state"));
  }

  out.checks.push_back(threshold_check("support-orthogonality",
                                       op_norm(out.e1.op() * out.wandering_witness), 1e-10));
  out.checks.push_back(threshold_check(
      "mean-annihilates-e2", op_norm(out.heisenberg_mean.apply(A, out.e2.op())), 1e-9));

  {
    double worst = 0.0;
    for (const auto& g : gens_h) {
      const Operator ge2 = g.apply(out.e2.op());
      worst = std::max(worst, op_norm(ge2 - out.e2.op() * ge2 * out.e2.op()));
      worst = std::max(worst, op_norm(ge2) - 1.0);
      if (!order_leq(hermitian_part(ge2), out.e2.op())) worst = std::max(worst, 1.0);
    }
    out.checks.push_back(threshold_check("e2-subinvariant", worst, 1e-9));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      const Operator X = random_positive(A, rng);
      const Operator corner = out.e1.op() * X * out.e1.op();
      for (const auto& g : gens_s) {
        const Operator img = g.apply(corner);
        worst = std::max(worst, op_norm(out.e2.op() * img * out.e2.op()) / op_norm(X));
      }
    }
    out.checks.push_back(threshold_check("e1-corner-invariant", worst, 1e-9));
  }

  // Replay of the wandering-sum construction on rank-one pieces of e2.
  if (!out.e2.is_zero()) {
    const auto pieces = minimal_decomposition(A, out.e2);
    const auto ws = certify_wandering_sum(heis, pieces, options.schedule, options.decay_tol,
                                          options.window);
    const Projection s = support(A, ws.sum);
    CheckReport r;
    r.name = "wandering-sum";
    r.samples = static_cast<int>(pieces.size());
    r.measured = op_norm(s.op() - out.e2.op());
    r.tolerances["projection_distance"] = 1e-8;
    const bool agrees = r.measured <= 1e-8 && ws.combined.verdict == out.decay.verdict;
    r.verdict = agrees && ws.support_is_join ? Verdict::pass : Verdict::fail;
    r.detail = agrees ? "sum of 2^-j q_j has support e2 and the same certificate verdict"
                      : "wandering sum disagrees with x0 = e2";
    out.checks.push_back(std::move(r));
  }
  return out;
}

}  // namespace ncerg
