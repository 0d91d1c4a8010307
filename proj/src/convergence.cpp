#include "ncerg/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncerg {

namespace {

Verdict fold(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
  return Verdict::pass;
}

std::vector<int> resolve_indices(std::vector<int> indices, std::size_t n) {
  if (indices.empty()) {
    indices.resize(n);
    std::iota(indices.begin(), indices.end(), 1);
  }
  if (indices.size() != n) {
    std::ostringstream os;
    os << "sequence has " << n << " terms but " << indices.size() << " indices";
    raise(ErrorCode::shape_mismatch, os.str());
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (indices[k] <= indices[k - 1]) {
      raise(ErrorCode::invalid_argument, "indices must be strictly increasing");
    }
  }
  return indices;
}

// tau of a projection from its block ranks.
double projection_mass(const TracialAlgebra& A, const std::vector<int>& ranks) {
  double s = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) s += A.weight(b) * ranks[b];
  return s;
}

double defect(const TracialAlgebra& A, const std::vector<int>& ranks) {
  double s = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    s += A.weight(b) * (A.block_dim(b) - ranks[b]);
  }
  return s;
}

// Projection nearest to a numerically perturbed one.
Projection round_projection(const TracialAlgebra& A, const Operator& p) {
  return spectral_projection(A, hermitian_part(p), Interval::above(0.5));
}

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, shift = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) shift = t;
  }
  return (v.array() - shift).max(0.0).matrix();
}

double quadratic(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double c,
                 const Eigen::VectorXd& w) {
  return std::max(0.0, w.dot(G * w) - 2.0 * b.dot(w) + c);
}

// Primal active-set method for min w'Gw - 2b'w over the simplex, started
// from a feasible point. Returns false if the iteration cap is hit.
bool active_set_polish(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                       Eigen::VectorXd& w) {
  const Eigen::Index m = w.size();
  std::vector<bool> free(m);
  for (Eigen::Index i = 0; i < m; ++i) free[i] = w(i) > 1e-12;
  for (int iter = 0; iter < 10 * static_cast<int>(m) + 10; ++iter) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (free[i]) idx.push_back(i);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) kkt(r, c) = G(idx[r], idx[c]);
      kkt(r, k) = 1.0;
      kkt(k, r) = 1.0;
      rhs(r) = b(idx[r]);
    }
    rhs(k) = 1.0;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < k; ++r) z(idx[r]) = sol(r);

    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index i = idx[r];
      if (z(i) < 0.0 && w(i) - z(i) > 0.0) {
        const double s = w(i) / (w(i) - z(i));
        if (s < step) {
          step = s;
          blocking = i;
        }
      }
    }
    if (blocking >= 0) {
      w += step * (z - w);
      w(blocking) = 0.0;
      free[blocking] = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (free[i] && w(i) <= 0.0) {
          w(i) = 0.0;
          free[i] = false;
        }
      }
      continue;
    }
    w = z.cwiseMax(0.0);
    w /= w.sum();
    // Simplex KKT: gradient constant on the support and not smaller off it.
    // With G w + mu 1 = b on the support, optimality needs G w - b + mu >= 0.
    const Eigen::VectorXd grad = G * w - b;
    Eigen::Index enter = -1;
    double worst = -1e-12 * (1.0 + std::abs(sol(k)));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (free[i]) continue;
      const double slack = grad(i) + sol(k);
      if (slack < worst) {
        worst = slack;
        enter = i;
      }
    }
    if (enter < 0) return true;
    free[enter] = true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

MeasureCertificate measure_certify(const TracialAlgebra& A, const std::vector<Operator>& sequence,
                                   const Operator& limit, double eps, std::vector<int> indices,
                                   double delta_tol, int window) {
  if (!(eps > 0.0)) raise(ErrorCode::invalid_argument, "eps must be positive");
  if (window < 1) raise(ErrorCode::invalid_argument, "window must be at least 1");
  require_conforms(A, limit, "measure_certify limit");
  indices = resolve_indices(std::move(indices), sequence.size());

  MeasureCertificate out;
  out.eps = eps;
  out.delta_tol = delta_tol;
  out.window = window;
  const Interval band{-std::numeric_limits<double>::infinity(), eps, true, false};
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    require_conforms(A, sequence[k], "measure_certify term");
    const Operator diff = sequence[k] - limit;
    MeasureRecord r;
    r.index = indices[k];
    r.projection = spectral_projection(A, abs(diff), band);
    r.rank = r.projection.rank();
    r.delta = defect(A, r.projection.ranks());
    const Operator& e = r.projection.op();
    r.corner_norm = op_norm(e * diff * e);
    if (r.corner_norm >= eps) ++out.violations;
    out.records.push_back(std::move(r));
  }

  std::size_t start = out.records.size();
  while (start > 0 && out.records[start - 1].delta <= delta_tol) --start;
  const std::size_t tail = out.records.size() - start;
  if (tail > 0) out.n0 = out.records[start].index;
  const std::size_t need = std::min<std::size_t>(window, out.records.size());
  std::ostringstream os;
  if (out.records.empty()) {
    out.verdict = Verdict::pass;
    os << "empty sequence";
  } else if (out.violations > 0) {
    out.verdict = Verdict::fail;
    os << out.violations << " corner norms reached eps";
  } else if (tail >= need) {
    out.verdict = Verdict::pass;
    os << "delta <= " << delta_tol << " from index " << *out.n0 << " on " << tail << " points";
  } else {
    out.verdict = Verdict::fail;
    os << "tail within delta_tol has " << tail << " points, need " << need;
  }
  out.detail = os.str();
  return out;
}

BauCertificate bau_certify(const TracialAlgebra& A, const std::vector<Operator>& sequence,
                           const Operator& limit, double delta_budget, double eps,
                           std::vector<int> indices, int n0, int window) {
  if (!(delta_budget > 0.0 && delta_budget < 1.0)) {
    raise(ErrorCode::invalid_argument, "delta budget must lie in (0, 1)");
  }
  if (!(eps > 0.0)) raise(ErrorCode::invalid_argument, "eps must be positive");
  if (window < 1) raise(ErrorCode::invalid_argument, "window must be at least 1");
  require_conforms(A, limit, "bau_certify limit");
  indices = resolve_indices(std::move(indices), sequence.size());

  std::size_t first = 0;
  while (first < indices.size() && indices[first] < n0) ++first;
  if (first == indices.size()) {
    raise(ErrorCode::invalid_argument, "no index at or after n0");
  }

  BauCertificate out;
  out.eps = eps;
  out.delta_budget = delta_budget;
  out.window = window;
  out.n0 = indices[first];
  std::vector<Operator> diffs;
  Operator weighted = Operator::zero(A);
  double w = 1.0;
  for (std::size_t k = first; k < sequence.size(); ++k) {
    require_conforms(A, sequence[k], "bau_certify term");
    diffs.push_back(sequence[k] - limit);
    weighted = weighted + abs(diffs.back()) * w;
    w *= 0.5;
    out.indices.push_back(indices[k]);
  }

  const auto comps = spectral_decompose(A, hermitian_part(weighted));
  std::vector<double> mass_above(comps.size(), 0.0);
  for (std::size_t j = comps.size(); j-- > 1;) {
    mass_above[j - 1] = mass_above[j] + projection_mass(A, comps[j].projection.ranks());
  }
  std::size_t cut = 0;
  while (mass_above[cut] > delta_budget) ++cut;
  out.theta = comps[cut].value;
  Operator e = Operator::zero(A);
  std::vector<int> ranks(A.num_blocks(), 0);
  for (std::size_t j = 0; j <= cut; ++j) {
    e = e + comps[j].projection.op();
    for (std::size_t b = 0; b < ranks.size(); ++b) ranks[b] += comps[j].projection.ranks()[b];
  }
  out.projection = Projection::unchecked(e, ranks);
  out.delta = defect(A, ranks);

  for (const auto& d : diffs) out.corner_norms.push_back(op_norm(e * d * e));
  out.tail_sups.assign(diffs.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = diffs.size(); k-- > 0;) {
    running = std::max(running, out.corner_norms[k]);
    out.tail_sups[k] = running;
  }
  std::size_t start = 0;
  while (start < diffs.size() && !(out.tail_sups[start] < eps)) ++start;
  const std::size_t tail = diffs.size() - start;
  if (tail > 0) out.tail_start = out.indices[start];
  const std::size_t need = std::min<std::size_t>(window, diffs.size());
  std::ostringstream os;
  if (tail >= need) {
    out.verdict = Verdict::pass;
    os << "tail sup < " << eps << " from index " << *out.tail_start << " on " << tail
       << " points, tau(1 - e) = " << out.delta;
  } else {
    out.verdict = Verdict::fail;
    os << "tail sup stays >= " << eps << " (last " << out.tail_sups.back()
       << "); tau(1 - e) = " << out.delta;
  }
  out.detail = os.str();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<int> default_stochastic_schedule() {
  std::vector<int> s(64);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

StochasticReport stochastic_run(const SemigroupAction& action,
                                const NeveuDecomposition& decomposition, const Operator& x,
                                const StochasticOptions& options) {
  const TracialAlgebra& A = action.algebra();
  require_conforms(A, x, "stochastic_run density");
  if (!conforms(A, decomposition.e1.op()) || !conforms(A, decomposition.e2.op()) ||
      decomposition.schrodinger_mean.matrix.rows() != A.dim()) {
    raise(ErrorCode::precondition, "stochastic_run needs a decomposition of this action");
  }
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    raise(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  }
  const std::vector<int> schedule =
      options.schedule.empty() ? default_stochastic_schedule() : options.schedule;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] < 1 || (k > 0 && schedule[k] <= schedule[k - 1])) {
      raise(ErrorCode::invalid_argument, "schedule must be positive and strictly increasing");
    }
  }

  const SemigroupAction dens = action.in_picture(Picture::schrodinger);
  const Operator& e1 = decomposition.e1.op();
  const Operator& e2 = decomposition.e2.op();

  StochasticReport out;
  out.limit = decomposition.schrodinger_mean.apply(A, x);
  std::vector<Operator> averages, corner1, corner2;
  for (int a : schedule) {
    averages.push_back(average(dens, x, a));
    corner1.push_back(e1 * averages.back() * e1);
    corner2.push_back(e2 * averages.back() * e2);
  }
  const double half = 0.5 * options.delta;
  out.e1_corner = bau_certify(A, corner1, out.limit, half, options.eps, schedule, schedule.front(),
                              options.window);
  out.e2_corner = measure_certify(A, corner2, Operator::zero(A), options.eps, schedule, half,
                                  options.window);

  if (out.e1_corner.tail_start && out.e2_corner.n0) {
    out.burn_in = std::max(*out.e1_corner.tail_start, *out.e2_corner.n0);
  }
  out.cross_term_applicable = x.positive();

  const Projection p = round_projection(A, e1 * out.e1_corner.projection.op() * e1);
  const double p_limit = op_norm(p.op() * out.limit * p.op());
  const double bound = std::sqrt(options.eps * (options.eps + p_limit));
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    CornerRecord rec;
    rec.index = schedule[k];
    const Projection q = round_projection(A, e2 * out.e2_corner.records[k].projection.op() * e2);
    std::vector<int> ranks = p.ranks();
    for (std::size_t b = 0; b < ranks.size(); ++b) ranks[b] += q.ranks()[b];
    rec.r_defect = defect(A, ranks);
    const Operator r = p.op() + q.op();
    rec.cross_norm = op_norm(r * e1 * averages[k] * e2 * r);
    rec.cross_bound = bound;
    rec.checked = out.burn_in && schedule[k] >= *out.burn_in;
    if (rec.checked) {
      if (!(rec.r_defect < options.delta)) ++out.r_violations;
      if (out.cross_term_applicable && rec.cross_norm > bound + 1e-10) ++out.cross_violations;
    }
    out.records.push_back(rec);
  }

  if (action.lamperti() && action.lamperti()->passed()) {
    for (std::size_t g = 0; g < dens.generators().size(); ++g) {
      out.corner_checks.push_back(corner_compatibility(action, decomposition, x, g));
    }
  }

  Verdict v = fold(out.e1_corner.verdict, out.e2_corner.verdict);
  std::ostringstream os;
  if (!out.burn_in) {
    v = Verdict::fail;
    os << "no combined burn-in";
  } else {
    os << "burn-in " << *out.burn_in;
  }
  if (out.cross_violations > 0) {
    v = Verdict::fail;
    os << "; " << out.cross_violations << " cross-term violations";
  }
  if (out.r_violations > 0) {
    v = Verdict::fail;
    os << "; " << out.r_violations << " indices with tau(1 - r) >= delta";
  }
  if (!out.cross_term_applicable) os << "; cross-term bound skipped (X not positive)";
  for (const auto& c : out.corner_checks) v = fold(v, c.verdict);
  out.verdict = v;
  out.detail = os.str();
  return out;
}

CheckReport corner_compatibility(const SemigroupAction& action,
                                 const NeveuDecomposition& decomposition, const Operator& x,
                                 std::size_t generator) {
  if (!action.lamperti() || !action.lamperti()->passed()) {
    raise(ErrorCode::precondition, "corner compatibility needs a passing Lamperti attestation");
  }
  const TracialAlgebra& A = action.algebra();
  require_conforms(A, x, "corner_compatibility");
  const SemigroupAction dens = action.in_picture(Picture::schrodinger);
  if (generator >= dens.generators().size()) {
    raise(ErrorCode::invalid_argument, "generator index out of range");
  }
  const SuperOperator& gamma = dens.generators()[generator];
  const Operator image = gamma.apply(x);
  const double scale = trace_norm(A, x);

  CheckReport out;
  out.name = "corner-compatibility";
  out.tolerances["relative"] = 1e-9;
  out.samples = 2;
  std::ostringstream os;
  const Projection* corners[] = {&decomposition.e1, &decomposition.e2};
  for (int i = 0; i < 2; ++i) {
    const Operator& e = corners[i]->op();
    const double gap = trace_norm(A, e * image * e - gamma.apply(e * x * e));
    out.measured = std::max(out.measured, gap);
    if (gap > 1e-9 * scale) {
      out.witnesses.push_back(e);
      os << "e" << (i + 1) << " corner differs by " << gap << "; ";
    }
  }
  out.verdict = out.witnesses.empty() ? Verdict::pass : Verdict::fail;
  if (out.verdict == Verdict::fail) out.witnesses.insert(out.witnesses.begin(), x);
  os << "generator " << generator;
  out.detail = os.str();
  return out;
}

// ---------------------------------------------------------------------------

ConvexHullResult convex_hull_residual(const SemigroupAction& action, const Operator& x, int a) {
  const TracialAlgebra& A = action.algebra();
  require_conforms(A, x, "convex_hull_residual");
  if (a < 0) raise(ErrorCode::invalid_argument, "budget must be non-negative");
  const std::vector<Operator> images = orbit(action, x, a);
  const Operator target = mean_ergodic_projection(action).apply(A, x);

  const Eigen::Index m = static_cast<Eigen::Index>(images.size());
  Matrix Y(A.dim(), m);
  for (Eigen::Index k = 0; k < m; ++k) Y.col(k) = images[k].vec();
  const Vector t = target.vec();
  const Eigen::MatrixXd G = (Y.adjoint() * Y).real();
  const Eigen::VectorXd b = (Y.adjoint() * t).real();
  const double c = t.squaredNorm();

  ConvexHullResult out;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  double f = quadratic(G, b, c, w);
  if (lmax > 0.0) {
    const double step = 0.5 / lmax;
    for (out.iterations = 1; out.iterations <= 10000; ++out.iterations) {
      const Eigen::VectorXd next = project_simplex(w - step * 2.0 * (G * w - b));
      const double fn = quadratic(G, b, c, next);
      const double decrement = f - fn;
      w = next;
      f = fn;
      if (decrement <= 1e-10) {
        out.converged = true;
        break;
      }
    }
    out.iterations = std::min(out.iterations, 10000);
  } else {
    out.converged = true;
  }

  Eigen::VectorXd polished = w;
  const bool optimal = active_set_polish(G, b, polished);
  if (polished.allFinite() && quadratic(G, b, c, polished) <= f) {
    w = polished;
    f = quadratic(G, b, c, w);
    out.polished = true;
    out.converged = out.converged || optimal;
  }

  Operator mix = Operator::zero(A);
  for (Eigen::Index k = 0; k < m; ++k) mix = mix + images[k] * w(k);
  out.residual = op_norm(mix - target);
  out.objective = f;
  out.weights.assign(w.data(), w.data() + m);
  return out;
}

std::vector<Operator> moving_bump_sequence(int sweeps) {
  if (sweeps < 0) raise(ErrorCode::invalid_argument, "sweeps must be non-negative");
  const int n = 16;
  const TracialAlgebra A = TracialAlgebra::diagonal(n);
  std::vector<int> widths{8, 4, 2, 1};
  for (int s = 0; s < sweeps; ++s) widths.push_back(1);
  std::vector<Operator> out;
  for (int width : widths) {
    for (int start = 0; start < n; start += width) {
      std::vector<double> d(n, 0.0);
      for (int i = start; i < start + width; ++i) d[i] = 1.0;
      out.push_back(Operator::diagonal(A, d));
    }
  }
  return out;
}

}  // namespace ncerg
