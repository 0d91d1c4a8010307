#include "ncerg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ncerg {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kTasks{"decompose", "mean", "certify", "stochastic",
                                      "gallery-item"};

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  raise(ErrorCode::schema, path + ": " + what);
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) schema_error(path + "." + it.key(), "unknown field");
  }
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) schema_error(path + "." + key, "missing required field");
  return obj.at(key);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<int>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

const Json& array(const Json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

Complex complex_from_json(const Json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  schema_error(path, "expected a number or [re, im]");
}

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_square(const Matrix& m, int n, const std::string& path, const std::string& what) {
  if (m.rows() != n || m.cols() != n) {
    raise(ErrorCode::shape_mismatch,
          path + ": shape " + shape(m.rows(), m.cols()) + " does not match " + what + " (" +
              shape(n, n) + ")");
  }
}

RealMatrix real_matrix(const Json& v, const std::string& path) {
  const Matrix m = matrix_from_json(v, path);
  if (m.imag().cwiseAbs().maxCoeff() > 0.0) schema_error(path, "expected real entries");
  return m.real();
}

// Errors raised by the core are rethrown with the field path in front.
template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    raise(e.code(), path + ": " + e.what());
  }
}

Verdict fold(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
  return Verdict::pass;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<int> geometric_schedule(int n_max) {
  std::vector<int> s;
  for (int a = 1; a <= n_max; a *= 2) s.push_back(a);
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

TracialAlgebra parse_algebra(const Json& v, Json& filled) {
  const std::string path = "algebra";
  check_keys(v, {"blocks", "weights", "normalized"}, path);
  const Json& jb = array(require(v, "blocks", path), path + ".blocks");
  if (jb.empty()) schema_error(path + ".blocks", "needs at least one block");
  std::vector<int> blocks;
  int hilbert = 0;
  for (std::size_t i = 0; i < jb.size(); ++i) {
    const int n = integer(jb[i], at_index(path + ".blocks", i));
    if (n < 1) schema_error(at_index(path + ".blocks", i), "block size must be positive");
    blocks.push_back(n);
    hilbert += n;
  }
  std::vector<double> weights;
  if (v.contains("weights")) {
    const Json& jw = array(v["weights"], path + ".weights");
    if (jw.size() != blocks.size()) {
      raise(ErrorCode::shape_mismatch, path + ".weights: " + std::to_string(jw.size()) +
                                           " weights for " + std::to_string(blocks.size()) +
                                           " blocks");
    }
    for (std::size_t i = 0; i < jw.size(); ++i) {
      weights.push_back(number(jw[i], at_index(path + ".weights", i)));
    }
  } else {
    weights.assign(blocks.size(), 1.0 / hilbert);
  }
  bool normalized = true;
  if (v.contains("normalized")) {
    if (!v["normalized"].is_boolean()) schema_error(path + ".normalized", "expected a boolean");
    normalized = v["normalized"].get<bool>();
  }
  filled = {{"blocks", blocks}, {"weights", weights}, {"normalized", normalized}};
  return with_path(path, [&] { return TracialAlgebra(blocks, weights, normalized); });
}

SuperOperator heisenberg_to(Picture p, SuperOperator map) {
  return p == Picture::schrodinger ? dual(map) : map;
}

std::vector<Matrix> hilbert_matrices(const TracialAlgebra& A, const Json& v,
                                     const std::string& path) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) {
    out.push_back(matrix_from_json(v[i], at_index(path, i)));
    require_square(out.back(), A.hilbert_dim(), at_index(path, i), "Hilbert dimension");
  }
  return out;
}

// Discrete generator in the declared picture. Structured sources describe the
// Heisenberg map; a raw matrix is taken as given.
SuperOperator parse_generator(const TracialAlgebra& A, Picture picture, const Json& g,
                              const std::string& path, std::uint64_t seed) {
  check_keys(g, {"source", "payload"}, path);
  const std::string source = text(require(g, "source", path), path + ".source");
  const Json& payload = require(g, "payload", path);
  const std::string pp = path + ".payload";
  if (source == "kraus") {
    check_keys(payload, {"operators"}, pp);
    const auto ks = hilbert_matrices(A, require(payload, "operators", pp), pp + ".operators");
    if (ks.empty()) schema_error(pp + ".operators", "needs at least one operator");
    return with_path(pp, [&] { return heisenberg_to(picture, from_kraus(A, ks)); });
  }
  if (source == "classical") {
    check_keys(payload, {"kernel"}, pp);
    const RealMatrix k = real_matrix(require(payload, "kernel", pp), pp + ".kernel");
    require_square(k.cast<Complex>(), A.hilbert_dim(), pp + ".kernel", "Hilbert dimension");
    return with_path(pp + ".kernel",
                     [&] { return heisenberg_to(picture, from_classical(A, k)); });
  }
  if (source == "conjugation") {
    check_keys(payload, {"unitary"}, pp);
    const Matrix u = matrix_from_json(require(payload, "unitary", pp), pp + ".unitary");
    require_square(u, A.hilbert_dim(), pp + ".unitary", "Hilbert dimension");
    return with_path(pp + ".unitary",
                     [&] { return heisenberg_to(picture, from_conjugation(A, u)); });
  }
  if (source == "matrix") {
    check_keys(payload, {"matrix"}, pp);
    const Matrix m = matrix_from_json(require(payload, "matrix", pp), pp + ".matrix");
    require_square(m, A.dim(), pp + ".matrix", "algebra dimension");
    return with_path(pp + ".matrix", [&] { return from_matrix(A, m, seed); });
  }
  if (source == "generator") {
    schema_error(path + ".source", "generator sources need scheme kind r-plus-cube");
  }
  schema_error(path + ".source", "unknown source '" + source + "'");
}

Matrix parse_rate(const TracialAlgebra& A, Picture picture, const Json& g,
                  const std::string& path) {
  check_keys(g, {"source", "payload"}, path);
  const std::string source = text(require(g, "source", path), path + ".source");
  if (source != "generator") {
    schema_error(path + ".source", "r-plus-cube needs source 'generator'");
  }
  const Json& payload = require(g, "payload", path);
  const std::string pp = path + ".payload";
  check_keys(payload, {"hamiltonian", "jumps", "rate"}, pp);
  if (payload.contains("rate")) {
    if (payload.contains("hamiltonian") || payload.contains("jumps")) {
      schema_error(pp, "give either rate or hamiltonian/jumps");
    }
    const Matrix m = matrix_from_json(payload["rate"], pp + ".rate");
    require_square(m, A.dim(), pp + ".rate", "algebra dimension");
    return m;
  }
  Matrix h = Matrix::Zero(A.hilbert_dim(), A.hilbert_dim());
  if (payload.contains("hamiltonian")) {
    h = matrix_from_json(payload["hamiltonian"], pp + ".hamiltonian");
    require_square(h, A.hilbert_dim(), pp + ".hamiltonian", "Hilbert dimension");
  }
  std::vector<Matrix> jumps;
  if (payload.contains("jumps")) jumps = hilbert_matrices(A, payload["jumps"], pp + ".jumps");
  const Matrix L = with_path(pp, [&] { return lindblad_generator(A, h, jumps); });
  return picture == Picture::schrodinger ? dual_matrix(A, L) : L;
}

Picture parse_picture(const Json& v, const std::string& path) {
  const std::string s = text(v, path);
  if (s == "heisenberg") return Picture::heisenberg;
  if (s == "schrodinger") return Picture::schrodinger;
  schema_error(path, "expected heisenberg or schrodinger");
}

SchemeKind parse_kind(const Json& v, const std::string& path) {
  const std::string s = text(v, path);
  for (SchemeKind k : {SchemeKind::zplus_box, SchemeKind::z_symmetric_box,
                       SchemeKind::finite_group, SchemeKind::rplus_cube}) {
    if (s == to_string(k)) return k;
  }
  schema_error(path, "unknown scheme kind '" + s + "'");
}

SemigroupAction parse_action(const TracialAlgebra& A, const Json& v, std::uint64_t seed,
                             Json& filled) {
  const std::string path = "action";
  check_keys(v, {"picture", "scheme", "generators", "inverses", "table"}, path);
  const Picture picture = v.contains("picture")
                              ? parse_picture(v["picture"], path + ".picture")
                              : Picture::heisenberg;
  const Json& scheme = require(v, "scheme", path);
  check_keys(scheme, {"kind", "d"}, path + ".scheme");
  const SchemeKind kind = parse_kind(require(scheme, "kind", path + ".scheme"),
                                     path + ".scheme.kind");
  const Json& gens = array(require(v, "generators", path), path + ".generators");
  if (gens.empty()) schema_error(path + ".generators", "needs at least one generator");
  const int count = static_cast<int>(gens.size());
  int d = count;
  if (scheme.contains("d")) {
    d = integer(scheme["d"], path + ".scheme.d");
    if (kind != SchemeKind::finite_group && d != count) {
      raise(ErrorCode::shape_mismatch, path + ".scheme.d: d = " + std::to_string(d) + " but " +
                                           std::to_string(count) + " generators");
    }
  }
  if (kind != SchemeKind::finite_group && v.contains("table")) {
    schema_error(path + ".table", "only finite-group schemes take a table");
  }
  if (kind != SchemeKind::z_symmetric_box && v.contains("inverses")) {
    schema_error(path + ".inverses", "only z-symmetric-box schemes take inverses");
  }

  filled = v;
  filled["picture"] = to_string(picture);
  filled["scheme"] = {{"kind", to_string(kind)}, {"d", kind == SchemeKind::finite_group ? 1 : d}};

  if (kind == SchemeKind::rplus_cube) {
    std::vector<Matrix> rates;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      rates.push_back(parse_rate(A, picture, gens[i], at_index(path + ".generators", i)));
    }
    return with_path(path, [&] { return SemigroupAction::continuous(A, picture, rates); });
  }

  std::vector<SuperOperator> maps;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    maps.push_back(parse_generator(A, picture, gens[i], at_index(path + ".generators", i), seed));
  }
  if (kind == SchemeKind::finite_group) {
    const Json& jt = array(require(v, "table", path), path + ".table");
    std::vector<std::vector<int>> table;
    for (std::size_t i = 0; i < jt.size(); ++i) {
      std::vector<int> row;
      for (std::size_t j = 0; j < array(jt[i], at_index(path + ".table", i)).size(); ++j) {
        row.push_back(integer(jt[i][j], at_index(at_index(path + ".table", i), j)));
      }
      table.push_back(std::move(row));
    }
    return with_path(path,
                     [&] { return SemigroupAction::finite_group(picture, maps, table); });
  }
  std::vector<SuperOperator> inverses;
  if (v.contains("inverses")) {
    const Json& ji = array(v["inverses"], path + ".inverses");
    for (std::size_t i = 0; i < ji.size(); ++i) {
      inverses.push_back(
          parse_generator(A, picture, ji[i], at_index(path + ".inverses", i), seed));
    }
  }
  return with_path(path,
                   [&] { return SemigroupAction::discrete(kind, picture, maps, inverses); });
}

Tolerances parse_tolerances(const Json& v, Json& filled) {
  Tolerances t;
  const std::string path = "tolerances";
  if (!v.is_null()) {
    check_keys(v, {"fixed", "decay", "eps", "delta", "window", "probes", "lamperti_trials",
                   "hull_budget", "n_max"},
               path);
    auto positive = [&](const char* key, double& out) {
      if (!v.contains(key)) return;
      out = number(v[key], join(path, key));
      if (!(out > 0.0)) schema_error(join(path, key), "must be positive");
    };
    auto count = [&](const char* key, int& out, int lo) {
      if (!v.contains(key)) return;
      out = integer(v[key], join(path, key));
      if (out < lo) schema_error(join(path, key), "must be at least " + std::to_string(lo));
    };
    positive("fixed", t.fixed);
    positive("decay", t.decay);
    positive("eps", t.eps);
    positive("delta", t.delta);
    if (t.delta >= 1.0) schema_error(path + ".delta", "must lie in (0, 1)");
    count("window", t.window, 1);
    count("probes", t.probes, 0);
    count("lamperti_trials", t.lamperti_trials, 0);
    count("hull_budget", t.hull_budget, 0);
    count("n_max", t.n_max, 1);
  }
  filled = {{"fixed", t.fixed},           {"decay", t.decay},     {"eps", t.eps},
            {"delta", t.delta},           {"window", t.window},   {"probes", t.probes},
            {"lamperti_trials", t.lamperti_trials}, {"hull_budget", t.hull_budget},
            {"n_max", t.n_max}};
  return t;
}

// ---------------------------------------------------------------------------
// Running

Json spectrum_json(const SemigroupAction& action) {
  std::vector<Matrix> mats;
  if (action.scheme().kind == SchemeKind::rplus_cube) {
    mats = action.continuous_generators();
  } else {
    for (const auto& g : action.generators()) mats.push_back(g.matrix());
  }
  Json out = Json::array();
  for (std::size_t g = 0; g < mats.size(); ++g) {
    Eigen::ComplexEigenSolver<Matrix> es(mats[g], false);
    std::vector<Complex> ev(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
      if (a.real() != b.real()) return a.real() > b.real();
      return a.imag() > b.imag();
    });
    for (std::size_t k = 0; k < ev.size(); ++k) {
      out.push_back({{"generator", g},
                     {"index", k},
                     {"real", ev[k].real()},
                     {"imag", ev[k].imag()},
                     {"modulus", std::abs(ev[k])}});
    }
  }
  return out;
}

Json skipped(const std::string& reason) {
  return {{"status", "skipped"}, {"reason", reason}, {"verdict", to_string(Verdict::fail)}};
}

std::optional<Json> commuting_gate(const Scenario& sc) {
  const CheckReport& c = sc.action.commuting();
  if (c.verdict == Verdict::fail) {
    return skipped("generators do not commute: " + c.detail);
  }
  return std::nullopt;
}

NeveuOptions neveu_options(const Scenario& sc) {
  NeveuOptions o;
  o.schedule = sc.schedule;
  o.decay_tol = sc.tolerances.decay;
  o.tol_fixed = sc.tolerances.fixed;
  o.window = sc.tolerances.window;
  o.seed = sc.seed.value_or(0);
  o.probes = sc.tolerances.probes;
  return o;
}

Json decompose_task(const NeveuDecomposition& d) {
  Json checks = Json::array();
  for (const auto& c : d.checks) checks.push_back(to_json(c));
  return {{"status", "ok"},
          {"e1", to_json(d.e1)},
          {"e2", to_json(d.e2)},
          {"invariant_density",
           d.invariant_density ? to_json(*d.invariant_density) : Json(nullptr)},
          {"wandering_witness", to_json(d.wandering_witness)},
          {"decay", to_json(d.decay)},
          {"checks", checks},
          {"sampled_positivity", d.sampled_positivity},
          {"fixed_dims", d.heisenberg_mean.generator_fixed_dims},
          {"verdict", to_string(d.verdict())}};
}

Json mean_task(const Scenario& sc) {
  if (auto gate = commuting_gate(sc)) return *gate;
  const auto mean = mean_ergodic_projection(sc.action, sc.tolerances.fixed);
  const auto env = mean_envelope(sc.action, mean);
  Verdict v = env.verdict;
  if (mean.idempotence_residual > 1e-9 || mean.invariance_residual > 1e-9) v = Verdict::fail;
  Json out{{"status", "ok"},
           {"picture", to_string(mean.picture)},
           {"fixed_dims", mean.generator_fixed_dims},
           {"fixed_space_dim", mean.fixed_basis.size()},
           {"idempotence_residual", mean.idempotence_residual},
           {"invariance_residual", mean.invariance_residual},
           {"residual_16", mean.residual_16},
           {"residual_64", mean.residual_64},
           {"envelope",
            {{"a", env.indices},
             {"residual", env.residuals},
             {"fitted_c", env.fitted_c},
             {"verdict", to_string(env.verdict)}}}};
  if (sc.observable) {
    const auto hull = convex_hull_residual(sc.action, *sc.observable, sc.tolerances.hull_budget);
    out["convex_hull"] = {{"budget", sc.tolerances.hull_budget},
                          {"residual", hull.residual},
                          {"objective", hull.objective},
                          {"weights", hull.weights},
                          {"iterations", hull.iterations},
                          {"converged", hull.converged},
                          {"polished", hull.polished}};
  }
  out["verdict"] = to_string(v);
  return out;
}

Json certify_task(const Scenario& sc) {
  SemigroupAction action = sc.action;
  const CheckReport lamperti =
      action.attest_lamperti(sc.tolerances.lamperti_trials, sc.seed.value_or(0) + 404);
  Verdict v = fold(fold(action.commuting().verdict, action.semigroup_law().verdict),
                   action.contraction().verdict);
  return {{"status", "ok"},
          {"commuting", to_json(action.commuting())},
          {"semigroup_law", to_json(action.semigroup_law())},
          {"contraction", to_json(action.contraction())},
          {"lamperti", to_json(lamperti)},
          {"sampled_positivity", action.sampled_positivity()},
          {"verdict", to_string(v)}};
}

Json bau_json(const BauCertificate& c) {
  return {{"projection", to_json(c.projection)},
          {"delta", c.delta},
          {"delta_budget", c.delta_budget},
          {"eps", c.eps},
          {"theta", c.theta},
          {"n0", c.n0},
          {"indices", c.indices},
          {"corner_norms", c.corner_norms},
          {"tail_sups", c.tail_sups},
          {"tail_start", c.tail_start ? Json(*c.tail_start) : Json(nullptr)},
          {"verdict", to_string(c.verdict)},
          {"detail", c.detail}};
}

Json measure_json(const MeasureCertificate& c) {
  Json records = Json::array();
  for (const auto& r : c.records) {
    records.push_back({{"a", r.index},
                       {"delta", r.delta},
                       {"rank", r.rank},
                       {"corner_norm", r.corner_norm}});
  }
  return {{"eps", c.eps},
          {"delta_tol", c.delta_tol},
          {"window", c.window},
          {"records", records},
          {"n0", c.n0 ? Json(*c.n0) : Json(nullptr)},
          {"violations", c.violations},
          {"verdict", to_string(c.verdict)},
          {"detail", c.detail}};
}

Json stochastic_task(const Scenario& sc, const NeveuDecomposition& d) {
  SemigroupAction action = sc.action;
  const CheckReport lamperti =
      action.attest_lamperti(sc.tolerances.lamperti_trials, sc.seed.value_or(0) + 404);
  const Operator x = sc.density ? *sc.density : uniform_density(sc.algebra);
  StochasticOptions opt;
  opt.eps = sc.tolerances.eps;
  opt.delta = sc.tolerances.delta;
  opt.window = sc.tolerances.window;
  for (int a = 1; a <= sc.schedule.back(); ++a) opt.schedule.push_back(a);
  const auto r = stochastic_run(action, d, x, opt);
  Json records = Json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"a", rec.index},
                       {"r_defect", rec.r_defect},
                       {"cross_norm", rec.cross_norm},
                       {"cross_bound", rec.cross_bound},
                       {"checked", rec.checked}});
  }
  Json corner = Json::array();
  for (const auto& c : r.corner_checks) corner.push_back(to_json(c));
  return {{"status", "ok"},
          {"density", to_json(x)},
          {"limit", to_json(r.limit)},
          {"e1_corner", bau_json(r.e1_corner)},
          {"e2_corner", measure_json(r.e2_corner)},
          {"records", records},
          {"burn_in", r.burn_in ? Json(*r.burn_in) : Json(nullptr)},
          {"cross_term_applicable", r.cross_term_applicable},
          {"cross_violations", r.cross_violations},
          {"r_violations", r.r_violations},
          {"lamperti", to_json(lamperti)},
          {"corner_checks", corner},
          {"verdict", to_string(r.verdict)},
          {"detail", r.detail}};
}

// phi_c(x) = sum_i c_i x_ii on the Hilbert diagonal.
Complex functional_value(const std::vector<double>& c, const Operator& x) {
  const Matrix dense = x.dense();
  Complex s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * dense(i, i);
  return s;
}

Json gallery_item_task(const Scenario& sc) {
  Json out{{"status", "ok"}};
  if (sc.functional.empty()) {
    out["detail"] = "no item-specific checks";
    out["verdict"] = to_string(Verdict::pass);
    return out;
  }
  const SemigroupAction h = sc.action.in_picture(Picture::heisenberg);
  CheckReport r;
  r.name = "functional-invariance";
  r.seed = sc.seed.value_or(0) + 505;
  r.tolerances["relative"] = 1e-9;
  Rng rng(r.seed);
  for (int t = 0; t < 20; ++t) {
    const Operator x = random_operator(sc.algebra, rng);
    for (const auto& g : h.generators()) {
      const double gap =
          std::abs(functional_value(sc.functional, g.apply(x)) - functional_value(sc.functional, x));
      ++r.samples;
      if (gap > r.measured) r.measured = gap;
      if (gap > 1e-9 * op_norm(x) && r.witnesses.empty()) r.witnesses.push_back(x);
    }
  }
  r.verdict = r.witnesses.empty() ? Verdict::pass : Verdict::fail;
  r.detail = "phi_c(Gamma(x)) against phi_c(x) on random x";
  out["functional"] = {{"weights", sc.functional}, {"check", to_json(r)}};
  out["verdict"] = to_string(r.verdict);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Gallery helpers

Json real_json(const RealMatrix& m) { return to_json(Matrix(m.cast<Complex>())); }

Json algebra_json(std::vector<int> blocks) {
  int h = 0;
  for (int n : blocks) h += n;
  return {{"blocks", blocks}, {"weights", std::vector<double>(blocks.size(), 1.0 / h)},
          {"normalized", true}};
}

Json kraus_gen(const std::vector<Matrix>& ks) {
  Json ops = Json::array();
  for (const auto& k : ks) ops.push_back(to_json(k));
  return {{"source", "kraus"}, {"payload", {{"operators", ops}}}};
}

Matrix unit_matrix(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

Json base_document(const std::string& name, Json algebra, Json action,
                   std::vector<std::string> tasks) {
  return {{"schema", kScenarioSchema},
          {"name", name},
          {"algebra", std::move(algebra)},
          {"action", std::move(action)},
          {"tasks", std::move(tasks)},
          {"schedule", geometric_schedule(64)},
          {"tolerances", Json::object()},
          {"seed", 20240601}};
}

const std::vector<std::string> kAllTasks{"decompose", "mean", "certify", "stochastic"};

}  // namespace

// ---------------------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Operator& x) {
  Json blocks = Json::array();
  for (const auto& b : x.blocks()) blocks.push_back(to_json(b));
  return {{"blocks", blocks}};
}

Json to_json(const Projection& p) {
  Json out = to_json(p.op());
  out["ranks"] = p.ranks();
  out["rank"] = p.rank();
  return out;
}

Json to_json(const CheckReport& r) {
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back(to_json(x));
  return {{"name", r.name},         {"verdict", to_string(r.verdict)},
          {"measured", finite_or_null(r.measured)},
          {"tolerances", r.tolerances}, {"samples", r.samples},
          {"seed", r.seed},         {"detail", r.detail},
          {"witnesses", w}};
}

Json to_json(const DecayReport& d) {
  return {{"schedule", d.schedule},
          {"norms", d.norms},
          {"slope", finite_or_null(d.slope)},
          {"decay_tol", d.decay_tol},
          {"verdict", to_string(d.verdict)},
          {"detail", d.detail}};
}

Matrix matrix_from_json(const Json& value, const std::string& path) {
  const Json& rows = array(value, path);
  if (rows.empty()) schema_error(path, "empty matrix");
  const std::size_t cols = array(rows[0], at_index(path, 0)).size();
  if (cols == 0) schema_error(at_index(path, 0), "empty row");
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Json& row = array(rows[r], at_index(path, r));
    if (row.size() != cols) {
      raise(ErrorCode::shape_mismatch, at_index(path, r) + ": row has " +
                                           std::to_string(row.size()) + " entries, expected " +
                                           std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(row[c], at_index(at_index(path, r), c));
    }
  }
  return m;
}

Operator operator_from_json(const TracialAlgebra& A, const Json& value,
                            const std::string& path) {
  if (value.is_object()) {
    check_keys(value, {"blocks", "diagonal", "dense", "ranks", "rank"}, path);
    if (value.contains("blocks")) {
      const Json& jb = array(value["blocks"], path + ".blocks");
      if (jb.size() != A.num_blocks()) {
        raise(ErrorCode::shape_mismatch, path + ".blocks: " + std::to_string(jb.size()) +
                                             " blocks, algebra has " +
                                             std::to_string(A.num_blocks()));
      }
      std::vector<Matrix> blocks;
      for (std::size_t b = 0; b < jb.size(); ++b) {
        blocks.push_back(matrix_from_json(jb[b], at_index(path + ".blocks", b)));
        require_square(blocks.back(), A.block_dim(b), at_index(path + ".blocks", b),
                       "block " + std::to_string(b));
      }
      return Operator(std::move(blocks));
    }
    if (value.contains("diagonal")) {
      const Json& jd = array(value["diagonal"], path + ".diagonal");
      if (static_cast<int>(jd.size()) != A.hilbert_dim()) {
        raise(ErrorCode::shape_mismatch,
              path + ".diagonal: " + std::to_string(jd.size()) +
                  " entries, Hilbert dimension is " + std::to_string(A.hilbert_dim()));
      }
      Matrix dense = Matrix::Zero(A.hilbert_dim(), A.hilbert_dim());
      for (std::size_t i = 0; i < jd.size(); ++i) {
        dense(i, i) = complex_from_json(jd[i], at_index(path + ".diagonal", i));
      }
      return with_path(path, [&] { return Operator::from_dense(A, dense); });
    }
    if (value.contains("dense")) {
      const Matrix dense = matrix_from_json(value["dense"], path + ".dense");
      require_square(dense, A.hilbert_dim(), path + ".dense", "Hilbert dimension");
      return with_path(path, [&] { return Operator::from_dense(A, dense); });
    }
    schema_error(path, "expected blocks, diagonal or dense");
  }
  const Matrix dense = matrix_from_json(value, path);
  require_square(dense, A.hilbert_dim(), path, "Hilbert dimension");
  return with_path(path, [&] { return Operator::from_dense(A, dense); });
}

Verdict parse_verdict(const std::string& name) {
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::unknown}) {
    if (name == to_string(v)) return v;
  }
  raise(ErrorCode::schema, "unknown verdict '" + name + "'");
}

std::string dump(const Json& value) { return value.dump(2) + "\n"; }

Scenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) schema_error("$", "scenario must be a JSON object");
  check_keys(doc, {"schema", "name", "algebra", "action", "tasks", "schedule", "tolerances",
                   "seed", "inputs"},
             "$");
  const std::string tag = text(require(doc, "schema", "$"), "schema");
  if (tag != kScenarioSchema) {
    schema_error("schema", "unsupported scenario schema '" + tag + "', expected " +
                               kScenarioSchema);
  }
  Scenario sc;
  sc.name = text(require(doc, "name", "$"), "name");
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
    schema_error("name", "must be a non-empty file-name-safe string");
  }
  Json filled{{"schema", kScenarioSchema}, {"name", sc.name}};

  if (doc.contains("seed")) {
    const Json& js = doc["seed"];
    if (!js.is_number_unsigned() && !(js.is_number_integer() && js.get<std::int64_t>() >= 0)) {
      schema_error("seed", "expected an unsigned integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
    filled["seed"] = *sc.seed;
  }

  Json part;
  sc.algebra = parse_algebra(require(doc, "algebra", "$"), part);
  filled["algebra"] = part;
  sc.tolerances = parse_tolerances(doc.value("tolerances", Json()), part);
  filled["tolerances"] = part;
  sc.action = parse_action(sc.algebra, require(doc, "action", "$"), sc.seed.value_or(0), part);
  filled["action"] = part;

  if (doc.contains("tasks")) {
    const Json& jt = array(doc["tasks"], "tasks");
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const std::string t = text(jt[i], at_index("tasks", i));
      if (std::find(kTasks.begin(), kTasks.end(), t) == kTasks.end()) {
        schema_error(at_index("tasks", i), "unknown task '" + t + "'");
      }
      if (std::find(sc.tasks.begin(), sc.tasks.end(), t) != sc.tasks.end()) {
        schema_error(at_index("tasks", i), "duplicate task '" + t + "'");
      }
      sc.tasks.push_back(t);
    }
  } else {
    sc.tasks = {"decompose"};
  }
  filled["tasks"] = sc.tasks;

  if (doc.contains("schedule")) {
    const Json& js = array(doc["schedule"], "schedule");
    for (std::size_t i = 0; i < js.size(); ++i) {
      const int a = integer(js[i], at_index("schedule", i));
      if (a < 1) schema_error(at_index("schedule", i), "indices must be positive");
      if (!sc.schedule.empty() && a <= sc.schedule.back()) {
        schema_error(at_index("schedule", i), "schedule must be strictly increasing");
      }
      if (a <= sc.tolerances.n_max) sc.schedule.push_back(a);
    }
  } else {
    sc.schedule = geometric_schedule(sc.tolerances.n_max);
  }
  if (sc.schedule.empty()) schema_error("schedule", "no index within n_max");
  filled["schedule"] = sc.schedule;

  const bool randomized = std::any_of(sc.tasks.begin(), sc.tasks.end(),
                                      [](const std::string& t) { return t != "mean"; });
  if (randomized && !sc.seed) {
    schema_error("seed", "required because randomized checks are requested");
  }

  if (doc.contains("inputs")) {
    const Json& in = doc["inputs"];
    check_keys(in, {"observable", "density", "functional"}, "inputs");
    Json fi = Json::object();
    if (in.contains("observable")) {
      sc.observable = operator_from_json(sc.algebra, in["observable"], "inputs.observable");
      fi["observable"] = to_json(*sc.observable);
    }
    if (in.contains("density")) {
      sc.density = operator_from_json(sc.algebra, in["density"], "inputs.density");
      fi["density"] = to_json(*sc.density);
    }
    if (in.contains("functional")) {
      const Json& jf = array(in["functional"], "inputs.functional");
      if (static_cast<int>(jf.size()) != sc.algebra.hilbert_dim()) {
        raise(ErrorCode::shape_mismatch,
              "inputs.functional: " + std::to_string(jf.size()) +
                  " weights, Hilbert dimension is " + std::to_string(sc.algebra.hilbert_dim()));
      }
      for (std::size_t i = 0; i < jf.size(); ++i) {
        sc.functional.push_back(number(jf[i], at_index("inputs.functional", i)));
      }
      fi["functional"] = sc.functional;
    }
    filled["inputs"] = fi;
  }
  sc.document = filled;
  return sc;
}

Json read_scenario_document(const std::string& path) {
  const std::string content = read_file(path);
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    raise(ErrorCode::schema, path + ": empty file");
  }
  Json doc;
  try {
    doc = Json::parse(content);
  } catch (const Json::parse_error& e) {
    raise(ErrorCode::schema, path + ": " + e.what());
  }
  return doc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_scenario_document(path)); }

Json apply_overrides(Json doc, const Overrides& o) {
  if (!doc.is_object()) return doc;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.tol_fixed || o.decay_tol || o.n_max) {
    if (!doc.contains("tolerances") || !doc["tolerances"].is_object()) {
      doc["tolerances"] = Json::object();
    }
    if (o.tol_fixed) doc["tolerances"]["fixed"] = *o.tol_fixed;
    if (o.decay_tol) doc["tolerances"]["decay"] = *o.decay_tol;
    if (o.n_max) doc["tolerances"]["n_max"] = *o.n_max;
  }
  // n_max regenerates the geometric schedule.
  if (o.n_max) doc.erase("schedule");
  if (o.tasks) doc["tasks"] = *o.tasks;
  return doc;
}

Report run(const Scenario& sc) {
  Report report;
  report.name = sc.name;
  Json doc{{"schema", kReportSchema},
           {"name", sc.name},
           {"scenario", sc.document},
           {"tool", {{"name", "ncerg"}, {"version", kToolVersion}}},
           {"spectrum", spectrum_json(sc.action)}};
  Json results = Json::object();
  Verdict overall = Verdict::pass;
  std::optional<NeveuDecomposition> decomposition;
  std::string decomposition_error;

  auto decompose = [&]() -> const NeveuDecomposition* {
    if (!decomposition && decomposition_error.empty()) {
      try {
        decomposition = neveu_decompose(sc.action, neveu_options(sc));
      } catch (const Error& e) {
        decomposition_error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    return decomposition ? &*decomposition : nullptr;
  };

  for (const auto& task : sc.tasks) {
    Json r;
    try {
      if (task == "decompose" || task == "stochastic") {
        if (auto gate = commuting_gate(sc)) {
          r = *gate;
        } else if (const NeveuDecomposition* d = decompose()) {
          r = task == "decompose" ? decompose_task(*d) : stochastic_task(sc, *d);
        } else {
          r = skipped("decomposition unavailable: " + decomposition_error);
        }
      } else if (task == "mean") {
        r = mean_task(sc);
      } else if (task == "certify") {
        r = certify_task(sc);
      } else {
        r = gallery_item_task(sc);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::io) throw;
      r = {{"status", "error"},
           {"code", to_string(e.code())},
           {"reason", e.what()},
           {"verdict", to_string(Verdict::fail)}};
    }
    overall = fold(overall, parse_verdict(r.at("verdict").get<std::string>()));
    results[task] = std::move(r);
  }
  doc["results"] = std::move(results);
  doc["verdict"] = to_string(overall);
  report.document = std::move(doc);
  report.verdict = overall;
  return report;
}

ReportFormat parse_format(const std::string& name) {
  for (ReportFormat f :
       {ReportFormat::report_json, ReportFormat::decay_csv, ReportFormat::spectrum_csv}) {
    if (name == to_string(f)) return f;
  }
  raise(ErrorCode::invalid_argument, "unknown format '" + name + "'");
}

const char* to_string(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::report_json: return "report-json";
    case ReportFormat::decay_csv: return "decay-csv";
    case ReportFormat::spectrum_csv: return "spectrum-csv";
  }
  return "?";
}

const char* file_suffix(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::report_json: return ".report.json";
    case ReportFormat::decay_csv: return ".decay.csv";
    case ReportFormat::spectrum_csv: return ".spectrum.csv";
  }
  return "";
}

std::string render(const Report& report, ReportFormat format) {
  const Json& doc = report.document;
  std::string out;
  switch (format) {
    case ReportFormat::report_json:
      return dump(doc);
    case ReportFormat::decay_csv: {
      out = "a,norm\n";
      const Json* results = doc.contains("results") ? &doc["results"] : nullptr;
      if (results && results->contains("decompose") &&
          (*results)["decompose"].contains("decay")) {
        const Json& decay = (*results)["decompose"]["decay"];
        for (std::size_t k = 0; k < decay["schedule"].size(); ++k) {
          out += std::to_string(decay["schedule"][k].get<int>()) + "," +
                 format_double(decay["norms"][k].get<double>()) + "\n";
        }
      }
      return out;
    }
    case ReportFormat::spectrum_csv: {
      out = "generator,index,real,imag,modulus\n";
      for (const auto& row : doc.value("spectrum", Json::array())) {
        out += std::to_string(row["generator"].get<int>()) + "," +
               std::to_string(row["index"].get<int>()) + "," +
               format_double(row["real"].get<double>()) + "," +
               format_double(row["imag"].get<double>()) + "," +
               format_double(row["modulus"].get<double>()) + "\n";
      }
      return out;
    }
  }
  return out;
}

std::string emit(const Report& report, ReportFormat format, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::io, "cannot create " + out_dir + ": " + ec.message());
  const fs::path target = fs::path(out_dir) / (report.name + file_suffix(format));
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream f(temp, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrorCode::io, "cannot write " + temp.string());
    f << render(report, format);
    f.flush();
    if (!f) raise(ErrorCode::io, "write failed for " + temp.string());
  }
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    raise(ErrorCode::io, "cannot rename onto " + target.string() + ": " + ec.message());
  }
  return target.string();
}

Report load_report(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    raise(ErrorCode::schema, path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    raise(ErrorCode::schema, path + ": missing schema tag");
  }
  const std::string tag = doc["schema"].get<std::string>();
  const std::string prefix = "ncerg-report/";
  if (tag.rfind(prefix, 0) != 0) raise(ErrorCode::schema, path + ": not a report: " + tag);
  const std::string major = tag.substr(prefix.size(), tag.find('.') - prefix.size());
  if (major != "1") {
    raise(ErrorCode::schema, path + ": unsupported report schema major version " + major);
  }
  Report r;
  r.name = doc.value("name", std::string());
  r.verdict = parse_verdict(doc.value("verdict", std::string("unknown")));
  r.document = std::move(doc);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<Json> gallery_documents() {
  std::vector<Json> out;
  const Matrix I2 = Matrix::Identity(2, 2);

  {
    Json doc = base_document("identity", algebra_json({2}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators", {kraus_gen({I2})}}},
                             kAllTasks);
    Matrix obs(2, 2);
    obs << 0.3, 1.0, 1.0, 0.7;
    doc["inputs"] = {{"observable", to_json(obs)}};
    out.push_back(doc);
  }
  {
    const double g = 0.5;
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - g);
    k1(0, 1) = std::sqrt(g);
    Json doc = base_document("amplitude-damping", algebra_json({2}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators", {kraus_gen({k0, k1})}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(2, 1, 1))}};
    out.push_back(doc);
  }
  {
    const double p = 0.5;
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    const double s0 = std::sqrt(1.0 - 0.75 * p), s = std::sqrt(p / 4.0);
    Json doc = base_document("depolarizing", algebra_json({2}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators", {kraus_gen({s0 * I2, s * x, s * y, s * z})}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(2, 0, 0))}};
    out.push_back(doc);
  }
  {
    Matrix u = Matrix::Zero(3, 3);
    u(0, 1) = u(1, 0) = u(2, 2) = 1.0;
    std::vector<std::string> tasks = kAllTasks;
    tasks.push_back("gallery-item");
    Json doc = base_document("swap-automorphism", algebra_json({3}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators",
                               {{{"source", "conjugation"}, {"payload", {{"unitary", to_json(u)}}}}}}},
                             tasks);
    doc["tolerances"] = {{"hull_budget", 2}};
    doc["inputs"] = {{"observable", to_json(unit_matrix(3, 0, 0))},
                     {"functional", {0.25, 0.25, 0.5}}};
    out.push_back(doc);
  }
  {
    RealMatrix k(4, 4);
    k << 1, 0, 0, 0, 0.5, 0, 0.5, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    Json doc = base_document("classical-transient-chain", algebra_json({1, 1, 1, 1}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators",
                               {{{"source", "classical"}, {"payload", {{"kernel", real_json(k)}}}}}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", {{"diagonal", {0.0, 1.0, 0.0, 0.0}}}}};
    out.push_back(doc);
  }
  {
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2), z(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(0.5);
    k1(0, 1) = std::sqrt(0.5);
    z << 1, 0, 0, -1;
    Json doc = base_document("zplus2-two-channels", algebra_json({2}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 2}}},
                              {"generators",
                               {kraus_gen({k0, k1}),
                                kraus_gen({std::sqrt(0.75) * I2, std::sqrt(0.25) * z})}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(2, 1, 1))}};
    out.push_back(doc);
  }
  {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 0.5;
    h(1, 1) = -0.5;
    const Matrix jump = std::sqrt(0.4) * unit_matrix(2, 0, 1);
    Json doc = base_document(
        "lindblad-rplus", algebra_json({2}),
        {{"picture", "heisenberg"},
         {"scheme", {{"kind", "r-plus-cube"}, {"d", 1}}},
         {"generators",
          {{{"source", "generator"},
            {"payload", {{"hamiltonian", to_json(h)}, {"jumps", {to_json(jump)}}}}}}}},
        kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(2, 1, 1))}};
    out.push_back(doc);
  }
  {
    RealMatrix k(3, 3);
    k << 1, 0, 0, 1, 0, 0, 0, 0, 1;
    Json doc = base_document("non-lamperti-witness", algebra_json({1, 1, 1}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "zplus-box"}, {"d", 1}}},
                              {"generators",
                               {{{"source", "classical"}, {"payload", {{"kernel", real_json(k)}}}}}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", {{"diagonal", {0.0, 1.0, 0.0}}}}};
    out.push_back(doc);
  }
  {
    Matrix p = Matrix::Zero(3, 3);
    p(1, 0) = p(2, 1) = p(0, 2) = 1.0;
    Json gens = Json::array();
    Matrix power = Matrix::Identity(3, 3);
    for (int k = 0; k < 3; ++k) {
      gens.push_back({{"source", "conjugation"}, {"payload", {{"unitary", to_json(power)}}}});
      power = p * power;
    }
    Json table = Json::array();
    for (int i = 0; i < 3; ++i) {
      table.push_back({i % 3, (i + 1) % 3, (i + 2) % 3});
    }
    Json doc = base_document("cyclic-group-z3", algebra_json({3}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "finite-group"}, {"d", 1}}},
                              {"generators", gens},
                              {"table", table}},
                             kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(3, 0, 1))}};
    out.push_back(doc);
  }
  {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = Complex(0.0, 1.0);
    Json doc = base_document("zsym-phase-rotation", algebra_json({2}),
                             {{"picture", "heisenberg"},
                              {"scheme", {{"kind", "z-symmetric-box"}, {"d", 1}}},
                              {"generators",
                               {{{"source", "conjugation"}, {"payload", {{"unitary", to_json(u)}}}}}}},
                             kAllTasks);
    doc["inputs"] = {{"observable", to_json(unit_matrix(2, 0, 1))}};
    out.push_back(doc);
  }
  return out;
}

std::vector<Scenario> gallery() {
  std::vector<Scenario> out;
  for (const auto& doc : gallery_documents()) out.push_back(parse_scenario(doc));
  return out;
}

}  // namespace ncerg
