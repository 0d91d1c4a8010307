#ifndef NCERG_SCENARIOS_HPP
#define NCERG_SCENARIOS_HPP

// JSON scenarios, the built-in gallery, and report emission.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncerg/convergence.hpp"

namespace ncerg {

using Json = nlohmann::json;

inline constexpr const char* kScenarioSchema = "ncerg-scenario/1";
inline constexpr const char* kReportSchema = "ncerg-report/1";
inline constexpr const char* kToolVersion = "1.0.0";

struct Tolerances {
  double fixed = 1e-9;
  double decay = 1e-6;
  double eps = 0.1;
  double delta = 0.25;
  int window = 5;
  int probes = 3;
  int lamperti_trials = 20;
  int hull_budget = 8;
  int n_max = 64;
};

struct Scenario {
  std::string name;
  /// The document with every default filled in; echoed into reports.
  Json document;
  TracialAlgebra algebra;
  SemigroupAction action;
  std::vector<std::string> tasks;
  /// Decay schedule; the stochastic task uses 1..max(schedule).
  std::vector<int> schedule;
  Tolerances tolerances;
  std::optional<std::uint64_t> seed;
  std::optional<Operator> observable;
  std::optional<Operator> density;
  /// Diagonal weights c_i of phi_c(x) = sum_i c_i <x e_i, e_i>.
  std::vector<double> functional;
};

/// Throws Error(schema) with a field path, Error(shape_mismatch) with both
/// shapes, or Error(validation) for map-level violations.
Scenario parse_scenario(const Json& document);
/// Reads and parses the JSON only; io and malformed input raise.
Json read_scenario_document(const std::string& path);
Scenario load_scenario(const std::string& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_fixed;
  std::optional<double> decay_tol;
  std::optional<int> n_max;
  std::optional<std::vector<std::string>> tasks;
};

/// Edits the raw document; parse_scenario validates the result. n_max
/// replaces any explicit schedule with 1, 2, 4, ..., n_max.
Json apply_overrides(Json document, const Overrides& overrides);

struct Report {
  std::string name;
  Json document;
  Verdict verdict = Verdict::unknown;
};

/// Tasks run in declared order; a task that fails records its reason and
/// leaves its siblings running.
Report run(const Scenario& scenario);

enum class ReportFormat { report_json, decay_csv, spectrum_csv };

ReportFormat parse_format(const std::string& name);
const char* to_string(ReportFormat format) noexcept;
const char* file_suffix(ReportFormat format) noexcept;

std::string render(const Report& report, ReportFormat format);
/// Writes <out_dir>/<name><suffix> through a temporary file and a rename.
/// Returns the final path.
std::string emit(const Report& report, ReportFormat format, const std::string& out_dir);
/// Rejects unknown major schema versions.
Report load_report(const std::string& path);

std::vector<Json> gallery_documents();
std::vector<Scenario> gallery();

/// Sorted keys, two-space indent, trailing newline.
std::string dump(const Json& value);

Verdict parse_verdict(const std::string& name);

// Shared serializers.
Json to_json(const Matrix& m);
Json to_json(const Operator& x);
Json to_json(const Projection& p);
Json to_json(const CheckReport& r);
Json to_json(const DecayReport& d);
Matrix matrix_from_json(const Json& value, const std::string& path);
Operator operator_from_json(const TracialAlgebra& A, const Json& value, const std::string& path);

}  // namespace ncerg

#endif
