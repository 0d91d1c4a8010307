#include "ncerg/ncerg.h"

#include <cstring>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "ncerg/scenarios.hpp"

struct ncerg_scenario {
  ncerg::Scenario scenario;
};

struct ncerg_report {
  ncerg::Report report;
  std::vector<std::string> task_names;
  std::vector<std::string> task_status;
  std::vector<std::string> task_reason;
};

namespace {

thread_local std::string last_error;

ncerg_status fail(ncerg_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and maps exceptions onto status codes.
template <class Body>
ncerg_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return NCERG_OK;
  } catch (const ncerg::Error& e) {
    return fail(static_cast<ncerg_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NCERG_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NCERG_E_INTERNAL, e.what());
  } catch (...) {
    return fail(NCERG_E_INTERNAL, "unknown exception");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ncerg::Overrides convert(const ncerg_overrides* in) {
  ncerg::Overrides out;
  if (!in) return out;
  if (in->has_seed) out.seed = in->seed;
  if (in->has_tol_fixed) out.tol_fixed = in->tol_fixed;
  if (in->has_decay_tol) out.decay_tol = in->decay_tol;
  if (in->has_n_max) out.n_max = in->n_max;
  if (in->tasks) {
    std::vector<std::string> tasks;
    std::stringstream ss(in->tasks);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) tasks.push_back(item);
    }
    out.tasks = tasks;
  }
  return out;
}

ncerg_verdict convert(ncerg::Verdict v) {
  switch (v) {
    case ncerg::Verdict::pass:
      return NCERG_VERDICT_PASS;
    case ncerg::Verdict::fail:
      return NCERG_VERDICT_FAIL;
    default:
      return NCERG_VERDICT_UNKNOWN;
  }
}

ncerg::ReportFormat convert(ncerg_format f) {
  switch (f) {
    case NCERG_FORMAT_REPORT_JSON:
      return ncerg::ReportFormat::report_json;
    case NCERG_FORMAT_DECAY_CSV:
      return ncerg::ReportFormat::decay_csv;
    case NCERG_FORMAT_SPECTRUM_CSV:
      return ncerg::ReportFormat::spectrum_csv;
  }
  throw ncerg::Error(ncerg::ErrorCode::invalid_argument, "unknown report format");
}

ncerg_report* wrap(ncerg::Report report) {
  auto* out = new ncerg_report{std::move(report), {}, {}, {}};
  const auto& results = out->report.document.at("results");
  for (auto it = results.begin(); it != results.end(); ++it) {
    out->task_names.push_back(it.key());
    out->task_status.push_back(it->value("status", std::string("ok")));
    out->task_reason.push_back(it->value("reason", std::string()));
  }
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw ncerg::Error(ncerg::ErrorCode::invalid_argument, std::string(what) + " is null");
}

ncerg_scenario* make_scenario(ncerg::Json doc, const ncerg_overrides* overrides) {
  return new ncerg_scenario{ncerg::parse_scenario(ncerg::apply_overrides(std::move(doc),
                                                                         convert(overrides)))};
}

}  // namespace

extern "C" {

const char* ncerg_version(void) { return ncerg::kToolVersion; }

const char* ncerg_status_string(ncerg_status status) {
  if (status == NCERG_OK) return "ok";
  if (status == NCERG_E_INTERNAL) return "internal";
  if (status >= NCERG_E_INVALID_ARGUMENT && status <= NCERG_E_IO) {
    return ncerg::to_string(static_cast<ncerg::ErrorCode>(static_cast<int>(status)));
  }
  return "unknown";
}

const char* ncerg_verdict_string(ncerg_verdict verdict) {
  switch (verdict) {
    case NCERG_VERDICT_PASS:
      return "pass";
    case NCERG_VERDICT_FAIL:
      return "fail";
    default:
      return "unknown";
  }
}

const char* ncerg_last_error(void) { return last_error.c_str(); }

void ncerg_string_free(char* s) { delete[] s; }

ncerg_status ncerg_format_parse(const char* name, ncerg_format* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    switch (ncerg::parse_format(name)) {
      case ncerg::ReportFormat::report_json:
        *out = NCERG_FORMAT_REPORT_JSON;
        break;
      case ncerg::ReportFormat::decay_csv:
        *out = NCERG_FORMAT_DECAY_CSV;
        break;
      case ncerg::ReportFormat::spectrum_csv:
        *out = NCERG_FORMAT_SPECTRUM_CSV;
        break;
    }
  });
}

ncerg_status ncerg_scenario_load(const char* path, const ncerg_overrides* overrides,
                                 ncerg_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = make_scenario(ncerg::read_scenario_document(path), overrides);
  });
}

ncerg_status ncerg_scenario_parse(const char* json, const ncerg_overrides* overrides,
                                  ncerg_scenario** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = nullptr;
    ncerg::Json doc;
    try {
      doc = ncerg::Json::parse(json);
    } catch (const ncerg::Json::parse_error& e) {
      throw ncerg::Error(ncerg::ErrorCode::schema, std::string("malformed JSON: ") + e.what());
    }
    *out = make_scenario(std::move(doc), overrides);
  });
}

const char* ncerg_scenario_name(const ncerg_scenario* scenario) {
  return scenario ? scenario->scenario.name.c_str() : "";
}

ncerg_status ncerg_scenario_document(const ncerg_scenario* scenario, char** json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(json, "json");
    *json = copy_string(ncerg::dump(scenario->scenario.document));
  });
}

void ncerg_scenario_free(ncerg_scenario* scenario) { delete scenario; }

size_t ncerg_gallery_count(void) {
  try {
    return ncerg::gallery_documents().size();
  } catch (...) {
    return 0;
  }
}

const char* ncerg_gallery_name(size_t index) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& d : ncerg::gallery_documents()) out.push_back(d.at("name"));
    return out;
  }();
  return index < names.size() ? names[index].c_str() : nullptr;
}

ncerg_status ncerg_gallery_get(size_t index, const ncerg_overrides* overrides,
                               ncerg_scenario** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto docs = ncerg::gallery_documents();
    if (index >= docs.size()) {
      throw ncerg::Error(ncerg::ErrorCode::invalid_argument,
                         "gallery index " + std::to_string(index) + " out of range");
    }
    *out = make_scenario(std::move(docs[index]), overrides);
  });
}

ncerg_status ncerg_run(const ncerg_scenario* scenario, ncerg_report** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    *out = nullptr;
    *out = wrap(ncerg::run(scenario->scenario));
  });
}

ncerg_status ncerg_report_load(const char* path, ncerg_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = wrap(ncerg::load_report(path));
  });
}

const char* ncerg_report_name(const ncerg_report* report) {
  return report ? report->report.name.c_str() : "";
}

ncerg_verdict ncerg_report_verdict(const ncerg_report* report) {
  return report ? convert(report->report.verdict) : NCERG_VERDICT_UNKNOWN;
}

size_t ncerg_report_task_count(const ncerg_report* report) {
  return report ? report->task_names.size() : 0;
}

const char* ncerg_report_task_name(const ncerg_report* report, size_t index) {
  if (!report || index >= report->task_names.size()) return nullptr;
  return report->task_names[index].c_str();
}

ncerg_verdict ncerg_report_task_verdict(const ncerg_report* report, size_t index) {
  if (!report || index >= report->task_names.size()) return NCERG_VERDICT_UNKNOWN;
  const auto& task = report->report.document["results"][report->task_names[index]];
  try {
    return convert(ncerg::parse_verdict(task.value("verdict", std::string("unknown"))));
  } catch (...) {
    return NCERG_VERDICT_UNKNOWN;
  }
}

const char* ncerg_report_task_status(const ncerg_report* report, size_t index) {
  if (!report || index >= report->task_status.size()) return nullptr;
  return report->task_status[index].c_str();
}

const char* ncerg_report_task_reason(const ncerg_report* report, size_t index) {
  if (!report || index >= report->task_reason.size()) return nullptr;
  return report->task_reason[index].c_str();
}

ncerg_status ncerg_report_render(const ncerg_report* report, ncerg_format format, char** text) {
  return guarded([&] {
    require(report, "report");
    require(text, "text");
    *text = copy_string(ncerg::render(report->report, convert(format)));
  });
}

ncerg_status ncerg_report_emit(const ncerg_report* report, ncerg_format format,
                               const char* out_dir, char** path) {
  return guarded([&] {
    require(report, "report");
    require(out_dir, "out_dir");
    const std::string written = ncerg::emit(report->report, convert(format), out_dir);
    if (path) *path = copy_string(written);
  });
}

void ncerg_report_free(ncerg_report* report) { delete report; }

}  // extern "C"
