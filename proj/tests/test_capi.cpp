#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "ncerg/ncerg.h"

namespace fs = std::filesystem;

namespace {

size_t gallery_index(const char* name) {
  for (size_t i = 0; i < ncerg_gallery_count(); ++i) {
    if (std::strcmp(ncerg_gallery_name(i), name) == 0) return i;
  }
  return static_cast<size_t>(-1);
}

}  // namespace

TEST_CASE("version and strings") {
  CHECK(std::string(ncerg_version()) == "1.0.0");
  CHECK(std::string(ncerg_status_string(NCERG_OK)) == "ok");
  CHECK(std::string(ncerg_status_string(NCERG_E_SCHEMA)) == "schema");
  CHECK(std::string(ncerg_verdict_string(NCERG_VERDICT_FAIL)) == "fail");
  ncerg_format f;
  CHECK(ncerg_format_parse("decay-csv", &f) == NCERG_OK);
  CHECK(f == NCERG_FORMAT_DECAY_CSV);
  CHECK(ncerg_format_parse("xml", &f) == NCERG_E_INVALID_ARGUMENT);
  CHECK(std::string(ncerg_last_error()).find("xml") != std::string::npos);
}

TEST_CASE("null arguments are rejected") {
  ncerg_scenario* s = nullptr;
  CHECK(ncerg_scenario_parse(nullptr, nullptr, &s) == NCERG_E_INVALID_ARGUMENT);
  CHECK(ncerg_run(nullptr, nullptr) == NCERG_E_INVALID_ARGUMENT);
  CHECK(ncerg_report_verdict(nullptr) == NCERG_VERDICT_UNKNOWN);
  CHECK(ncerg_report_task_name(nullptr, 0) == nullptr);
  ncerg_scenario_free(nullptr);
  ncerg_report_free(nullptr);
}

TEST_CASE("gallery run through handles") {
  REQUIRE(ncerg_gallery_count() >= 8);
  CHECK(ncerg_gallery_name(ncerg_gallery_count()) == nullptr);
  const size_t idx = gallery_index("amplitude-damping");
  REQUIRE(idx < ncerg_gallery_count());

  ncerg_overrides o{};
  o.tasks = "decompose,mean";
  o.has_n_max = 1;
  o.n_max = 8;
  ncerg_scenario* s = nullptr;
  REQUIRE(ncerg_gallery_get(idx, &o, &s) == NCERG_OK);
  CHECK(std::string(ncerg_scenario_name(s)) == "amplitude-damping");

  ncerg_report* r = nullptr;
  REQUIRE(ncerg_run(s, &r) == NCERG_OK);
  // Eight steps are too few to certify the 1/a decay of the wandering part.
  CHECK(ncerg_report_verdict(r) == NCERG_VERDICT_FAIL);
  REQUIRE(ncerg_report_task_count(r) == 2);
  CHECK(std::string(ncerg_report_task_name(r, 0)) == "decompose");
  CHECK(ncerg_report_task_verdict(r, 0) == NCERG_VERDICT_FAIL);
  CHECK(std::string(ncerg_report_task_name(r, 1)) == "mean");
  CHECK(ncerg_report_task_verdict(r, 1) == NCERG_VERDICT_PASS);
  CHECK(std::string(ncerg_report_task_status(r, 1)) == "ok");

  char* csv = nullptr;
  REQUIRE(ncerg_report_render(r, NCERG_FORMAT_DECAY_CSV, &csv) == NCERG_OK);
  CHECK(std::string(csv) == "a,norm\n1,1\n2,0.75\n4,0.46875\n8,0.2490234375\n");
  ncerg_string_free(csv);

  const fs::path dir = fs::temp_directory_path() / "ncerg-capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  char* path = nullptr;
  REQUIRE(ncerg_report_emit(r, NCERG_FORMAT_REPORT_JSON, dir.c_str(), &path) == NCERG_OK);
  ncerg_report* back = nullptr;
  REQUIRE(ncerg_report_load(path, &back) == NCERG_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(ncerg_report_render(r, NCERG_FORMAT_REPORT_JSON, &a) == NCERG_OK);
  REQUIRE(ncerg_report_render(back, NCERG_FORMAT_REPORT_JSON, &b) == NCERG_OK);
  CHECK(std::string(a) == std::string(b));
  ncerg_string_free(a);
  ncerg_string_free(b);
  ncerg_string_free(path);
  ncerg_report_free(back);
  ncerg_report_free(r);
  ncerg_scenario_free(s);
}

TEST_CASE("scenario errors map to status codes") {
  ncerg_scenario* s = nullptr;
  CHECK(ncerg_scenario_parse("{", nullptr, &s) == NCERG_E_SCHEMA);
  CHECK(s == nullptr);
  CHECK(ncerg_scenario_load("/nonexistent/x.scn", nullptr, &s) == NCERG_E_IO);

  REQUIRE(ncerg_gallery_get(gallery_index("identity"), nullptr, &s) == NCERG_OK);
  char* doc = nullptr;
  REQUIRE(ncerg_scenario_document(s, &doc) == NCERG_OK);
  std::string text = doc;
  ncerg_string_free(doc);
  ncerg_scenario_free(s);

  // Unknown keys are schema errors; overrides apply before validation.
  const auto pos = text.find("\"seed\"");
  REQUIRE(pos != std::string::npos);
  std::string noseed = text;
  noseed.replace(pos, std::string("\"seed\"").size(), "\"unused_seed_key\"");
  s = nullptr;
  CHECK(ncerg_scenario_parse(noseed.c_str(), nullptr, &s) == NCERG_E_SCHEMA);

  ncerg_overrides o{};
  o.has_seed = 1;
  o.seed = 7;
  CHECK(ncerg_scenario_parse(text.c_str(), &o, &s) == NCERG_OK);
  ncerg_scenario_free(s);

  CHECK(ncerg_gallery_get(1000, nullptr, &s) == NCERG_E_INVALID_ARGUMENT);
}
