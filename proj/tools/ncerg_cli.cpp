// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ncerg/ncerg.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string scenario;
  std::string out;
  std::string format = "report-json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_fixed;
  std::optional<double> decay_tol;
  std::optional<int> n_max;
  bool gallery_run = false;
  bool quiet = false;
};

// Thrown to unwind with an exit code after the message is printed.
struct Exit {
  int code;
};

void check(ncerg_status status, const std::string& context) {
  if (status == NCERG_OK) return;
  std::cerr << "ncerg: " << context << ": " << ncerg_status_string(status) << ": "
            << ncerg_last_error() << "\n";
  throw Exit{kExitUsage};
}

ncerg_overrides build_overrides(const Options& opt, const char* tasks) {
  ncerg_overrides o{};
  if (opt.seed) {
    o.has_seed = 1;
    o.seed = *opt.seed;
  }
  if (opt.tol_fixed) {
    o.has_tol_fixed = 1;
    o.tol_fixed = *opt.tol_fixed;
  }
  if (opt.decay_tol) {
    o.has_decay_tol = 1;
    o.decay_tol = *opt.decay_tol;
  }
  if (opt.n_max) {
    o.has_n_max = 1;
    o.n_max = *opt.n_max;
  }
  o.tasks = tasks;
  return o;
}

ncerg_format parse_format(const Options& opt) {
  ncerg_format f;
  check(ncerg_format_parse(opt.format.c_str(), &f), "--format");
  return f;
}

void summarize(const ncerg_report* report, bool quiet) {
  if (quiet) return;
  const size_t n = ncerg_report_task_count(report);
  for (size_t i = 0; i < n; ++i) {
    std::cerr << ncerg_report_name(report) << " " << ncerg_report_task_name(report, i) << ": "
              << ncerg_verdict_string(ncerg_report_task_verdict(report, i));
    const std::string status = ncerg_report_task_status(report, i);
    if (status != "ok") {
      std::cerr << " (" << status;
      const std::string reason = ncerg_report_task_reason(report, i);
      if (!reason.empty()) std::cerr << ": " << reason;
      std::cerr << ")";
    }
    std::cerr << "\n";
  }
  std::cerr << ncerg_report_name(report) << ": "
            << ncerg_verdict_string(ncerg_report_verdict(report)) << "\n";
}

// Runs one scenario and writes its output; returns the report verdict.
ncerg_verdict run_and_write(ncerg_scenario* scenario, const Options& opt, ncerg_format format) {
  ncerg_report* report = nullptr;
  const ncerg_status status = ncerg_run(scenario, &report);
  check(status, ncerg_scenario_name(scenario));
  summarize(report, opt.quiet);
  const ncerg_verdict verdict = ncerg_report_verdict(report);
  ncerg_status write_status;
  if (opt.out.empty()) {
    char* text = nullptr;
    write_status = ncerg_report_render(report, format, &text);
    if (write_status == NCERG_OK) {
      std::fwrite(text, 1, std::strlen(text), stdout);
      ncerg_string_free(text);
    }
  } else {
    char* path = nullptr;
    write_status = ncerg_report_emit(report, format, opt.out.c_str(), &path);
    if (write_status == NCERG_OK) {
      std::cout << path << "\n";
      ncerg_string_free(path);
    }
  }
  ncerg_report_free(report);
  check(write_status, "write");
  return verdict;
}

int exit_for(ncerg_verdict verdict) {
  return verdict == NCERG_VERDICT_PASS ? kExitPass : kExitFail;
}

int run_scenario(const Options& opt, const char* tasks) {
  const ncerg_format format = parse_format(opt);
  const ncerg_overrides overrides = build_overrides(opt, tasks);
  ncerg_scenario* scenario = nullptr;
  check(ncerg_scenario_load(opt.scenario.c_str(), &overrides, &scenario), opt.scenario);
  ncerg_verdict verdict;
  try {
    verdict = run_and_write(scenario, opt, format);
  } catch (...) {
    ncerg_scenario_free(scenario);
    throw;
  }
  ncerg_scenario_free(scenario);
  return exit_for(verdict);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << body;
    if (!f) {
      std::cerr << "ncerg: cannot write " << tmp.string() << "\n";
      throw Exit{kExitUsage};
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::cerr << "ncerg: cannot rename to " << path.string() << ": " << ec.message() << "\n";
    throw Exit{kExitUsage};
  }
}

int run_gallery(const Options& opt) {
  const ncerg_overrides overrides = build_overrides(opt, nullptr);
  const size_t count = ncerg_gallery_count();
  if (!opt.gallery_run && opt.out.empty()) {
    for (size_t i = 0; i < count; ++i) std::cout << ncerg_gallery_name(i) << "\n";
    return kExitPass;
  }
  const ncerg_format format = opt.gallery_run ? parse_format(opt) : NCERG_FORMAT_REPORT_JSON;
  bool all_pass = true;
  for (size_t i = 0; i < count; ++i) {
    ncerg_scenario* scenario = nullptr;
    check(ncerg_gallery_get(i, &overrides, &scenario), ncerg_gallery_name(i));
    try {
      if (opt.gallery_run) {
        all_pass = run_and_write(scenario, opt, format) == NCERG_VERDICT_PASS && all_pass;
      } else {
        char* doc = nullptr;
        check(ncerg_scenario_document(scenario, &doc), ncerg_scenario_name(scenario));
        const std::filesystem::path path =
            std::filesystem::path(opt.out) / (std::string(ncerg_scenario_name(scenario)) + ".scn");
        const std::string body = doc;
        ncerg_string_free(doc);
        write_file(path, body);
        std::cout << path.string() << "\n";
      }
    } catch (...) {
      ncerg_scenario_free(scenario);
      throw;
    }
    ncerg_scenario_free(scenario);
  }
  return all_pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neveu decompositions and ergodic convergence certificates", "ncerg"};
  app.set_version_flag("--version", std::string(ncerg_version()));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool needs_scenario) {
    auto* scn = sub->add_option("--scenario", opt.scenario, "Scenario file (.scn)");
    if (needs_scenario) scn->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory; stdout if omitted");
    sub->add_option("--format", opt.format, "report-json, decay-csv or spectrum-csv")
        ->check(CLI::IsMember({"report-json", "decay-csv", "spectrum-csv"}));
    sub->add_option("--seed", opt.seed, "Override the scenario seed");
    sub->add_option("--tol-fixed", opt.tol_fixed, "Override the fixed-point tolerance");
    sub->add_option("--decay-tol", opt.decay_tol, "Override the decay tolerance");
    sub->add_option("--n-max", opt.n_max, "Largest index of the geometric schedule")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", opt.quiet, "No per-task summary on stderr");
  };

  const char* task_commands[] = {"decompose", "mean", "certify", "stochastic"};
  for (const char* name : task_commands) {
    add_common(app.add_subcommand(name, std::string("Run only the ") + name + " task"), true);
  }
  add_common(app.add_subcommand("run", "Run every task listed in the scenario"), true);
  auto* gallery = app.add_subcommand(
      "gallery", "List built-in scenarios, write them as .scn files to --out, or run them");
  add_common(gallery, false);
  gallery->add_flag("--run", opt.gallery_run, "Run every gallery scenario and emit reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (!opt.out.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(opt.out, ec);
    }
    if (gallery->parsed()) return run_gallery(opt);
    for (const char* name : task_commands) {
      if (app.got_subcommand(name)) return run_scenario(opt, name);
    }
    return run_scenario(opt, nullptr);
  } catch (const Exit& e) {
    return e.code;
  }
}
