#pragma once

// Command-line front end. Every subcommand fills a Settings value, which is
// also what `run --config` reads from JSON and what reports echo back.

#include "grim/grim.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace grim::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

struct Settings {
  std::string mode;  // approx | quadrature | cubature | l2-demo | geim-compare

  double epsilon = 1e-6;
  std::optional<double> epsilon0;
  std::optional<int> max_steps;
  std::vector<int> k_schedule{1};  // one entry broadcasts
  std::vector<int> s_schedule{1};
  std::uint64_t seed = 0;
  bool grouped = false;
  std::string method = "tree";  // tree | basic

  std::optional<std::filesystem::path> evals, weights, norms, groups, distances, points;
  std::optional<std::filesystem::path> out, trace;
  bool diagnostics = false;

  // quadrature
  std::optional<double> bandwidth;
  std::optional<int> nodes;
  // cubature
  int degree = 1;
  // l2-demo, geim-compare
  int n_grid = 20;
  int n_functionals = 1000;
  double mollifier_width = 5e-4;
  int domain_points = 20001;
  int local_points = 201;
  std::optional<int> geim_features;
};

/// Reads a config document. Relative paths are taken relative to `base_dir`.
/// Unknown keys and wrongly typed values raise ConfigError.
Settings settings_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json settings_to_json(const Settings& settings);

/// Broadcasts scalar schedules to `max_steps` entries; a schedule longer than
/// one entry fixes max_steps when that is unset.
GrimConfig resolve_config(const Settings& settings, int default_max_steps);

struct RunOutput {
  nlohmann::json report;
  GrimTrace trace;
};

/// Runs the pipeline selected by settings.mode. The report has no wall time
/// and no trace path; run_command adds both.
RunOutput execute(const Settings& settings);

/// CSV text: header plus one line per step.
std::string trace_csv(const GrimTrace& trace);

/// Writes the report (stdout when `report_path` is empty) and the trace CSV
/// (skipped when `trace_path` is empty). IO failures raise DataError.
void write_results(const nlohmann::json& report, const GrimTrace& trace,
                   const std::optional<std::filesystem::path>& report_path,
                   const std::optional<std::filesystem::path>& trace_path);

/// Default trace path next to the report: r.json -> r.trace.csv.
std::optional<std::filesystem::path> trace_path_for(const Settings& settings);

/// Full command line including the program name; returns the process exit code.
int run_command(const std::vector<std::string>& argv);

}  // namespace grim::cli
