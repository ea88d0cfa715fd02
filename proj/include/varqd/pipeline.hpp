#pragma once

#include "varqd/config.hpp"
#include "varqd/io.hpp"
#include "varqd/propagate.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace varqd {

struct RunSummary {
  std::filesystem::path directory;
  Kind kind = Kind::Frozen;
  double final_time = 0.0;
  double bound = 0.0;
  double epsilon_max = 0.0;
  std::optional<double> true_error;
  bool violated = false;
};

/// Runs one scenario and writes trajectory.csv, certificate.json, manifest.json (plus
/// certified.csv with an inline reference, and binary snapshots for grid states).
RunSummary run_scenario(const Scenario& scenario, const std::filesystem::path& directory);

/// Joins a variational run with a reference run of the same physics and writes
/// certified.csv and certification.json into the run directory.
CertificateReport certify_directories(const std::filesystem::path& run,
                                      const std::filesystem::path& reference);

struct ComparisonSummary {
  std::string label;
  double final_time = 0.0;
  double bound = 0.0;
  double epsilon_max = 0.0;
  std::optional<double> true_error;
  /// Largest differences against the first run over common sample times.
  double max_dq = 0.0;
  double max_dp = 0.0;
  double max_depsilon = 0.0;
  double max_dbound = 0.0;
};

struct Comparison {
  /// t followed by <label>:<column> for every run.
  CsvTable aligned;
  std::vector<ComparisonSummary> runs;
};

/// Aligns runs that share a potential and a horizon.
Comparison compare_directories(const std::vector<std::filesystem::path>& runs);

/// Worker count: VARQD_THREADS if set, else the hardware concurrency.
int thread_budget();

/// Runs the scenario once per value of `key`, in parallel, under
/// <output.directory>/<key>=<value>.
std::vector<RunSummary> sweep(const ConfigTable& base, const std::filesystem::path& base_directory,
                              const std::string& key, const std::vector<std::string>& values,
                              int threads);

}  // namespace varqd
