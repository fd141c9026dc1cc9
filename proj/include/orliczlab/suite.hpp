#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orliczlab/report.hpp"

namespace orliczlab {

struct ScenarioContext {
  std::uint64_t seed = 0;
  ConstantsConfig constants;
};

struct Scenario {
  std::string name;
  std::string description;
  std::function<ReportList(const ScenarioContext&)> run;
};

/// Every named scenario, in default manifest order.
const std::vector<Scenario>& scenario_registry();
std::vector<std::string> default_manifest();

/// One scenario name per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> read_manifest(const std::string& path);

struct ScenarioOutcome {
  std::string name;
  ReportList rows;
  /// nonempty when the scenario threw or is unknown
  std::string error;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  /// 0 reads ORLICZLAB_THREADS, falling back to the hardware concurrency
  int threads = 0;
  ConstantsConfig constants;
};

struct SuiteResult {
  std::vector<ScenarioOutcome> scenarios;
  ReportCounts counts;
  double seconds = 0.0;
  int threads = 1;

  /// Deterministic summary: no timings, no seed.
  nlohmann::json summary() const;
  nlohmann::json timing(std::uint64_t seed) const;
};

/// Worker count from ORLICZLAB_THREADS, capped by the number of jobs.
int worker_count(int requested, std::size_t jobs);

SuiteResult run_suite(const std::vector<std::string>& manifest, const SuiteOptions& opts = {});

}  // namespace orliczlab
