#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/config.hpp"

namespace rigidity {

extern const char* const kToolName;
std::string tool_version();

struct RunOptions {
  std::string out_dir;              // overrides config.output
  int jobs = 0;                     // 0: hardware concurrency
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool write_files = true;
};

struct RunResult {
  nlohmann::json manifest;
  nlohmann::json summary;
  std::string directory;
  // File name -> contents, in the order they are written.
  std::vector<std::pair<std::string, std::string>> files;
};

RunResult run(ExperimentConfig config, const RunOptions& options = {});

// --out, then config.output, then $RIGIDITY_LAB_OUT/<experiment>-<seed>, then ./runs/<experiment>-<seed>.
std::string resolve_output_dir(const ExperimentConfig& config, const RunOptions& options);

nlohmann::json error_record(const std::exception& e);
int exit_code_of(const std::exception& e);

// One detector trial, the building block of detector-trial and threshold-sweep.
struct TrialOutcome {
  std::uint64_t seed = 0;
  std::vector<std::int64_t> deleted;
  std::vector<double> D;
  std::optional<int> k_hat;
  std::int64_t points = 0;
  std::int64_t cut_exits = 0;
  std::int64_t window_sites = 0;
  bool correct() const { return k_hat && *k_hat == static_cast<int>(deleted.size()); }
  std::vector<std::pair<int, MismatchChain>> chains;  // (k of the witness, chain)
};

std::vector<TrialOutcome> run_detector_trials(const ExperimentConfig& config, int jobs);

// Detector profile of an externally supplied configuration, using the spec,
// window and detector sections of config. Points beyond the window cut are
// dropped and counted.
nlohmann::json detect_points(const ExperimentConfig& config, std::vector<double> points);

nlohmann::json to_json(const DetectorProfile& profile, const DetectorWindow& window);

// Trial seeds of a run: derive_seed(seed, t) for t < trials.
std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, int trials);

// Runs body(i) for i < count on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace rigidity
