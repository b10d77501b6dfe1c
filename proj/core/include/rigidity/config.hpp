#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/detector.hpp"
#include "rigidity/lattice.hpp"
#include "rigidity/linear_statistics.hpp"
#include "rigidity/noise.hpp"
#include "rigidity/process.hpp"
#include "rigidity/shepp.hpp"

namespace rigidity {

enum class Experiment { DetectorTrial, ThresholdSweep, VarianceCurve, SheppReport, AssumptionCheck, EllpReport };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct SweepSpec {
  std::string parameter;  // alpha, tau, max_shell, sigma2, burn_in
  std::vector<double> values;
};

struct VarianceSpec {
  std::vector<double> n;
  std::string scale_mode = "shell";  // shell: scale = n^alpha; direct: scale = n
  int reps = 0;                      // Monte Carlo repetitions (0 = analytic only)
  std::int64_t mc_max_sites = 40'000;
  TestFunction test_function;
  int bootstrap = 200;
  std::optional<double> covariance_m;  // also estimate Cov(S_n, S_m) at this fixed m
};

struct SheppSpec {
  ShiftScenario::Kind scenario = ShiftScenario::Kind::UnitShift;
  double alpha = 0.5;
  std::vector<std::int64_t> S, T;
  std::int64_t I_max = 1'000'000;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::DetectorTrial;
  std::uint64_t seed = 0;
  int trials = 1;
  std::string output;

  LatticeSpec spec;
  NoiseModel noise = NoiseModel::iid(1.0);
  std::string covariance_csv;  // Explicit noise source
  DeletionSpec deletion;
  WindowSpec window;
  DetectorConfig detector;  // spec/max_shell/edge_margin mirror the fields above
  bool trace_chains = false;

  SweepSpec sweep;
  VarianceSpec variance;
  SheppSpec shepp;
  int ellp_max_n = 10'000;
  std::vector<int> assumption_shells;

  void validate() const;
};

// Strict parse: unknown keys and wrong types raise SchemaError with a JSON pointer.
ExperimentConfig parse_config(const nlohmann::json& j);
// Accepts either a config document or a run manifest (uses its config snapshot).
ExperimentConfig load_config(const std::string& path);
// Normalized, defaults filled in, output path omitted.
nlohmann::json to_json(const ExperimentConfig& c);

LatticeSpec parse_spec(const nlohmann::json& j, const std::string& where = "/spec");
nlohmann::json to_json(const LatticeSpec& s);

}  // namespace rigidity
