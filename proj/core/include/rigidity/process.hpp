#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/lattice.hpp"
#include "rigidity/noise.hpp"

namespace rigidity {

enum class Side { Positive, Negative, TwoSided };
std::string to_string(Side s);

// What the detector sees: sorted observed values inside the window cut.
struct PointConfiguration {
  std::vector<double> points;
  double window_cut = std::numeric_limits<double>::infinity();       // upper cut
  double window_cut_low = -std::numeric_limits<double>::infinity();  // lower cut (two-sided)
  Side side = Side::Positive;

  void validate() const;
};

// Simulation-side record. Reads go through accessors that count accesses so
// tests can assert the detector path never touches it.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(std::vector<std::int64_t> deleted, std::vector<std::int64_t> point_origin,
              std::int64_t cut_exits, std::int64_t window_sites);
  GroundTruth(const GroundTruth& other);
  GroundTruth& operator=(const GroundTruth& other);

  const std::vector<std::int64_t>& deleted() const;
  // Site id each observed point came from, aligned with PointConfiguration::points.
  const std::vector<std::int64_t>& point_origin() const;
  std::int64_t cut_exits() const { return cut_exits_; }
  std::int64_t window_sites() const { return window_sites_; }
  std::uint64_t accesses() const { return accesses_.load(); }

 private:
  std::vector<std::int64_t> deleted_;
  std::vector<std::int64_t> point_origin_;
  std::int64_t cut_exits_ = 0;     // surviving window sites whose point fell outside the cut
  std::int64_t window_sites_ = 0;  // surviving window sites
  mutable std::atomic<std::uint64_t> accesses_{0};
};

struct DeletionSpec {
  enum class Kind { None, Explicit, Random };
  Kind kind = Kind::None;
  std::vector<std::int64_t> sites;               // Explicit: site ids
  std::vector<std::vector<std::int32_t>> coords;  // Explicit: coordinates (resolved to ids)
  int count = 0;                                  // Random
  int max_shell = 0;                              // Random: shells <= max_shell (both sides)

  static DeletionSpec none() { return {}; }
  static DeletionSpec explicit_sites(std::vector<std::int64_t> ids);
  static DeletionSpec random(int count, int max_shell);
};

struct WindowSpec {
  enum class Cut { Default, None, Value };
  int max_shell = 0;
  Cut cut = Cut::Default;
  double cut_value = 0.0;       // Value: upper cut
  double cut_value_low = 0.0;   // Value, two-sided: lower cut
  int edge_margin = 2;          // used by the default rule
};

struct SimulatedProcess {
  PointConfiguration observed;
  GroundTruth truth;
};

// Window cut of the default rule: r_{N-edge} + 3 sigma (and the mirror image
// below zero for two-sided domains).
std::pair<double, double> default_window_cut(const LatticeSpec& spec, const NoiseModel& noise,
                                             int max_shell, int edge_margin);

std::vector<std::int64_t> resolve_deletion(const DeletionSpec& deletion, const SiteList& sites,
                                           std::uint64_t seed);

// Observed points {V(z) + g_z : z in window, z not deleted} restricted to the cut.
SimulatedProcess simulate_process(const LatticeSpec& spec, const SiteList& sites,
                                  const std::vector<double>& noise, const std::vector<std::int64_t>& deleted,
                                  const WindowSpec& window, const NoiseModel& noise_model);

SimulatedProcess simulate_process(const LatticeSpec& spec, const NoiseModel& noise, const DeletionSpec& deletion,
                                  const WindowSpec& window, std::uint64_t seed);

}  // namespace rigidity
