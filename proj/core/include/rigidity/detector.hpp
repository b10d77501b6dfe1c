#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rigidity/bottleneck.hpp"
#include "rigidity/lattice.hpp"
#include "rigidity/process.hpp"

namespace rigidity {

struct DetectorConfig {
  LatticeSpec spec;
  int max_shell = 0;
  int k_max = 4;
  double tau = 0.5;
  int edge_margin = 2;
  // Shells below burn_in do not enter the normalized maximum; -1 means max_shell / 2.
  int burn_in = -1;

  void validate() const;
  int first_normalized_shell() const;
  int last_normalized_shell() const;
};

struct MatchResult {
  std::vector<std::int64_t> assignment;        // site id per observed point
  std::vector<std::int64_t> skipped_interior;  // B: unmatched sites inside the matched value range
  std::vector<std::int64_t> skipped_trailing;  // unmatched sites outside it (free)
  int first_shell = 0;                         // per_shell_stat[i] belongs to shell first_shell + i
  std::vector<double> per_shell_stat;
  std::vector<double> per_shell_stat_negative;  // two-sided only
  double bottleneck = 0.0;
  bool monotone = true;
};

struct DetectorProfile {
  std::vector<double> D;
  std::optional<int> k_hat;
  double tau = 0.5;
  std::vector<MatchResult> witness;
};

// Candidate sites of a detector window, grouped into shells, with the
// suffix-min normalizers. Built from the configuration alone.
class DetectorWindow {
 public:
  DetectorWindow(const DetectorConfig& config, Side side = Side::Positive);

  const DetectorConfig& config() const { return config_; }
  Side side() const { return side_; }
  const matching::ClassProblem& problem() const { return problem_; }
  std::int64_t site_count() const { return slot_offset_.back(); }

  // Site ids follow enumerate_sites(config.spec, config.max_shell).
  std::int64_t site_of_slot(std::int64_t slot) const;
  std::int64_t slot_of_site(std::int64_t site) const;
  double value_of_slot(std::int64_t slot) const;
  double site_value(std::int64_t site) const { return value_of_slot(slot_of_site(site)); }
  std::size_t class_of_slot(std::int64_t slot) const;
  int side_of_class(std::size_t c) const { return class_side_[c]; }
  int shell_of_class(std::size_t c) const { return class_shell_[c]; }

  const ShellTable& positive_table() const { return positive_; }
  const ShellTable& negative_table() const { return negative_; }

 private:
  DetectorConfig config_;
  Side side_;
  ShellTable positive_, negative_;
  matching::ClassProblem problem_;
  std::vector<int> class_side_, class_shell_;
  std::vector<std::int64_t> slot_offset_;
  std::int64_t negative_sites_ = 0;  // sites of the negative side in enumerate_sites order
};

std::pair<double, MatchResult> truncated_fk(const DetectorWindow& window, const PointConfiguration& obs, int k);
std::pair<double, MatchResult> truncated_fk(const DetectorConfig& config, const PointConfiguration& obs, int k);

DetectorProfile detector_profile(const DetectorWindow& window, const PointConfiguration& obs);
DetectorProfile detector_profile(const DetectorConfig& config, const PointConfiguration& obs);

// H_k over both sides of a TwoSided domain.
DetectorProfile two_sided_profile(const DetectorWindow& window, const PointConfiguration& obs);
DetectorProfile two_sided_profile(const DetectorConfig& config, const PointConfiguration& obs);

// Exhaustive search over every injective assignment; at most 10 sites.
double brute_force_fk(const DetectorConfig& config, const PointConfiguration& obs, int k);

struct MismatchChain {
  enum class End { HitB, ExitedWindow };
  std::vector<std::int64_t> sites;        // u_0, u_1, ...
  End end = End::ExitedWindow;
  std::vector<std::size_t> subsequence;  // n_0 < n_1 < ...
};

std::vector<MismatchChain> trace_mismatch_chains(const DetectorWindow& window, const PointConfiguration& obs,
                                                 const MatchResult& match, const GroundTruth& truth);

}  // namespace rigidity
