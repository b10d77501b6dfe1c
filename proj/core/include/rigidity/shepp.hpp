#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/lattice.hpp"

namespace rigidity {

struct ShiftScenario {
  enum class Kind { SingleDeletion, PairedDeletion, DoubleSided, UnitShift };
  Kind kind = Kind::UnitShift;
  LatticeSpec spec;                // sites enumerated by nondecreasing V (SingleDeletion, PairedDeletion)
  std::vector<std::int64_t> S, T;  // enumeration indices; DoubleSided: positive-side z values
  double alpha = 0.5;              // UnitShift exponent; DoubleSided positive-side exponent
};

std::string to_string(ShiftScenario::Kind k);

enum class Verdict { Converges, Diverges, Inconclusive };
std::string to_string(Verdict v);

struct SheppCheckpoint {
  std::int64_t I = 0;  // number of terms summed
  double partial_sum = 0.0;
  double last_term = 0.0;
};

struct TailFit {
  double exponent = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SheppReport {
  std::vector<SheppCheckpoint> checkpoints;
  std::optional<TailFit> tail;
  Verdict verdict = Verdict::Inconclusive;
  bool terms_vanish = false;         // every term of the last decade is exactly zero
  std::int64_t last_nonzero = -1;    // index of the last nonzero term
};

// Partial sums of the squared mean differences sum_i (P_S(i) - P_T(i))^2.
SheppReport shepp_sum(const ShiftScenario& scenario, std::int64_t I_max);

struct EllpReport {
  std::vector<double> ratios;            // index n-1 holds n = 1..max_n; NaN at gap-zero events
  std::vector<std::uint64_t> s;          // s_0..s_max_n (integer p)
  std::vector<std::int64_t> gap_zero;    // n with a vanishing floating-point gap
  double tail_slope = 0.0;               // log-log slope over the last decade
  enum class Trend { TendsToZero, DoesNotTendToZero, Inconclusive } trend = Trend::Inconclusive;
};

std::string to_string(EllpReport::Trend t);

// sqrt(log n) / (s_n^{alpha/p} - s_{n-1}^{alpha/p}) for an Lp lattice.
EllpReport ellp_condition(const LatticeSpec& spec, int max_n);

// a^q - b^q for a >= b >= 0 without cancellation.
double power_difference(double a, double b, double q);

}  // namespace rigidity
