#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rigidity::matching {

// Bottleneck assignment of sorted real points into slots grouped in classes of
// equal value. Cost of putting x into a slot of class c is |x - v_c| / w_c
// (zero when w_c is infinite). Unmatched slots strictly between the lowest
// and the highest matched value are "interior" and limited to k; slots above
// the highest matched value are always free, slots below the lowest are free
// only when leading_free is set.
struct ClassProblem {
  std::vector<double> values;          // strictly increasing
  std::vector<std::int64_t> capacity;  // >= 1
  std::vector<double> weight;          // > 0, may be +inf
  bool leading_free = false;

  std::size_t classes() const { return values.size(); }
  std::int64_t slots() const;
  // First slot id of every class plus a final entry equal to slots().
  std::vector<std::int64_t> offsets() const;
  void validate() const;
};

struct Solution {
  double value = 0.0;
  std::vector<std::int64_t> slot;  // slot id per point
  bool monotone = true;            // optimum attained by the order-preserving DP
};

double pair_cost(double x, double v, double w);

// Optimal order-preserving assignment (an upper bound on the unrestricted optimum).
Solution solve_monotone(const ClassProblem& problem, std::span<const double> points, int k);

// Is there an assignment (any, not only monotone) with bottleneck <= t?
bool feasible(const ClassProblem& problem, std::span<const double> points, int k, double t);

// Exact optimum over all injective assignments. lower must not exceed the
// optimum (for instance the optimum for k + 1); it only narrows the search.
Solution solve(const ClassProblem& problem, std::span<const double> points, int k, double lower = 0.0);

// Interior unmatched slots of an assignment, in slot order.
std::vector<std::int64_t> interior_unmatched(const ClassProblem& problem, const std::vector<std::int64_t>& slot);

}  // namespace rigidity::matching
