#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rigidity/bottleneck.hpp"
#include "rigidity/errors.hpp"

using namespace rigidity;
using namespace rigidity::matching;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exhaustive optimum over injective point -> slot maps.
double brute(const ClassProblem& pb, const std::vector<double>& x, int k) {
  auto off = pb.offsets();
  const std::int64_t L = pb.slots();
  std::vector<int> cls(L);
  for (std::size_t c = 0; c < pb.classes(); ++c)
    for (auto s = off[c]; s < off[c + 1]; ++s) cls[s] = static_cast<int>(c);
  const std::size_t M = x.size();
  std::vector<int> slot(M);
  std::vector<char> used(L, 0);
  double best = kInf;
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == M) {
      int lo = std::numeric_limits<int>::max(), hi = -1;
      double cost = 0;
      for (std::size_t i = 0; i < M; ++i) {
        lo = std::min(lo, cls[slot[i]]);
        hi = std::max(hi, cls[slot[i]]);
        cost = std::max(cost, pair_cost(x[i], pb.values[cls[slot[i]]], pb.weight[cls[slot[i]]]));
      }
      int interior = 0;
      for (std::int64_t s = 0; s < L; ++s) {
        if (used[s]) continue;
        if (cls[s] < hi && (!pb.leading_free || cls[s] > lo)) ++interior;
      }
      if (interior <= k) best = std::min(best, cost);
      return;
    }
    for (std::int64_t s = 0; s < L; ++s) {
      if (used[s]) continue;
      used[s] = 1;
      slot[j] = static_cast<int>(s);
      self(self, j + 1);
      used[s] = 0;
    }
  };
  if (M == 0) return 0.0;
  rec(rec, 0);
  return best;
}

ClassProblem random_problem(std::mt19937_64& rng, bool leading_free) {
  ClassProblem pb;
  pb.leading_free = leading_free;
  std::uniform_int_distribution<int> ncls(1, 5), cap(1, 3);
  std::uniform_real_distribution<double> step(0.2, 2.0), w(0.3, 3.0), u(0, 1);
  double v = u(rng) * 2 - 1;
  int total = 0;
  const int C = ncls(rng);
  for (int c = 0; c < C && total < 7; ++c) {
    int m = std::min(cap(rng), 7 - total);
    pb.values.push_back(v);
    pb.capacity.push_back(m);
    pb.weight.push_back(u(rng) < 0.15 ? kInf : w(rng));
    total += m;
    v += step(rng);
  }
  return pb;
}

}  // namespace

TEST_SUITE("bottleneck") {
  TEST_CASE("exact solver matches exhaustive search") {
    std::mt19937_64 rng(20240611);
    int checked = 0;
    for (int it = 0; it < 3000; ++it) {
      ClassProblem pb = random_problem(rng, it % 3 == 0);
      const auto L = pb.slots();
      std::uniform_int_distribution<int> mdist(0, static_cast<int>(L));
      std::uniform_int_distribution<int> kdist(0, 2);
      const int M = mdist(rng), k = kdist(rng);
      std::uniform_real_distribution<double> xd(pb.values.front() - 1.5, pb.values.back() + 1.5);
      std::vector<double> x(M);
      for (double& t : x) t = xd(rng);
      if (it % 5 == 0 && M > 1) x[1] = x[0];  // ties among points
      std::sort(x.begin(), x.end());
      double want = brute(pb, x, k);
      if (!std::isfinite(want)) {
        CHECK_THROWS(solve(pb, x, k));
        continue;
      }
      Solution s = solve(pb, x, k);
      REQUIRE(s.value == doctest::Approx(want).epsilon(1e-12));
      // The witness attains the value and respects the skip budget.
      double cost = 0;
      auto off = pb.offsets();
      for (std::size_t j = 0; j < x.size(); ++j) {
        std::size_t c = static_cast<std::size_t>(std::upper_bound(off.begin(), off.end(), s.slot[j]) - off.begin() - 1);
        cost = std::max(cost, pair_cost(x[j], pb.values[c], pb.weight[c]));
      }
      CHECK(cost == doctest::Approx(s.value).epsilon(1e-12));
      CHECK(static_cast<int>(interior_unmatched(pb, s.slot).size()) <= k);
      Solution mono = solve_monotone(pb, x, k);
      CHECK(mono.value >= s.value * (1 - 1e-12));
      CHECK(feasible(pb, x, k, s.value));
      if (s.value > 0) CHECK_FALSE(feasible(pb, x, k, std::nextafter(s.value, 0.0)));
      ++checked;
    }
    CHECK(checked > 2000);
  }

  TEST_CASE("order-preserving assignment can be beaten") {
    // Two classes with very different weights: crossing the pair is cheaper.
    ClassProblem pb{{0.0, 1.0}, {1, 1}, {0.01, 100.0}, false};
    std::vector<double> x{-0.6, -0.4};
    Solution mono = solve_monotone(pb, x, 0);
    Solution best = solve(pb, x, 0);
    CHECK(mono.value == doctest::Approx(60.0));
    CHECK(best.value == doctest::Approx(40.0));
    CHECK(best.value == doctest::Approx(brute(pb, x, 0)));
    CHECK_FALSE(best.monotone);
  }

  TEST_CASE("skips inside the matched range are counted, trailing ones are free") {
    ClassProblem pb{{0, 1, 2, 3}, {1, 1, 1, 1}, {1, 1, 1, 1}, false};
    std::vector<double> x{0, 2};
    CHECK(solve(pb, x, 1).value == 0.0);
    CHECK(solve(pb, x, 0).value == doctest::Approx(1.0));
    pb.leading_free = true;
    std::vector<double> y{2, 3};
    CHECK(solve(pb, y, 0).value == 0.0);
  }

  TEST_CASE("validation") {
    ClassProblem pb{{1, 0}, {1, 1}, {1, 1}, false};
    CHECK_THROWS_AS(pb.validate(), InvalidArgument);
    ClassProblem z{{0, 1}, {0, 1}, {1, 1}, false};
    CHECK_THROWS_AS(z.validate(), InvalidArgument);
  }
}
