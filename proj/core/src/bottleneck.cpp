#include "rigidity/bottleneck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "rigidity/errors.hpp"

namespace rigidity::matching {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dp {
  const ClassProblem& pb;
  std::span<const double> x;
  int k;
  std::vector<std::int64_t> cum;  // cum[c] = slots in classes < c

  double block(std::size_t c, std::int64_t p0, std::int64_t p1) const {
    if (p1 <= p0) return 0.0;
    double v = pb.values[c], w = pb.weight[c];
    return std::max(pair_cost(x[p0], v, w), pair_cost(x[p1 - 1], v, w));
  }
};

struct Run {
  double best = kInf;
  std::size_t first = 0, last = 0;
  std::int64_t first_count = 0;
  std::vector<std::int64_t> counts;  // points per class, classes [first, last]
};

// DP over classes start..C-1 given `base` points already placed (all in class
// start-1 or below) at cost `base_cost`. Updates `run` if it finds a better
// assignment. Interior skips are counted from class `start` on.
void run_dp(const Dp& dp, std::size_t start, std::int64_t base, double base_cost, std::size_t first,
            std::int64_t first_count, Run& run) {
  const std::int64_t M = static_cast<std::int64_t>(dp.x.size());
  const std::size_t C = dp.pb.classes();
  const int K = dp.k;
  if (base >= M) {
    if (base_cost < run.best) {
      run.best = base_cost;
      run.first = first;
      run.last = first;
      run.counts.assign(1, first_count);
      run.first_count = first_count;
    }
    return;
  }
  std::vector<double> cur(K + 1, kInf), nxt(K + 1);
  cur[0] = base_cost;
  std::vector<std::int16_t> back;  // (c - start) * (K+1) + s -> s'
  double best = run.best;
  std::size_t bestT = 0;
  int bestS = -1;
  std::size_t c = start;
  for (; c < C; ++c) {
    const std::int64_t before = base + dp.cum[c] - dp.cum[start];
    const std::int64_t m = dp.pb.capacity[c];
    std::fill(nxt.begin(), nxt.end(), kInf);
    back.resize((c - start + 1) * (K + 1), -1);
    std::int16_t* bk = back.data() + (c - start) * (K + 1);
    bool alive = false;
    for (int sp = 0; sp <= K; ++sp) {
      const double cs = cur[sp];
      if (!(cs < best)) continue;
      const std::int64_t P = before - sp;
      if (P >= M || P < 0) continue;
      if (P + m >= M) {
        double cand = std::max(cs, dp.block(c, P, M));
        if (cand < best) {
          best = cand;
          bestT = c;
          bestS = sp;
        }
      }
      const std::int64_t amin = std::max<std::int64_t>(0, m - (K - sp));
      const std::int64_t amax = std::min<std::int64_t>(m, M - P - 1);
      for (std::int64_t a = amin; a <= amax; ++a) {
        const int s = sp + static_cast<int>(m - a);
        double cost = a > 0 ? std::max(cs, dp.block(c, P, P + a)) : cs;
        if (cost < nxt[s] && cost < best) {
          nxt[s] = cost;
          bk[s] = static_cast<std::int16_t>(sp);
          alive = true;
        }
      }
    }
    cur.swap(nxt);
    if (!alive) break;
  }
  if (bestS < 0) return;
  // Rebuild per-class counts.
  Run r;
  r.best = best;
  r.first = first;
  r.first_count = first_count;
  r.last = bestT;
  std::vector<std::int64_t> counts(bestT - start + 1, 0);
  {
    const std::int64_t P = base + dp.cum[bestT] - dp.cum[start] - bestS;
    counts[bestT - start] = M - P;
    int s = bestS;
    for (std::size_t cc = bestT; cc-- > start;) {
      int sp = back[(cc - start) * (K + 1) + s];
      counts[cc - start] = dp.pb.capacity[cc] - (s - sp);
      s = sp;
    }
  }
  if (start == first) {
    r.counts = std::move(counts);
  } else {
    r.counts.assign(1, first_count);
    r.counts.insert(r.counts.end(), counts.begin(), counts.end());
  }
  run = std::move(r);
}

// Point index range [lo, hi) a class can accept at threshold t.
struct Intervals {
  std::vector<std::int64_t> lo, hi;
  std::vector<std::size_t> by_lo;  // classes sorted by lo
};

Intervals intervals_at(const ClassProblem& pb, std::span<const double> x, double t) {
  const std::size_t C = pb.classes();
  Intervals iv;
  iv.lo.resize(C);
  iv.hi.resize(C);
  const auto M = static_cast<std::int64_t>(x.size());
  for (std::size_t c = 0; c < C; ++c) {
    const double v = pb.values[c], w = pb.weight[c];
    if (std::isinf(w)) {
      iv.lo[c] = 0;
      iv.hi[c] = M;
      continue;
    }
    auto mid = std::lower_bound(x.begin(), x.end(), v);
    auto lo = std::partition_point(x.begin(), mid, [&](double xi) { return pair_cost(xi, v, w) > t; });
    auto hi = std::partition_point(mid, x.end(), [&](double xi) { return pair_cost(xi, v, w) <= t; });
    iv.lo[c] = lo - x.begin();
    iv.hi[c] = hi - x.begin();
  }
  iv.by_lo.resize(C);
  for (std::size_t c = 0; c < C; ++c) iv.by_lo[c] = c;
  std::stable_sort(iv.by_lo.begin(), iv.by_lo.end(),
                   [&](std::size_t a, std::size_t b) { return iv.lo[a] < iv.lo[b]; });
  return iv;
}

// Glover's greedy maximum matching for a convex bipartite graph: scan points
// left to right, give each to the open class whose interval ends first.
// Restricted to classes [a, b]. Fills class_of (or -1) when requested.
std::int64_t glover(const ClassProblem& pb, const Intervals& iv, std::int64_t M, std::size_t a, std::size_t b,
                    std::vector<std::int64_t>* class_of) {
  if (a > b || b >= pb.classes()) return 0;
  using Item = std::pair<std::int64_t, std::size_t>;  // (hi, class)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<std::int64_t> rem;
  rem.assign(b - a + 1, 0);
  for (std::size_t c = a; c <= b; ++c) rem[c - a] = pb.capacity[c];
  if (class_of) class_of->assign(M, -1);
  std::size_t ptr = 0;
  const std::size_t C = iv.by_lo.size();
  std::int64_t matched = 0;
  for (std::int64_t j = 0; j < M; ++j) {
    while (ptr < C && iv.lo[iv.by_lo[ptr]] <= j) {
      std::size_t c = iv.by_lo[ptr++];
      if (c >= a && c <= b && iv.hi[c] > iv.lo[c]) heap.emplace(iv.hi[c], c);
    }
    while (!heap.empty() && (heap.top().first <= j || rem[heap.top().second - a] == 0)) heap.pop();
    if (heap.empty()) {
      if (ptr < C) {
        // jump to the next interval start
        std::int64_t next = iv.lo[iv.by_lo[ptr]];
        if (next > j + 1) j = next - 1;
      } else {
        break;
      }
      continue;
    }
    std::size_t c = heap.top().second;
    --rem[c - a];
    ++matched;
    if (class_of) (*class_of)[j] = static_cast<std::int64_t>(c);
  }
  return matched;
}

struct Window {
  bool ok = false;
  std::size_t bottom = 0, top = 0;
};

// Find a class range [B0, T] that admits a threshold-t assignment.
Window feasible_window(const ClassProblem& pb, const Intervals& iv, std::span<const double> x, int k,
                       const std::vector<std::int64_t>& cum) {
  const auto M = static_cast<std::int64_t>(x.size());
  const std::size_t C = pb.classes();
  auto try_bottom = [&](std::size_t b0) -> std::pair<int, std::size_t> {
    // returns (-1 no full matching at all, 0 infeasible, 1 feasible) and T
    if (M == 0) return {1, b0};
    // T is at least the lowest class that can take the last point; gallop up
    // from there, then bisect.
    std::size_t start = b0;
    while (start < C && !(iv.lo[start] <= M - 1 && M - 1 < iv.hi[start])) ++start;
    if (start == C) return {-1, 0};
    std::size_t lo = start, hi = start, step = 1;
    while (glover(pb, iv, M, b0, hi, nullptr) < M) {
      if (hi == C - 1) return {-1, 0};
      lo = hi + 1;
      hi = std::min(C - 1, hi + step);
      step *= 2;
    }
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (glover(pb, iv, M, b0, mid, nullptr) == M) hi = mid; else lo = mid + 1;
    }
    const std::size_t T = lo;
    const std::size_t first_interior = pb.leading_free ? b0 + 1 : b0;
    std::int64_t deficiency = 0;
    if (T > first_interior) {
      std::int64_t cap = cum[T] - cum[first_interior];
      deficiency = cap - glover(pb, iv, M, first_interior, T - 1, nullptr);
    }
    return {deficiency <= k ? 1 : 0, T};
  };
  if (!pb.leading_free) {
    auto [st, T] = try_bottom(0);
    return {st == 1, 0, T};
  }
  for (std::size_t b0 = 0; b0 < C; ++b0) {
    if (iv.hi[b0] <= iv.lo[b0]) continue;
    auto [st, T] = try_bottom(b0);
    if (st < 0) break;
    if (st == 1) return {true, b0, T};
  }
  return {};
}

std::vector<std::int64_t> prefix(const ClassProblem& pb) {
  std::vector<std::int64_t> cum(pb.classes() + 1, 0);
  for (std::size_t c = 0; c < pb.classes(); ++c) cum[c + 1] = cum[c] + pb.capacity[c];
  return cum;
}

// Build an assignment at threshold t on a feasible window, combining a full
// matching of the points (A) with a maximum matching into the interior classes
// (B) so that every B-covered slot stays covered (Mendelsohn-Dulmage).
std::vector<std::int64_t> assignment_at(const ClassProblem& pb, const Intervals& iv, std::int64_t M,
                                        const Window& win, const std::vector<std::int64_t>& cum) {
  std::vector<std::int64_t> cls_a, cls_b;
  glover(pb, iv, M, win.bottom, win.top, &cls_a);
  const std::size_t first_interior = pb.leading_free ? win.bottom + 1 : win.bottom;
  if (win.top > first_interior) {
    glover(pb, iv, M, first_interior, win.top - 1, &cls_b);
  } else {
    cls_b.assign(M, -1);
  }
  const std::int64_t base = cum[win.bottom];
  const std::int64_t span = cum[win.top + 1] - base;
  auto to_slots = [&](const std::vector<std::int64_t>& cls) {
    std::vector<std::int64_t> used(pb.classes(), 0), slot(M, -1);
    for (std::int64_t j = 0; j < M; ++j) {
      if (cls[j] < 0) continue;
      slot[j] = cum[cls[j]] + used[cls[j]]++ - base;
    }
    return slot;
  };
  std::vector<std::int64_t> sa = to_slots(cls_a), sb = to_slots(cls_b);
  for (std::int64_t j = 0; j < M; ++j) {
    if (sa[j] < 0) throw std::logic_error("threshold matching does not cover every point");
  }
  std::vector<std::int64_t> pa(span, -1), pbk(span, -1);
  for (std::int64_t j = 0; j < M; ++j) {
    pa[sa[j]] = j;
    if (sb[j] >= 0) pbk[sb[j]] = j;
  }
  std::vector<char> seen(M, 0);
  std::vector<std::int64_t> result(M, -1), comp_points;
  std::vector<std::int64_t> stack;
  for (std::int64_t j0 = 0; j0 < M; ++j0) {
    if (seen[j0]) continue;
    comp_points.clear();
    bool need_b = false;
    stack.assign(1, j0);
    seen[j0] = 1;
    while (!stack.empty()) {
      std::int64_t j = stack.back();
      stack.pop_back();
      comp_points.push_back(j);
      for (std::int64_t s : {sa[j], sb[j]}) {
        if (s < 0) continue;
        if (pa[s] < 0) need_b = true;  // B-covered slot with no A partner
        for (std::int64_t q : {pa[s], pbk[s]}) {
          if (q >= 0 && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    for (std::int64_t j : comp_points) result[j] = (need_b ? sb[j] : sa[j]) + base;
  }
  return result;
}

}  // namespace

std::int64_t ClassProblem::slots() const {
  std::int64_t s = 0;
  for (auto m : capacity) s += m;
  return s;
}

std::vector<std::int64_t> ClassProblem::offsets() const { return prefix(*this); }

void ClassProblem::validate() const {
  if (capacity.size() != values.size() || weight.size() != values.size()) {
    throw_invalid("class problem arrays differ in length");
  }
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (capacity[c] < 1) throw_invalid("class capacity must be >= 1");
    if (!(weight[c] > 0)) throw_invalid("class weight must be > 0");
    if (c > 0 && !(values[c] > values[c - 1])) throw_invalid("class values must be strictly increasing");
  }
}

double pair_cost(double x, double v, double w) {
  if (std::isinf(w)) return 0.0;
  return std::abs(x - v) / w;
}

namespace {

// Pair costs c with lo < c <= hi, into out. False (out unspecified) when there
// are more than cap of them.
bool collect_costs(const ClassProblem& pb, std::span<const double> x, double lo, double hi, std::size_t cap,
                   std::vector<double>& out) {
  out.clear();
  const Intervals a = intervals_at(pb, x, lo), b = intervals_at(pb, x, hi);
  std::size_t total = 0;
  for (std::size_t c = 0; c < pb.classes(); ++c) {
    if (std::isinf(pb.weight[c])) continue;
    total += static_cast<std::size_t>((a.lo[c] - b.lo[c]) + (b.hi[c] - a.hi[c]));
    if (total > cap) return false;
  }
  out.reserve(total);
  for (std::size_t c = 0; c < pb.classes(); ++c) {
    if (std::isinf(pb.weight[c])) continue;
    for (std::int64_t j = b.lo[c]; j < a.lo[c]; ++j) out.push_back(pair_cost(x[j], pb.values[c], pb.weight[c]));
    for (std::int64_t j = a.hi[c]; j < b.hi[c]; ++j) out.push_back(pair_cost(x[j], pb.values[c], pb.weight[c]));
  }
  return true;
}

}  // namespace

Solution solve_monotone(const ClassProblem& pb, std::span<const double> x, int k) {
  if (k < 0) throw_invalid("k must be >= 0");
  if (k > std::numeric_limits<std::int16_t>::max()) throw_invalid("k is too large");
  const auto M = static_cast<std::int64_t>(x.size());
  Solution sol;
  if (M == 0) return sol;
  if (pb.slots() < M) throw WindowTooSmall("more observed points than candidate sites");
  Dp dp{pb, x, k, prefix(pb)};
  Run run;
  if (!pb.leading_free) {
    run_dp(dp, 0, 0, 0.0, 0, 0, run);
  } else {
    for (std::size_t b0 = 0; b0 < pb.classes(); ++b0) {
      const std::int64_t m = pb.capacity[b0];
      if (!(pair_cost(x[0], pb.values[b0], pb.weight[b0]) < run.best)) continue;
      for (std::int64_t a0 = 1; a0 <= std::min(m, M); ++a0) {
        double c0 = dp.block(b0, 0, a0);
        if (!(c0 < run.best)) continue;
        run_dp(dp, b0 + 1, a0, c0, b0, a0, run);
      }
    }
  }
  if (!std::isfinite(run.best)) throw WindowTooSmall("no assignment respects the skip budget");
  sol.value = run.best;
  sol.slot.resize(M);
  std::int64_t j = 0;
  for (std::size_t c = run.first; c <= run.last; ++c) {
    std::int64_t cnt = run.counts[c - run.first];
    for (std::int64_t i = 0; i < cnt; ++i) sol.slot[j++] = dp.cum[c] + i;
  }
  return sol;
}

bool feasible(const ClassProblem& pb, std::span<const double> x, int k, double t) {
  if (x.empty()) return true;
  if (pb.classes() == 0) return false;
  Intervals iv = intervals_at(pb, x, t);
  return feasible_window(pb, iv, x, k, prefix(pb)).ok;
}

Solution solve(const ClassProblem& pb, std::span<const double> x, int k, double lower) {
  if (!(lower >= 0.0)) throw_invalid("lower bound must be >= 0");
  Solution mono = solve_monotone(pb, x, k);
  if (mono.value <= lower) return mono;
  const double below = std::nextafter(mono.value, 0.0);
  if (!feasible(pb, x, k, below)) return mono;

  // The order-preserving optimum is not optimal. Feasibility only changes at
  // pair costs, so bisect on the bit patterns of nonnegative doubles until few
  // costs lie in (lo, hi], then bisect over those costs.
  double t;
  if (feasible(pb, x, k, lower)) {
    t = lower;
  } else {
    constexpr std::size_t kCandidateCap = std::size_t{1} << 20;
    std::uint64_t lo = std::bit_cast<std::uint64_t>(lower), hi = std::bit_cast<std::uint64_t>(below);
    std::vector<double> cand;
    for (;;) {
      if (collect_costs(pb, x, std::bit_cast<double>(lo), std::bit_cast<double>(hi), kCandidateCap, cand)) break;
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (feasible(pb, x, k, std::bit_cast<double>(mid))) hi = mid; else lo = mid;
    }
    // The optimum is the smallest feasible candidate; hi itself is feasible.
    t = std::bit_cast<double>(hi);
    std::size_t first = 0, last = cand.size();
    while (first < last) {
      std::size_t m = first + (last - first) / 2;
      std::nth_element(cand.begin() + first, cand.begin() + m, cand.begin() + last);
      if (feasible(pb, x, k, cand[m])) {
        t = cand[m];
        last = m;
      } else {
        first = m + 1;
      }
    }
  }
  const auto cum = prefix(pb);
  Intervals iv = intervals_at(pb, x, t);
  Window win = feasible_window(pb, iv, x, k, cum);
  if (!win.ok) throw std::logic_error("threshold lost feasibility");
  Solution sol;
  sol.monotone = false;
  sol.slot = assignment_at(pb, iv, static_cast<std::int64_t>(x.size()), win, cum);
  // Recover the class of every slot to evaluate the bottleneck.
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    auto c = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), sol.slot[j]) - cum.begin() - 1);
    worst = std::max(worst, pair_cost(x[j], pb.values[c], pb.weight[c]));
  }
  sol.value = worst;
  return sol;
}

std::vector<std::int64_t> interior_unmatched(const ClassProblem& pb, const std::vector<std::int64_t>& slot) {
  if (slot.empty()) return {};
  const auto cum = prefix(pb);
  auto class_of = [&](std::int64_t s) {
    return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin() - 1);
  };
  std::int64_t smin = *std::min_element(slot.begin(), slot.end());
  std::int64_t smax = *std::max_element(slot.begin(), slot.end());
  std::size_t lo_class = class_of(smin), hi_class = class_of(smax);
  std::int64_t from = pb.leading_free ? cum[lo_class + 1] : 0;
  std::int64_t to = cum[hi_class];  // slots of the top class are never interior
  std::vector<char> used(static_cast<std::size_t>(std::max<std::int64_t>(to - from, 0)), 0);
  for (std::int64_t s : slot) {
    if (s >= from && s < to) used[s - from] = 1;
  }
  std::vector<std::int64_t> out;
  for (std::int64_t s = from; s < to; ++s) {
    if (!used[s - from]) out.push_back(s);
  }
  return out;
}

}  // namespace rigidity::matching
