#include "rigidity/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Suffix-min of gaps over shells [max(s, lo), hi]; +inf when that range is empty.
std::vector<double> normalizers(const ShellTable& t, int lo, int hi) {
  const int N = t.max_shell();
  std::vector<double> w(N + 1, kInf);
  double run = kInf;
  for (int n = N; n >= 0; --n) {
    if (n >= 1 && n >= lo && n <= hi) run = std::min(run, t.values[n] - t.values[n - 1]);
    w[n] = n <= hi ? run : kInf;
  }
  return w;
}

// Normalized cumulative maxima for shells lo..hi of one side.
std::vector<double> shell_stats(const std::vector<double>& mismatch_by_shell, const ShellTable& t, int lo, int hi) {
  std::vector<double> out;
  if (hi < lo) return out;
  double run = 0.0;
  int n = 0;
  for (; n < lo && n < static_cast<int>(mismatch_by_shell.size()); ++n) run = std::max(run, mismatch_by_shell[n]);
  for (n = lo; n <= hi; ++n) {
    run = std::max(run, mismatch_by_shell[n]);
    out.push_back(run / (t.values[n] - t.values[n - 1]));
  }
  return out;
}

}  // namespace

void DetectorConfig::validate() const {
  spec.validate();
  if (max_shell < 1) throw_invalid("detector max_shell must be >= 1");
  if (k_max < 0) throw_invalid("k_max must be >= 0");
  if (!(tau > 0 && tau < 1)) throw_invalid("threshold tau must lie in (0, 1)");
  if (edge_margin < 1) throw_invalid("edge_margin must be >= 1");
  if (burn_in < -1) throw_invalid("burn_in must be >= 0 (or -1 for the default)");
  if (first_normalized_shell() > last_normalized_shell()) {
    std::ostringstream os;
    os << "normalizer range is empty: shells [" << first_normalized_shell() << ", " << last_normalized_shell()
       << "]";
    throw InvalidArgument(os.str());
  }
}

int DetectorConfig::first_normalized_shell() const {
  int b = burn_in < 0 ? max_shell / 2 : burn_in;
  return std::max(1, b);
}

int DetectorConfig::last_normalized_shell() const { return max_shell - edge_margin; }

DetectorWindow::DetectorWindow(const DetectorConfig& config, Side side) : config_(config), side_(side) {
  config_.validate();
  const int N = config_.max_shell;
  const int lo = config_.first_normalized_shell(), hi = config_.last_normalized_shell();
  const bool two = config_.spec.domain == Domain::TwoSided;
  if (side_ != Side::Positive && !two) throw_invalid("negative or two-sided detection needs a two_sided domain");
  positive_ = enumerate_shells(config_.spec, N);
  if (two) negative_ = negative_shells(config_.spec, N);

  auto add = [&](double v, std::int64_t m, double w, int s, int shell) {
    problem_.values.push_back(v);
    problem_.capacity.push_back(m);
    problem_.weight.push_back(w);
    class_side_.push_back(s);
    class_shell_.push_back(shell);
  };
  if (side_ == Side::Positive) {
    auto w = normalizers(positive_, lo, hi);
    for (int n = 0; n <= N; ++n) add(positive_.values[n], positive_.multiplicities[n], w[n], 1, n);
    negative_sites_ = two ? negative_.cumulative.back() : 0;
  } else if (side_ == Side::Negative) {
    auto w = normalizers(negative_, lo, hi);
    for (int n = 0; n <= N; ++n) add(negative_.values[n], negative_.multiplicities[n], w[n], -1, n);
  } else {
    auto wn = normalizers(negative_, lo, hi);
    auto wp = normalizers(positive_, lo, hi);
    for (int n = N; n >= 0; --n) add(-negative_.values[n], negative_.multiplicities[n], wn[n], -1, n);
    for (int n = 0; n <= N; ++n) add(positive_.values[n], positive_.multiplicities[n], wp[n], 1, n);
    problem_.leading_free = true;
  }
  slot_offset_ = problem_.offsets();
}

std::size_t DetectorWindow::class_of_slot(std::int64_t slot) const {
  return static_cast<std::size_t>(std::upper_bound(slot_offset_.begin(), slot_offset_.end(), slot) -
                                  slot_offset_.begin() - 1);
}

std::int64_t DetectorWindow::site_of_slot(std::int64_t slot) const {
  if (side_ == Side::Negative) return site_count() - 1 - slot;
  return slot + negative_sites_;
}

std::int64_t DetectorWindow::slot_of_site(std::int64_t site) const {
  if (side_ == Side::Negative) return site_count() - 1 - site;
  return site - negative_sites_;
}

double DetectorWindow::value_of_slot(std::int64_t slot) const {
  double v = problem_.values[class_of_slot(slot)];
  return side_ == Side::Negative ? -v : v;
}

namespace {

std::pair<double, MatchResult> solve_fk(const DetectorWindow& window, const PointConfiguration& obs, int k,
                                        double lower) {
  obs.validate();
  const auto& cfg = window.config();
  if (k < 0) throw_invalid("k must be >= 0");
  if (k > cfg.k_max) {
    std::ostringstream os;
    os << "k = " << k << " exceeds k_max = " << cfg.k_max;
    throw InvalidArgument(os.str());
  }
  if (obs.side != window.side()) throw_invalid("point configuration side does not match the detector window");
  const auto M = static_cast<std::int64_t>(obs.points.size());
  if (M > window.site_count()) {
    std::ostringstream os;
    os << M << " observed points but only " << window.site_count() << " candidate sites";
    throw WindowTooSmall(os.str());
  }
  const bool mirrored = window.side() == Side::Negative;
  std::vector<double> pts(obs.points);
  if (mirrored) {
    std::reverse(pts.begin(), pts.end());
    for (double& x : pts) x = -x;
  }
  matching::Solution sol = matching::solve(window.problem(), pts, k, lower);

  MatchResult r;
  r.bottleneck = sol.value;
  r.monotone = sol.monotone;
  r.assignment.resize(M);
  for (std::int64_t j = 0; j < M; ++j) {
    std::int64_t src = mirrored ? M - 1 - j : j;
    r.assignment[src] = window.site_of_slot(sol.slot[j]);
  }
  auto interior = matching::interior_unmatched(window.problem(), sol.slot);
  std::vector<char> used(window.site_count(), 0);
  for (auto s : sol.slot) used[s] = 1;
  for (auto s : interior) used[s] = 2;
  for (std::int64_t s = 0; s < window.site_count(); ++s) {
    if (used[s] == 0) r.skipped_trailing.push_back(window.site_of_slot(s));
  }
  for (auto s : interior) r.skipped_interior.push_back(window.site_of_slot(s));
  std::sort(r.skipped_interior.begin(), r.skipped_interior.end());
  std::sort(r.skipped_trailing.begin(), r.skipped_trailing.end());

  const int N = cfg.max_shell;
  const int lo = cfg.first_normalized_shell(), hi = cfg.last_normalized_shell();
  std::vector<double> mm_pos(N + 1, 0.0), mm_neg(N + 1, 0.0);
  const auto& pb = window.problem();
  for (std::int64_t j = 0; j < M; ++j) {
    std::size_t c = window.class_of_slot(sol.slot[j]);
    double e = std::abs(pts[j] - pb.values[c]);
    auto& mm = window.side_of_class(c) > 0 ? mm_pos : mm_neg;
    mm[window.shell_of_class(c)] = std::max(mm[window.shell_of_class(c)], e);
  }
  r.first_shell = lo;
  if (window.side() == Side::Negative) {
    r.per_shell_stat = shell_stats(mm_neg, window.negative_table(), lo, hi);
  } else {
    r.per_shell_stat = shell_stats(mm_pos, window.positive_table(), lo, hi);
    if (window.side() == Side::TwoSided) {
      r.per_shell_stat_negative = shell_stats(mm_neg, window.negative_table(), lo, hi);
    }
  }
  return {sol.value, std::move(r)};
}

}  // namespace

std::pair<double, MatchResult> truncated_fk(const DetectorWindow& window, const PointConfiguration& obs, int k) {
  return solve_fk(window, obs, k, 0.0);
}

std::pair<double, MatchResult> truncated_fk(const DetectorConfig& config, const PointConfiguration& obs, int k) {
  return truncated_fk(DetectorWindow(config, obs.side), obs, k);
}

DetectorProfile detector_profile(const DetectorWindow& window, const PointConfiguration& obs) {
  const auto& cfg = window.config();
  DetectorProfile p;
  p.tau = cfg.tau;
  p.D.assign(cfg.k_max + 1, 0.0);
  p.witness.resize(cfg.k_max + 1);
  // D_k is nonincreasing in k, so each D_{k+1} bounds the search for D_k.
  for (int k = cfg.k_max; k >= 0; --k) {
    const double lower = k == cfg.k_max ? 0.0 : p.D[k + 1];
    std::tie(p.D[k], p.witness[k]) = solve_fk(window, obs, k, lower);
  }
  for (int k = 0; k <= cfg.k_max; ++k) {
    if (p.D[k] <= cfg.tau) {
      p.k_hat = k;
      break;
    }
  }
  return p;
}

DetectorProfile detector_profile(const DetectorConfig& config, const PointConfiguration& obs) {
  return detector_profile(DetectorWindow(config, obs.side), obs);
}

DetectorProfile two_sided_profile(const DetectorWindow& window, const PointConfiguration& obs) {
  if (window.side() != Side::TwoSided || obs.side != Side::TwoSided) {
    throw_invalid("two_sided_profile needs a two-sided window and configuration");
  }
  return detector_profile(window, obs);
}

DetectorProfile two_sided_profile(const DetectorConfig& config, const PointConfiguration& obs) {
  return two_sided_profile(DetectorWindow(config, Side::TwoSided), obs);
}

double brute_force_fk(const DetectorConfig& config, const PointConfiguration& obs, int k) {
  config.validate();
  obs.validate();
  const int N = config.max_shell;
  SiteList all = enumerate_sites(config.spec, N);
  struct Site {
    double value;
    int shell;
    int side;
  };
  std::vector<Site> sites;
  for (const auto& e : all.entries()) {
    if (obs.side == Side::Positive && e.side < 0) continue;
    if (obs.side == Side::Negative && e.side > 0) continue;
    sites.push_back({e.value, e.shell, e.side});
  }
  if (sites.size() > 10) throw ResourceError("brute_force_fk is limited to 10 sites");
  const std::size_t L = sites.size(), M = obs.points.size();
  if (M > L) throw WindowTooSmall("more observed points than sites");
  if (M == 0) return 0.0;

  ShellTable pos = enumerate_shells(config.spec, N);
  ShellTable neg = config.spec.domain == Domain::TwoSided ? negative_shells(config.spec, N) : ShellTable{};
  const int lo = config.first_normalized_shell(), hi = config.last_normalized_shell();

  std::vector<int> site_of(M, -1);
  std::vector<char> taken(L, 0);
  double best = kInf;
  auto evaluate = [&]() {
    double vmin = kInf, vmax = -kInf;
    for (std::size_t j = 0; j < M; ++j) {
      vmin = std::min(vmin, sites[site_of[j]].value);
      vmax = std::max(vmax, sites[site_of[j]].value);
    }
    int interior = 0;
    for (std::size_t i = 0; i < L; ++i) {
      if (taken[i]) continue;
      double v = sites[i].value;
      bool inside;
      if (obs.side == Side::Positive) inside = v < vmax;
      else if (obs.side == Side::Negative) inside = v > vmin;
      else inside = v > vmin && v < vmax;
      interior += inside;
    }
    if (interior > k) return;
    double stat = 0.0;
    for (int side : {1, -1}) {
      const ShellTable& t = side > 0 ? pos : neg;
      if (t.values.empty()) continue;
      for (int n = lo; n <= hi; ++n) {
        double mm = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
          const Site& s = sites[site_of[j]];
          if (s.side == side && s.shell <= n) mm = std::max(mm, std::abs(obs.points[j] - s.value));
        }
        stat = std::max(stat, mm / (t.values[n] - t.values[n - 1]));
      }
    }
    best = std::min(best, stat);
  };
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == M) {
      evaluate();
      return;
    }
    for (std::size_t i = 0; i < L; ++i) {
      if (taken[i]) continue;
      taken[i] = 1;
      site_of[j] = static_cast<int>(i);
      self(self, j + 1);
      taken[i] = 0;
    }
  };
  rec(rec, 0);
  if (!std::isfinite(best)) throw WindowTooSmall("no assignment respects the skip budget");
  return best;
}

std::vector<MismatchChain> trace_mismatch_chains(const DetectorWindow& window, const PointConfiguration& obs,
                                                 const MatchResult& match, const GroundTruth& truth) {
  const auto& origin = truth.point_origin();
  const auto& deleted = truth.deleted();
  if (origin.size() != obs.points.size() || match.assignment.size() != obs.points.size()) {
    throw_invalid("match, observation and ground truth are not aligned");
  }
  std::unordered_map<std::int64_t, std::int64_t> psi;  // site -> point index
  for (std::size_t j = 0; j < match.assignment.size(); ++j) psi[match.assignment[j]] = static_cast<std::int64_t>(j);
  std::unordered_set<std::int64_t> in_b(match.skipped_interior.begin(), match.skipped_interior.end());

  std::vector<std::int64_t> starts;
  for (auto t : deleted) {
    if (!in_b.count(t)) starts.push_back(t);
  }
  std::sort(starts.begin(), starts.end());
  std::unordered_set<std::int64_t> visited;
  std::vector<MismatchChain> chains;
  const std::int64_t L = window.site_count();
  auto value = [&](std::int64_t site) {
    return site >= 0 && site < L ? window.site_value(site) : kInf;
  };
  for (auto u0 : starts) {
    if (visited.count(u0)) continue;
    MismatchChain ch;
    ch.sites.push_back(u0);
    visited.insert(u0);
    std::int64_t cur = u0;
    for (;;) {
      if (in_b.count(cur)) {
        ch.end = MismatchChain::End::HitB;
        break;
      }
      auto it = psi.find(cur);
      if (it == psi.end()) {
        ch.end = MismatchChain::End::ExitedWindow;
        break;
      }
      std::int64_t next = origin[it->second];
      if (visited.count(next)) throw std::logic_error("mismatch chain revisits a site");
      visited.insert(next);
      ch.sites.push_back(next);
      cur = next;
    }
    // n_0 = min{n : V(u_{n+1}) > V(u_n) >= 0}; n_j = min{n > n_{j-1} : V(u_{n+1}) > V(u_{n_{j-1}+1})}.
    const std::size_t len = ch.sites.size();
    std::size_t n = 0;
    for (; n + 1 < len; ++n) {
      double a = value(ch.sites[n]), b = value(ch.sites[n + 1]);
      if (b > a && a >= 0) break;
    }
    if (n + 1 < len) {
      ch.subsequence.push_back(n);
      for (;;) {
        double ref = value(ch.sites[ch.subsequence.back() + 1]);
        std::size_t m = ch.subsequence.back() + 1;
        while (m + 1 < len && !(value(ch.sites[m + 1]) > ref)) ++m;
        if (m + 1 >= len) break;
        ch.subsequence.push_back(m);
      }
    }
    chains.push_back(std::move(ch));
  }
  return chains;
}

}  // namespace rigidity
