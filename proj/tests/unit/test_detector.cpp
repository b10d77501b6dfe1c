#include <doctest.h>

#include <cmath>
#include <random>

#include "chain_example.hpp"
#include "rigidity/detector.hpp"
#include "rigidity/errors.hpp"

using namespace rigidity;

namespace {

DetectorConfig config(LatticeSpec spec, int N, int k_max = 3, int edge = 1, int burn_in = 0) {
  DetectorConfig c;
  c.spec = spec;
  c.max_shell = N;
  c.k_max = k_max;
  c.edge_margin = edge;
  c.burn_in = burn_in;
  return c;
}

LatticeSpec line(double alpha) {
  LatticeSpec s;
  s.alpha = alpha;
  return s;
}

LatticeSpec half_line(double alpha) {
  LatticeSpec s;
  s.domain = Domain::HalfLine;
  s.alpha = alpha;
  return s;
}

PointConfiguration zero_noise(const LatticeSpec& spec, int N, const std::vector<std::int64_t>& deleted) {
  WindowSpec w;
  w.max_shell = N;
  w.cut = WindowSpec::Cut::None;
  SiteList sites = enumerate_sites(spec, N);
  std::vector<double> g(sites.size(), 0.0);
  return simulate_process(spec, sites, g, deleted, w, NoiseModel::zero()).observed;
}

}  // namespace

TEST_SUITE("detector") {
  TEST_CASE("zero noise without deletion gives D_0 = 0") {
    auto c = config(line(2), 6);
    auto obs = zero_noise(c.spec, 6, {});
    CHECK(truncated_fk(c, obs, 0).first == 0.0);
    CHECK(detector_profile(c, obs).k_hat == 0);
  }

  TEST_CASE("one site of shell 1 deleted, k = 0") {
    auto c = config(line(2), 3, 1);
    auto obs = zero_noise(c.spec, 3, {1});
    CHECK(obs.points == std::vector<double>{0, 1, 4, 4, 9, 9});
    double d0 = truncated_fk(c, obs, 0).first;
    CHECK(d0 >= 1.0);
    CHECK(d0 == brute_force_fk(c, obs, 0));
    CHECK(truncated_fk(c, obs, 1).first == 0.0);
  }

  TEST_CASE("six sites, two deleted, k = 2") {
    auto c = config(half_line(1.0), 5, 2);
    auto obs = zero_noise(c.spec, 5, {1, 3});
    CHECK(brute_force_fk(c, obs, 2) == 0.0);
    CHECK(truncated_fk(c, obs, 2).first == 0.0);
  }

  TEST_CASE("zero noise, three deletions on a 31-site window") {
    auto c = config(line(1.5), 15, 4, 2, -1);
    auto obs = zero_noise(c.spec, 15, {3, 10, 17});
    auto p = detector_profile(c, obs);
    CHECK(p.D[0] >= 1.0);
    CHECK(p.D[1] >= 1.0);
    CHECK(p.D[2] >= 1.0);
    CHECK(p.D[3] == 0.0);
    CHECK(p.k_hat == 3);
    SiteList sites = enumerate_sites(c.spec, 15);
    std::vector<int> shells;
    for (auto id : p.witness[3].skipped_interior) shells.push_back(sites[id].shell);
    CHECK(shells == std::vector<int>{sites[3].shell, sites[10].shell, sites[17].shell});
  }

  TEST_CASE("shared noise on the half-line: D_k is a distance to an integer shift") {
    auto c = config(half_line(1.0), 9, 4, 1, 0);
    for (double g : {0.3, -0.45, 1.2, -1.7}) {
      WindowSpec w;
      w.max_shell = 9;
      w.cut = WindowSpec::Cut::Value;
      w.cut_value = 8.5;
      SiteList sites = enumerate_sites(c.spec, 9);
      std::vector<double> noise(sites.size(), g);
      auto obs = simulate_process(c.spec, sites, noise, {0, 1}, w, NoiseModel::shared(1.0)).observed;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 4; ++k) {
        best = std::min(best, std::abs(g + 2 - k));
        double dp = truncated_fk(c, obs, k).first;
        CHECK(dp == doctest::Approx(best).epsilon(1e-12));
        CHECK(dp == doctest::Approx(brute_force_fk(c, obs, k)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("properties on random noisy instances") {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 60; ++it) {
      LatticeSpec s = it % 2 ? line(1.0 + (it % 5) * 0.3) : half_line(0.8 + (it % 4) * 0.4);
      const int N = 20 + it % 7;
      auto c = config(s, N, 3, 2, -1);
      SiteList sites = enumerate_sites(s, N);
      std::vector<double> g(sites.size());
      std::normal_distribution<double> nd(0, 0.3);
      for (double& x : g) x = nd(rng);
      WindowSpec w;
      w.max_shell = N;
      w.cut = WindowSpec::Cut::None;
      std::vector<std::int64_t> del;
      for (int j = 0; j < it % 3; ++j) del.push_back(3 * j + 1);
      auto proc = simulate_process(s, sites, g, del, w, NoiseModel::iid(0.09));
      DetectorWindow win(c);
      auto p = detector_profile(win, proc.observed);
      CHECK(proc.truth.accesses() == 0);
      for (int k = 0; k < 3; ++k) CHECK(p.D[k + 1] <= p.D[k]);
      for (double d : p.D) CHECK(d >= 0);
      if (p.k_hat) {
        CHECK(p.D[*p.k_hat] <= c.tau);
        for (int k = 0; k < *p.k_hat; ++k) CHECK(p.D[k] > c.tau);
      }
      CHECK(detector_profile(win, proc.observed).D == p.D);
      // Identity matching with B = S bounds D_{|S|} by the assumption ratio.
      ShellTable t = enumerate_shells(s, N);
      double rho = 0, run = 0;
      std::vector<double> shell_max(N + 1, 0.0);
      for (std::size_t i = 0; i < sites.size(); ++i) {
        if (std::find(del.begin(), del.end(), static_cast<std::int64_t>(i)) != del.end()) continue;
        shell_max[sites[i].shell] = std::max(shell_max[sites[i].shell], std::abs(g[i]));
      }
      for (int n = 0; n <= c.last_normalized_shell(); ++n) {
        run = std::max(run, shell_max[n]);
        if (n >= c.first_normalized_shell()) rho = std::max(rho, run / (t.values[n] - t.values[n - 1]));
      }
      const bool nondecreasing_gaps = s.alpha >= 1.0;
      if (nondecreasing_gaps) CHECK(p.D[del.size()] <= rho * (1 + 1e-12));
    }
  }

  TEST_CASE("translation equivariance of the matching problem") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    auto c = config(line(1.3), 12, 2, 1, 0);
    DetectorWindow win(c);
    auto obs = zero_noise(c.spec, 12, {4});
    for (double& x : obs.points) x += 0.2 * u(rng);
    std::sort(obs.points.begin(), obs.points.end());
    matching::ClassProblem pb = win.problem();
    for (int k = 0; k <= 2; ++k) {
      auto base = matching::solve(pb, obs.points, k);
      for (double shift : {3.0, -17.5}) {
        matching::ClassProblem moved = pb;
        for (double& v : moved.values) v += shift;
        std::vector<double> pts = obs.points;
        for (double& x : pts) x += shift;
        CHECK(matching::solve(moved, pts, k).value == doctest::Approx(base.value).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("errors") {
    auto c = config(half_line(1.0), 3, 1);
    PointConfiguration obs;
    obs.points = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(truncated_fk(c, obs, 0), WindowTooSmall);
    obs.points = {1, 2};
    CHECK_THROWS_AS(truncated_fk(c, obs, 2), InvalidArgument);
    obs.points = {2, 1};
    CHECK_THROWS_AS(truncated_fk(c, obs, 0), InvalidArgument);
    c.tau = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    auto big = config(line(1), 10, 1);
    CHECK_THROWS_AS(brute_force_fk(big, zero_noise(big.spec, 10, {}), 0), ResourceError);
  }

  TEST_CASE("two-sided profile") {
    LatticeSpec s;
    s.domain = Domain::TwoSided;
    s.alpha = 2.0;
    s.alpha_negative = 2.0;
    auto c = config(s, 12, 3, 2, -1);
    CHECK(two_sided_profile(c, zero_noise(s, 12, {})).D[0] == 0.0);
    // Negative-side deletions only: sites 0..12 are z = -13..-1.
    auto p = two_sided_profile(c, zero_noise(s, 12, {9, 11}));
    CHECK(p.k_hat == 2);
    SiteList sites = enumerate_sites(s, 12);
    WindowSpec w;
    w.max_shell = 12;
    NoiseSampler sampler(NoiseModel::iid(1.0), sites);
    int hits = 0;
    for (int seed = 0; seed < 10; ++seed) {
      auto proc = simulate_process(s, sites, sampler.sample(seed).site_values, {9, 11}, w, NoiseModel::iid(1.0));
      hits += two_sided_profile(c, proc.observed).k_hat == 2;
    }
    CHECK(hits >= 9);
  }

  TEST_CASE("brute-force oracle on two-sided instances") {
    LatticeSpec s;
    s.domain = Domain::TwoSided;
    s.alpha = 1.0;
    s.alpha_negative = 1.5;
    auto c = config(s, 3, 2, 1, 0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0, 0.4);
    for (int it = 0; it < 40; ++it) {
      SiteList sites = enumerate_sites(s, 3);
      std::vector<double> g(sites.size());
      for (double& x : g) x = nd(rng);
      WindowSpec w;
      w.max_shell = 3;
      w.cut = WindowSpec::Cut::None;
      std::vector<std::int64_t> del{static_cast<std::int64_t>(it % 8)};
      auto obs = simulate_process(s, sites, g, del, w, NoiseModel::iid(0.16)).observed;
      for (int k = 0; k <= 2; ++k) {
        CHECK(truncated_fk(c, obs, k).first == doctest::Approx(brute_force_fk(c, obs, k)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("mismatch chains: worked example") {
    auto f = chain_example::build();
    DetectorWindow win(f.config);
    auto chains = trace_mismatch_chains(win, f.obs, f.match, f.truth);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].sites == std::vector<std::int64_t>{2, 3, 1});
    CHECK(chains[0].end == MismatchChain::End::HitB);
    CHECK(chains[1].sites == std::vector<std::int64_t>{4, 5, 6, 7});
    CHECK(chains[1].end == MismatchChain::End::ExitedWindow);
    CHECK(chains[1].subsequence == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("mismatch chains on zero-noise instances") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 40; ++it) {
      auto c = config(half_line(1.0 + 0.1 * (it % 5)), 25, 3, 2, -1);
      std::vector<std::int64_t> del;
      std::uniform_int_distribution<int> pick(0, 20);
      while (del.size() < 3) {
        auto v = pick(rng);
        if (std::find(del.begin(), del.end(), v) == del.end()) del.push_back(v);
      }
      std::sort(del.begin(), del.end());
      SiteList sites = enumerate_sites(c.spec, 25);
      WindowSpec w;
      w.max_shell = 25;
      w.cut = WindowSpec::Cut::None;
      auto proc = simulate_process(c.spec, sites, std::vector<double>(sites.size(), 0.0), del, w, NoiseModel::zero());
      DetectorWindow win(c);
      auto p = detector_profile(win, proc.observed);
      // B = T: nothing to trace.
      CHECK(trace_mismatch_chains(win, proc.observed, p.witness[3], proc.truth).empty());
      for (int k = 0; k < 3; ++k) {
        auto chains = trace_mismatch_chains(win, proc.observed, p.witness[k], proc.truth);
        bool exits = false;
        for (const auto& ch : chains) exits |= ch.end == MismatchChain::End::ExitedWindow;
        CHECK(exits);
      }
    }
  }
}
