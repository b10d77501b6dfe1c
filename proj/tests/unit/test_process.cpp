#include <doctest.h>

#include <cmath>

#include "rigidity/errors.hpp"
#include "rigidity/process.hpp"

using namespace rigidity;

namespace {

LatticeSpec line(double alpha) {
  LatticeSpec s;
  s.alpha = alpha;
  return s;
}

WindowSpec window(int N, WindowSpec::Cut cut = WindowSpec::Cut::None) {
  WindowSpec w;
  w.max_shell = N;
  w.cut = cut;
  return w;
}

}  // namespace

TEST_SUITE("process") {
  TEST_CASE("zero noise, no deletion") {
    auto p = simulate_process(line(2), NoiseModel::zero(), DeletionSpec::none(), window(3), 1);
    CHECK(p.observed.points == std::vector<double>{0, 1, 1, 4, 4, 9, 9});
    CHECK(p.truth.cut_exits() == 0);
  }

  TEST_CASE("deleting both sites of shell 1") {
    DeletionSpec d;
    d.kind = DeletionSpec::Kind::Explicit;
    d.coords = {{-1}, {1}};
    auto p = simulate_process(line(2), NoiseModel::zero(), d, window(3), 1);
    CHECK(p.observed.points == std::vector<double>{0, 4, 4, 9, 9});
    CHECK(p.truth.deleted() == std::vector<std::int64_t>{1, 2});
  }

  TEST_CASE("observed points are sorted and traced to their sites") {
    auto w = window(40, WindowSpec::Cut::Default);
    auto p = simulate_process(line(1.5), NoiseModel::iid(1.0), DeletionSpec::random(3, 20), w, 9);
    CHECK(std::is_sorted(p.observed.points.begin(), p.observed.points.end()));
    SiteList sites = enumerate_sites(line(1.5), 40);
    const auto& origin = p.truth.point_origin();
    REQUIRE(origin.size() == p.observed.points.size());
    for (auto id : p.truth.deleted()) {
      CHECK(std::find(origin.begin(), origin.end(), id) == origin.end());
      CHECK(sites[id].shell <= 20);
    }
    CHECK(p.truth.window_sites() == static_cast<std::int64_t>(sites.size()) - 3);
    CHECK(p.truth.window_sites() == static_cast<std::int64_t>(origin.size()) + p.truth.cut_exits());
    for (double x : p.observed.points) CHECK(x <= p.observed.window_cut);
  }

  TEST_CASE("random deletion is a function of the seed") {
    SiteList sites = enumerate_sites(line(1), 30);
    auto a = resolve_deletion(DeletionSpec::random(4, 10), sites, 5);
    auto b = resolve_deletion(DeletionSpec::random(4, 10), sites, 5);
    auto c = resolve_deletion(DeletionSpec::random(4, 10), sites, 6);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 4);
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  }

  TEST_CASE("deletions outside the window are rejected") {
    SiteList sites = enumerate_sites(line(1), 3);
    CHECK_THROWS_AS(resolve_deletion(DeletionSpec::explicit_sites({7}), sites, 1), InvalidArgument);
    DeletionSpec d;
    d.kind = DeletionSpec::Kind::Explicit;
    d.coords = {{9}};
    CHECK_THROWS_AS(resolve_deletion(d, sites, 1), InvalidArgument);
    CHECK_THROWS_AS(resolve_deletion(DeletionSpec::random(10, 1), sites, 1), InvalidArgument);
    CHECK_THROWS_AS(resolve_deletion(DeletionSpec::explicit_sites({1, 1}), sites, 1), InvalidArgument);
  }

  TEST_CASE("cut exits follow the Gaussian tail") {
    // Cut at r_N: a site with value r_m exits with probability P(g > r_N - r_m).
    LatticeSpec s = line(1.0);
    const int N = 30;
    WindowSpec w = window(N, WindowSpec::Cut::Value);
    w.cut_value = N;
    SiteList sites = enumerate_sites(s, N);
    double expected = 0;
    for (const auto& e : sites.entries()) expected += 0.5 * std::erfc((N - e.value) / std::sqrt(2.0));
    expected /= sites.size();
    double exits = 0, total = 0;
    NoiseSampler sampler(NoiseModel::iid(1.0), sites);
    std::vector<double> g;
    for (int r = 0; r < 4000; ++r) {
      sampler.sample_into(r, g);
      auto p = simulate_process(s, sites, g, {}, w, NoiseModel::iid(1.0));
      exits += p.truth.cut_exits();
      total += p.truth.window_sites();
    }
    const double frac = exits / total;
    CHECK(frac == doctest::Approx(expected).epsilon(0.05));
  }

  TEST_CASE("default cut") {
    auto [lo, hi] = default_window_cut(line(2), NoiseModel::iid(4.0), 10, 2);
    CHECK(hi == doctest::Approx(64 + 6));
    CHECK(std::isinf(lo));
    LatticeSpec two;
    two.domain = Domain::TwoSided;
    two.alpha = 1;
    two.alpha_negative = 2;
    auto [lo2, hi2] = default_window_cut(two, NoiseModel::iid(1.0), 10, 2);
    CHECK(hi2 == doctest::Approx(8 + 3));
    CHECK(lo2 == doctest::Approx(-(81 + 3)));
  }

  TEST_CASE("ground truth access counting") {
    auto p = simulate_process(line(1), NoiseModel::zero(), DeletionSpec::none(), window(3), 1);
    CHECK(p.truth.accesses() == 0);
    (void)p.truth.deleted();
    CHECK(p.truth.accesses() == 1);
  }
}
