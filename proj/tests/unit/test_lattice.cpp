#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/lattice.hpp"

using namespace rigidity;

namespace {

LatticeSpec lattice(int d, Norm norm, double alpha) {
  LatticeSpec s;
  s.dimension = d;
  s.norm = norm;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("L1 and Linf multiplicities match box enumeration") {
    for (int d = 1; d <= 4; ++d) {
      const int R = d <= 2 ? 12 : 5;
      auto l1 = oracle::radius_counts(d, R, [](const auto& z) { return oracle::l1(z); }, R + 1);
      auto li = oracle::radius_counts(d, R, [](const auto& z) { return oracle::linf(z); }, R + 1);
      ShellTable t1 = enumerate_shells(lattice(d, Norm::l1(), 1.0), R);
      ShellTable ti = enumerate_shells(lattice(d, Norm::linf(), 1.0), R);
      for (int n = 0; n <= R; ++n) {
        CHECK(t1.multiplicities[n] == l1[n]);
        CHECK(ti.multiplicities[n] == li[n]);
        CHECK(l1_shell_count(d, n) == l1[n]);
        CHECK(linf_shell_count(d, n) == li[n]);
      }
    }
  }

  TEST_CASE("integer Lp shells match box enumeration") {
    for (int p : {2, 3, 4}) {
      for (int d : {1, 2, 3}) {
        const int X = d == 1 ? 16 : 9;
        auto counts = oracle::radius_counts(d, X, [p](const auto& z) { return oracle::lp_sum(z, p); },
                                            oracle::lp_sum(std::vector<int>{X}, p) + 1);
        const int N = 15;
        ShellTable t = enumerate_shells(lattice(d, Norm::lp(p), 1.0), N);
        REQUIRE(t.size() == N + 1);
        auto it = counts.begin();
        for (int n = 0; n <= N; ++n, ++it) {
          REQUIRE(it != counts.end());
          CHECK(t.exact_sums[n] == it->first);
          CHECK(t.multiplicities[n] == it->second);
          CHECK(t.values[n] == doctest::Approx(std::pow(static_cast<double>(it->first), 1.0 / p)).epsilon(1e-14));
        }
      }
    }
  }

  TEST_CASE("sums of two squares start 0 1 2 4 5 8 9 10 13 16") {
    ShellTable t = enumerate_shells(lattice(2, Norm::lp(2), 2.0), 9);
    CHECK(t.exact_sums == std::vector<std::uint64_t>{0, 1, 2, 4, 5, 8, 9, 10, 13, 16});
    CHECK(oracle::power_sums(2, 2, 4).size() >= 10);
    auto ref = oracle::power_sums(2, 2, 4);
    for (int i = 0; i < 10; ++i) CHECK(t.exact_sums[i] == ref[i]);
  }

  TEST_CASE("four squares cover every integer") {
    ShellTable t = enumerate_shells(lattice(4, Norm::lp(2), 2.0), 2000);
    for (int n = 0; n <= 2000; ++n) REQUIRE(t.exact_sums[n] == static_cast<std::uint64_t>(n));
  }

  TEST_CASE("sums of cubes agree with the naive set") {
    auto ref = oracle::power_sums(3, 3, 12);
    ShellTable t = enumerate_shells(lattice(3, Norm::lp(3), 1.0), 200);
    for (int n = 0; n <= 200; ++n) REQUIRE(t.exact_sums[n] == ref[n]);
  }

  TEST_CASE("real p shells group equal values") {
    const double p = 1.5;
    LatticeSpec s = lattice(2, Norm::lp(p), 1.0);
    ShellTable t = enumerate_shells(s, 30);
    std::map<double, std::int64_t> ref;
    for (const auto& z : oracle::box(2, 12)) {
      double v = std::pow(std::abs(z[0]), p) + std::pow(std::abs(z[1]), p);
      bool merged = false;
      for (auto& [k, c] : ref) {
        if (std::abs(k - v) <= 1e-12 * std::max(k, v)) {
          ++c;
          merged = true;
          break;
        }
      }
      if (!merged) ref[v] = 1;
    }
    auto it = ref.begin();
    for (int n = 0; n <= 30; ++n, ++it) {
      CHECK(t.sums[n] == doctest::Approx(it->first).epsilon(1e-12));
      CHECK(t.multiplicities[n] == it->second);
    }
  }

  TEST_CASE("values are increasing and gaps positive") {
    for (auto norm : {Norm::l1(), Norm::linf(), Norm::lp(2), Norm::lp(2.5)}) {
      ShellTable t = enumerate_shells(lattice(3, norm, 0.7), 60);
      auto g = image_gaps(t);
      for (double x : g) CHECK(x > 0);
      for (std::size_t n = 1; n < t.size(); ++n) CHECK(t.cumulative[n] == t.cumulative[n - 1] + t.multiplicities[n]);
    }
  }

  TEST_CASE("half-line and two-sided tables") {
    LatticeSpec h;
    h.domain = Domain::HalfLine;
    h.alpha = 2.0;
    ShellTable t = enumerate_shells(h, 3);
    CHECK(t.values == std::vector<double>{1, 4, 9, 16});
    LatticeSpec two;
    two.domain = Domain::TwoSided;
    two.alpha = 0.5;
    two.alpha_negative = 2.0;
    CHECK(enumerate_shells(two, 2).values == std::vector<double>{0, 1, std::sqrt(2.0)});
    CHECK(negative_shells(two, 2).values == std::vector<double>{1, 4, 9});
    SiteList s = enumerate_sites(two, 2);
    REQUIRE(s.size() == 6);
    std::vector<double> v;
    for (const auto& e : s.entries()) v.push_back(e.value);
    CHECK(v == std::vector<double>{-9, -4, -1, 0, 1, std::sqrt(2.0)});
    CHECK(s.coordinates(0)[0] == -3);
    CHECK(s.coordinates(3)[0] == 0);
    std::int32_t zero = 0;
    CHECK(s.find(std::span<const std::int32_t>(&zero, 1)) == 3);
  }

  TEST_CASE("sites are grouped by shell in lexicographic order") {
    for (auto norm : {Norm::l1(), Norm::linf(), Norm::lp(2), Norm::lp(1.5)}) {
      LatticeSpec s = lattice(2, norm, 1.3);
      const int N = 12;
      ShellTable t = enumerate_shells(s, N);
      SiteList sites = enumerate_sites(s, N);
      REQUIRE(static_cast<std::int64_t>(sites.size()) == t.cumulative.back());
      std::set<std::vector<int>> seen;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        auto c = sites.coordinates(i);
        std::vector<int> z(c.begin(), c.end());
        CHECK(seen.insert(z).second);
        CHECK(sites[i].site_id == static_cast<std::int64_t>(i));
        CHECK(sites[i].value == t.values[sites[i].shell]);
        if (i > 0) {
          CHECK(sites[i - 1].shell <= sites[i].shell);
          if (sites[i - 1].shell == sites[i].shell) {
            auto p = sites.coordinates(i - 1);
            CHECK(std::lexicographical_compare(p.begin(), p.end(), c.begin(), c.end()));
          }
        }
      }
    }
  }

  TEST_CASE("caps and validation") {
    CHECK_THROWS_AS(enumerate_sites(lattice(3, Norm::linf(), 1.0), 200, ShellLimits{1000, 1000}), ResourceError);
    CHECK_THROWS_AS(enumerate_shells(lattice(2, Norm::lp(2), 1.0), 100000, ShellLimits{1000, 1000}), ResourceError);
    CHECK_THROWS_AS(lattice(0, Norm::l1(), 1.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(lattice(1, Norm::l1(), -1.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(lattice(1, Norm::lp(0.5), 1.0).validate(), InvalidArgument);
    LatticeSpec h;
    h.domain = Domain::HalfLine;
    h.dimension = 2;
    CHECK_THROWS_AS(h.validate(), InvalidArgument);
    CHECK_THROWS_AS(linf_shell_count(40, 1 << 20), ResourceError);
  }
}
