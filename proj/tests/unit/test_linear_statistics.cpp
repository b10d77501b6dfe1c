#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/linear_statistics.hpp"

using namespace rigidity;

namespace {

LatticeSpec lattice(int d, Norm norm, double alpha) {
  LatticeSpec s;
  s.dimension = d;
  s.norm = norm;
  s.alpha = alpha;
  return s;
}

// Sum over a coordinate box of the per-site lognormal variance.
double box_variance(int d, bool l1, double alpha, double sigma2, double scale, int R) {
  const double s = sigma2 / (scale * scale);
  long double total = 0;
  for (const auto& z : oracle::box(d, R)) {
    double r = static_cast<double>(l1 ? oracle::l1(z) : oracle::linf(z));
    double v = std::pow(r, alpha);
    total += std::exp(-2 * v / scale) * std::exp(s) * std::expm1(s);
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_SUITE("linear_statistics") {
  TEST_CASE("closed form agrees with a direct sum over sites") {
    for (bool l1 : {true, false}) {
      for (double alpha : {0.75, 1.5}) {
        for (double scale : {1.0, 3.0}) {
          LatticeSpec s = lattice(2, l1 ? Norm::l1() : Norm::linf(), alpha);
          auto a = analytic_variance_exponential(s, 1.0, scale);
          double want = box_variance(2, l1, alpha, 1.0, scale, alpha < 1 ? 400 : 120);
          CHECK(a.value == doctest::Approx(want).epsilon(1e-10));
          CHECK_FALSE(a.tail_warning);
        }
      }
    }
  }

  TEST_CASE("truncated closed form matches the window sum") {
    LatticeSpec s = lattice(1, Norm::l1(), 1.0);
    auto a = analytic_variance_exponential(s, 0.5, 50.0, {10, false});
    CHECK(a.shells_used == 10);
    CHECK(a.value == doctest::Approx(box_variance(1, true, 1.0, 0.5, 50.0, 10)).epsilon(1e-12));
    CHECK(a.tail_bound > 0);
  }

  TEST_CASE("half-line closed form") {
    LatticeSpec s;
    s.domain = Domain::HalfLine;
    s.alpha = 1.0;
    const double scale = 2.0, q = 1.0 / (scale * scale);
    // sum_{z >= 1} e^{-2z/scale} = 1 / (e^{2/scale} - 1)
    double want = std::exp(q) * std::expm1(q) / std::expm1(2 / scale);
    CHECK(analytic_variance_exponential(s, 1.0, scale).value == doctest::Approx(want).epsilon(1e-12));
  }

  TEST_CASE("Monte Carlo agrees with the closed form on the same window") {
    LatticeSpec s = lattice(2, Norm::l1(), 1.0);
    const int N = 15;
    for (double scale : {1.5, 4.0}) {
      auto mc = mc_variance(s, NoiseModel::iid(1.0), TestFunction::exponential(), scale, N, 3000, 21);
      auto a = analytic_variance_exponential(s, 1.0, scale, {N, false});
      CHECK(std::abs(mc.value - a.value) < 4 * mc.stderr_value);
      CHECK(mc.reps == 3000);
    }
  }

  TEST_CASE("shared noise variance") {
    LatticeSpec s = lattice(1, Norm::l1(), 1.0);
    const int N = 20;
    const double scale = 3.0, q = 1.0 / (scale * scale);
    double base = 0;
    for (int z = -N; z <= N; ++z) base += std::exp(-std::abs(z) / scale);
    double want = base * base * std::exp(q) * std::expm1(q);
    auto mc = mc_variance(s, NoiseModel::shared(1.0), TestFunction::exponential(), scale, N, 4000, 4);
    CHECK(std::abs(mc.value - want) < 4 * mc.stderr_value);
  }

  TEST_CASE("covariance of a statistic with itself is its variance") {
    LatticeSpec s = lattice(1, Norm::l1(), 1.0);
    auto v = mc_variance(s, NoiseModel::iid(1.0), TestFunction::exponential(), 2.0, 10, 500, 8);
    auto c = covariance_statistic(s, NoiseModel::iid(1.0), TestFunction::exponential(), 2.0, 2.0, 10, 500, 8);
    CHECK(c.value == doctest::Approx(v.value).epsilon(1e-10));
  }

  TEST_CASE("tabulated test function") {
    auto f = TestFunction::tabulated({0, 1, 2}, {1, 0.5, 0});
    CHECK(f(0.5) == doctest::Approx(0.75));
    CHECK(f(-3) == 1.0);
    CHECK(f(7) == 0.0);
    CHECK(f.scaled(2, 4) == doctest::Approx(0.75));
    CHECK_THROWS_AS(TestFunction::tabulated({0, 1}, {0.9, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(TestFunction::tabulated({1, 0}, {1, 0.5}), InvalidArgument);
  }

  TEST_CASE("least squares and scaling fit") {
    std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    auto f = least_squares(x, y);
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
    CHECK(f.slope_se == doctest::Approx(0).epsilon(1e-12));

    VarianceCurve c;
    for (double n : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
      VariancePoint p;
      p.n = n;
      p.analytic = 3 * std::pow(n, -0.7);
      c.points.push_back(p);
    }
    auto fit = variance_scaling_fit(c, 100, 1);
    CHECK(fit.slope == doctest::Approx(-0.7));
    CHECK(fit.ci_low == doctest::Approx(-0.7));
    CHECK(fit.ci_high == doctest::Approx(-0.7));

    VarianceCurve few{{c.points.begin(), c.points.begin() + 4}};
    CHECK_THROWS_AS(variance_scaling_fit(few), InvalidArgument);
    VarianceCurve narrow;
    for (double n : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      VariancePoint p;
      p.n = n;
      p.analytic = 1.0;
      narrow.points.push_back(p);
    }
    CHECK_THROWS_AS(variance_scaling_fit(narrow), InvalidArgument);
    c.points[2].analytic = 0.0;
    CHECK_THROWS_AS(variance_scaling_fit(c), InvalidArgument);
  }

  TEST_CASE("argument checks") {
    LatticeSpec s = lattice(2, Norm::lp(2), 1.0);
    CHECK_THROWS_AS(analytic_variance_exponential(s, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(analytic_variance_exponential(lattice(1, Norm::l1(), 1), 1, 0), InvalidArgument);
    CHECK_THROWS_AS(mc_variance(lattice(1, Norm::l1(), 1), NoiseModel::iid(1), TestFunction::exponential(), 1, 5, 1, 0),
                    InvalidArgument);
  }
}
