#include "rigidity/linear_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rigidity/errors.hpp"
#include "rigidity/random.hpp"

namespace rigidity {

TestFunction TestFunction::exponential() { return {}; }

TestFunction TestFunction::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty()) throw_invalid("tabulated test function needs matching, non-empty grids");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw_invalid("tabulated abscissae must increase");
  }
  if (xs.front() > 0 || xs.back() < 0) throw_invalid("tabulated test function must cover x = 0");
  TestFunction f;
  f.kind = Kind::Custom;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  if (std::abs(f(0.0) - 1.0) > 1e-12) throw_invalid("test function must satisfy f(0) = 1");
  return f;
}

double TestFunction::operator()(double x) const {
  if (kind == Kind::Exponential) return std::exp(-x);
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

AnalyticVariance analytic_variance_exponential(const LatticeSpec& spec, double sigma2, double scale,
                                               const AnalyticOptions& options) {
  spec.validate();
  if (spec.domain == Domain::TwoSided) throw_invalid("analytic variance covers one-sided domains only");
  if (spec.domain == Domain::Lattice && spec.norm.kind == Norm::Kind::Lp) {
    throw_invalid("analytic variance needs an L1 or Linf lattice");
  }
  if (!(scale > 0)) throw_invalid("scale must be > 0");
  if (sigma2 < 0) throw_invalid("sigma2 must be >= 0");
  AnalyticVariance out;
  const double s = sigma2 / (scale * scale);
  const double factor = std::exp(s) * std::expm1(s);
  auto mult = [&](int m) -> double {
    if (spec.domain != Domain::Lattice) return 1.0;
    return static_cast<double>(spec.norm.kind == Norm::Kind::L1 ? l1_shell_count(spec.dimension, m)
                                                                : linf_shell_count(spec.dimension, m));
  };
  auto value = [&](int m) {
    double base = spec.domain == Domain::HalfLine ? m + 1.0 : static_cast<double>(m);
    return std::pow(base, spec.alpha);
  };
  // Sum of mult(m) e^{-2 r_m / n} (the factor is common to every shell).
  double total = 0.0, comp = 0.0;
  double last = 0.0, prev = 0.0;
  int m = 0;
  for (; m <= options.max_shell; ++m) {
    double term = mult(m) * std::exp(-2.0 * value(m) / scale);
    double y = term - comp;
    double t = total + y;
    comp = (t - total) - y;
    total = t;
    prev = last;
    last = term;
    if (options.stop_early && m > 0 && term < 1e-14 * total && term <= prev) break;
  }
  out.shells_used = std::min(m, options.max_shell);
  // Geometric tail estimate from the last ratio of consecutive terms.
  double q = prev > 0 ? last / prev : 0.0;
  out.tail_bound = q < 1 ? last * q / (1 - q) : std::numeric_limits<double>::infinity();
  out.tail_bound *= factor;
  out.value = total * factor;
  out.tail_warning = out.tail_bound > 1e-12 * out.value;
  return out;
}

namespace {

template <class F>
void for_each_rep(const LatticeSpec& spec, const NoiseModel& noise, int max_shell, int reps, std::uint64_t seed,
                  F&& body) {
  SiteList sites = enumerate_sites(spec, max_shell);
  NoiseSampler sampler(noise, sites);
  std::vector<double> g;
  for (int r = 0; r < reps; ++r) {
    sampler.sample_into(derive_seed(seed, static_cast<std::uint64_t>(r)), g);
    body(r, sites, g);
  }
}

}  // namespace

VarianceEstimate mc_variance(const LatticeSpec& spec, const NoiseModel& noise, const TestFunction& f, double scale,
                             int max_shell, int reps, std::uint64_t seed) {
  if (reps < 2) throw_invalid("mc_variance needs reps >= 2");
  if (!(scale > 0)) throw_invalid("scale must be > 0");
  std::vector<double> stat(reps);
  for_each_rep(spec, noise, max_shell, reps, seed, [&](int r, const SiteList& sites, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) s += f.scaled(sites[i].value + g[i], scale);
    stat[r] = s;
  });
  const double n = reps;
  double mean = std::accumulate(stat.begin(), stat.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : stat) {
    double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  VarianceEstimate out;
  out.reps = reps;
  out.value = m2 / (n - 1);
  double mu4 = m4 / n, var = m2 / n;
  double v_of_s2 = (mu4 - var * var * (n - 3) / (n - 1)) / n;
  out.stderr_value = std::sqrt(std::max(v_of_s2, 0.0));
  return out;
}

VarianceEstimate covariance_statistic(const LatticeSpec& spec, const NoiseModel& noise, const TestFunction& f,
                                      double scale_a, double scale_b, int max_shell, int reps, std::uint64_t seed) {
  if (reps < 2) throw_invalid("covariance_statistic needs reps >= 2");
  if (!(scale_a > 0 && scale_b > 0)) throw_invalid("scales must be > 0");
  std::vector<double> a(reps), b(reps);
  for_each_rep(spec, noise, max_shell, reps, seed, [&](int r, const SiteList& sites, const std::vector<double>& g) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      double x = sites[i].value + g[i];
      sa += f.scaled(x, scale_a);
      sb += f.scaled(x, scale_b);
    }
    a[r] = sa;
    b[r] = sb;
  });
  const double n = reps;
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  std::vector<double> prod(reps);
  for (int r = 0; r < reps; ++r) prod[r] = (a[r] - ma) * (b[r] - mb);
  double sum = std::accumulate(prod.begin(), prod.end(), 0.0);
  VarianceEstimate out;
  out.reps = reps;
  out.value = sum / (n - 1);
  double mp = sum / n, ss = 0.0;
  for (double p : prod) ss += (p - mp) * (p - mp);
  out.stderr_value = std::sqrt(ss / (n - 1) / n);
  return out;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw_invalid("least squares needs at least two paired values");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw_invalid("least squares abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      sse += r * r;
    }
    f.slope_se = std::sqrt(sse / (n - 2) / sxx);
  }
  return f;
}

ScalingFit variance_scaling_fit(const VarianceCurve& curve, int resamples, std::uint64_t seed) {
  std::vector<double> lx, ly;
  double nmin = std::numeric_limits<double>::infinity(), nmax = 0;
  for (const auto& p : curve.points) {
    double v = p.analytic ? *p.analytic : (p.mc_mean ? *p.mc_mean : 0.0);
    if (!(v > 0)) throw InvalidArgument("degenerate fit: a variance is <= 0");
    if (!(p.n > 0)) throw InvalidArgument("degenerate fit: scale index must be > 0");
    lx.push_back(std::log(p.n));
    ly.push_back(std::log(v));
    nmin = std::min(nmin, p.n);
    nmax = std::max(nmax, p.n);
  }
  if (lx.size() < 5) throw InvalidArgument("scaling fit needs at least 5 scales");
  if (nmax < 10 * nmin * (1 - 1e-12)) throw InvalidArgument("scaling fit needs scales spanning a decade");
  LineFit base = least_squares(lx, ly);
  ScalingFit out;
  out.slope = base.slope;
  out.intercept = base.intercept;
  std::vector<double> slopes;
  const std::size_t n = lx.size();
  std::vector<double> bx(n), by(n);
  for (int b = 0; b < resamples; ++b) {
    std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = random_bits(s, Stream::Bootstrap, i) % n;
      bx[i] = lx[j];
      by[i] = ly[j];
    }
    if (*std::max_element(bx.begin(), bx.end()) == *std::min_element(bx.begin(), bx.end())) continue;
    slopes.push_back(least_squares(bx, by).slope);
  }
  out.resamples = static_cast<int>(slopes.size());
  if (slopes.empty()) {
    out.ci_low = out.ci_high = out.slope;
    return out;
  }
  std::sort(slopes.begin(), slopes.end());
  auto pick = [&](double q) {
    double pos = q * (slopes.size() - 1);
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    std::size_t j = std::min(i + 1, slopes.size() - 1);
    return slopes[i] + (pos - i) * (slopes[j] - slopes[i]);
  };
  out.ci_low = pick(0.025);
  out.ci_high = pick(0.975);
  return out;
}

}  // namespace rigidity
