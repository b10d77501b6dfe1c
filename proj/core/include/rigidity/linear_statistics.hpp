#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rigidity/lattice.hpp"
#include "rigidity/noise.hpp"

namespace rigidity {

struct TestFunction {
  enum class Kind { Exponential, Custom };
  Kind kind = Kind::Exponential;
  std::vector<double> xs, ys;  // Custom: increasing abscissae, linear interpolation, flat beyond the ends

  static TestFunction exponential();
  static TestFunction tabulated(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  double scaled(double x, double scale) const { return (*this)(x / scale); }
};

struct AnalyticVariance {
  double value = 0.0;
  double tail_bound = 0.0;  // estimated contribution of the shells left out
  int shells_used = 0;
  bool tail_warning = false;
};

struct AnalyticOptions {
  int max_shell = 1'000'000;
  bool stop_early = true;  // stop once a shell contributes < 1e-14 of the running total
};

// sum_m mult(m) e^{-2 r_m / n} e^{s}(e^{s} - 1), s = sigma2 / n^2, for i.i.d.
// Gaussian noise and f(x) = e^{-x}. L1/Linf lattices and the half-line.
AnalyticVariance analytic_variance_exponential(const LatticeSpec& spec, double sigma2, double scale,
                                               const AnalyticOptions& options = {});

struct VarianceEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  int reps = 0;
};

// Unbiased sample variance of sum_{z in window} f((V(z) + g_z) / scale) over reps
// independent noise draws. The window is enumerate_sites(spec, max_shell).
VarianceEstimate mc_variance(const LatticeSpec& spec, const NoiseModel& noise, const TestFunction& f, double scale,
                             int max_shell, int reps, std::uint64_t seed);

// Sample covariance of the statistics at two scales on shared draws.
VarianceEstimate covariance_statistic(const LatticeSpec& spec, const NoiseModel& noise, const TestFunction& f,
                                      double scale_a, double scale_b, int max_shell, int reps, std::uint64_t seed);

struct VariancePoint {
  double n = 0.0;
  double scale = 0.0;
  std::optional<double> analytic;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
  int reps = 0;
  std::uint64_t seed = 0;
};

struct VarianceCurve {
  std::vector<VariancePoint> points;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int resamples = 0;
};

// Least-squares slope of log Var against log n (analytic values when present,
// otherwise Monte Carlo) with a percentile bootstrap interval.
ScalingFit variance_scaling_fit(const VarianceCurve& curve, int resamples = 200, std::uint64_t seed = 0);

// Plain least squares y = a + b x; returns {b, a, standard error of b}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rigidity
