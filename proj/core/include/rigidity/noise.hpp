#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rigidity/lattice.hpp"

namespace rigidity {

enum class KernelType { Exponential, SquaredExponential };

struct NoiseModel {
  enum class Kind { Zero, IID, Shared, Kernel, Explicit };

  Kind kind = Kind::IID;
  double sigma2 = 1.0;
  KernelType kernel = KernelType::Exponential;
  double length_scale = 1.0;
  std::shared_ptr<const Eigen::MatrixXd> covariance;  // Explicit only

  static NoiseModel zero();
  static NoiseModel iid(double sigma2);
  static NoiseModel shared(double sigma2);
  static NoiseModel kernel_model(KernelType type, double sigma2, double length_scale);
  static NoiseModel explicit_covariance(Eigen::MatrixXd cov);

  void validate() const;
  bool correlated() const { return kind == Kind::Kernel || kind == Kind::Explicit; }
  // Largest marginal standard deviation; 0 for the zero model.
  double marginal_sd() const;
  // Covariance between two sites (coordinates in Z^d).
  double kernel_value(std::span<const std::int32_t> a, std::span<const std::int32_t> b) const;
};

std::string to_string(NoiseModel::Kind k);
std::string to_string(KernelType k);

struct NoiseLimits {
  std::int64_t correlated_cap = 20'000;
};

struct NoiseSample {
  std::vector<double> site_values;
  std::uint64_t seed = 0;
  NoiseModel model;
};

// Holds whatever can be reused across seeds for one (model, sites) pair; for
// correlated models that is the Cholesky factor.
class NoiseSampler {
 public:
  NoiseSampler(NoiseModel model, const SiteList& sites, const NoiseLimits& limits = {});

  NoiseSample sample(std::uint64_t seed) const;
  void sample_into(std::uint64_t seed, std::vector<double>& out) const;
  // Several seeds at once; correlated models use one triangular matrix product.
  std::vector<std::vector<double>> sample_many(const std::vector<std::uint64_t>& seeds) const;

  const NoiseModel& model() const { return model_; }
  std::size_t size() const { return n_; }
  double jitter() const { return jitter_; }

 private:
  NoiseModel model_;
  std::size_t n_ = 0;
  std::shared_ptr<Eigen::MatrixXd> factor_;
  double jitter_ = 0.0;
};

NoiseSample sample(const NoiseModel& model, const SiteList& sites, std::uint64_t seed,
                   const NoiseLimits& limits = {});

// rho_n = max{|g_z| : shell(z) <= n} / (r_n - r_{n-1}), n = 1..N. The sample must
// be aligned with enumerate_sites(spec, N) for the table's spec (one-sided).
std::vector<double> check_assumption_i(const NoiseSample& sample, const SiteList& sites,
                                       const ShellTable& table);

struct MaxNoisePoint {
  int max_shell = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  int seeds = 0;
};

// Monte Carlo estimate of E max{|g_z| : shell(z) <= N} for each requested N.
std::vector<MaxNoisePoint> max_noise_curve(const NoiseModel& model, const LatticeSpec& spec,
                                           const std::vector<int>& shells, int seeds,
                                           std::uint64_t base_seed, const ShellLimits& limits = {},
                                           const NoiseLimits& noise_limits = {});

// Square covariance matrix from a CSV file (no header, comma separated).
Eigen::MatrixXd read_covariance_csv(const std::string& path);

}  // namespace rigidity
