#include "rigidity/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/random.hpp"

namespace rigidity {

NoiseModel NoiseModel::zero() {
  NoiseModel m;
  m.kind = Kind::Zero;
  m.sigma2 = 0.0;
  return m;
}

NoiseModel NoiseModel::iid(double sigma2) {
  NoiseModel m;
  m.kind = Kind::IID;
  m.sigma2 = sigma2;
  m.validate();
  return m;
}

NoiseModel NoiseModel::shared(double sigma2) {
  NoiseModel m;
  m.kind = Kind::Shared;
  m.sigma2 = sigma2;
  m.validate();
  return m;
}

NoiseModel NoiseModel::kernel_model(KernelType type, double sigma2, double length_scale) {
  NoiseModel m;
  m.kind = Kind::Kernel;
  m.kernel = type;
  m.sigma2 = sigma2;
  m.length_scale = length_scale;
  m.validate();
  return m;
}

NoiseModel NoiseModel::explicit_covariance(Eigen::MatrixXd cov) {
  NoiseModel m;
  m.kind = Kind::Explicit;
  m.sigma2 = cov.size() ? cov.diagonal().maxCoeff() : 0.0;
  m.covariance = std::make_shared<const Eigen::MatrixXd>(std::move(cov));
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (kind == Kind::Zero) return;
  if (kind == Kind::Explicit) {
    if (!covariance || covariance->rows() != covariance->cols() || covariance->rows() == 0) {
      throw InvalidCovariance("explicit covariance must be a non-empty square matrix");
    }
    const auto& c = *covariance;
    if (!c.allFinite()) throw InvalidCovariance("explicit covariance has non-finite entries");
    double scale = c.cwiseAbs().maxCoeff();
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidCovariance("explicit covariance is not symmetric");
    }
    if (!(c.diagonal().maxCoeff() > 0)) throw InvalidCovariance("explicit covariance has no positive variance");
    return;
  }
  if (!(sigma2 > 0) || !std::isfinite(sigma2)) throw_invalid("noise variance sigma2 must be > 0");
  if (kind == Kind::Kernel && !(length_scale > 0 && std::isfinite(length_scale))) {
    throw_invalid("kernel length scale must be > 0");
  }
}

double NoiseModel::marginal_sd() const {
  if (kind == Kind::Zero) return 0.0;
  if (kind == Kind::Explicit) return std::sqrt(covariance->diagonal().maxCoeff());
  return std::sqrt(sigma2);
}

double NoiseModel::kernel_value(std::span<const std::int32_t> a, std::span<const std::int32_t> b) const {
  double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = static_cast<double>(a[i]) - b[i];
    d2 += t * t;
  }
  if (kernel == KernelType::Exponential) return sigma2 * std::exp(-std::sqrt(d2) / length_scale);
  return sigma2 * std::exp(-d2 / (length_scale * length_scale));
}

std::string to_string(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::Zero: return "none";
    case NoiseModel::Kind::IID: return "iid";
    case NoiseModel::Kind::Shared: return "shared";
    case NoiseModel::Kind::Kernel: return "kernel";
    case NoiseModel::Kind::Explicit: return "explicit";
  }
  return "?";
}

std::string to_string(KernelType k) {
  return k == KernelType::Exponential ? "exponential" : "squared_exponential";
}

NoiseSampler::NoiseSampler(NoiseModel model, const SiteList& sites, const NoiseLimits& limits)
    : model_(std::move(model)), n_(sites.size()) {
  model_.validate();
  if (!model_.correlated()) return;
  if (static_cast<std::int64_t>(n_) > limits.correlated_cap) {
    std::ostringstream os;
    os << "correlated sampling over " << n_ << " sites exceeds the cap " << limits.correlated_cap;
    throw ResourceError(os.str());
  }
  if (model_.kind == NoiseModel::Kind::Explicit && static_cast<std::size_t>(model_.covariance->rows()) != n_) {
    std::ostringstream os;
    os << "explicit covariance is " << model_.covariance->rows() << "x" << model_.covariance->rows()
       << " but the window has " << n_ << " sites";
    throw InvalidCovariance(os.str());
  }
  const auto n = static_cast<Eigen::Index>(n_);
  factor_ = std::make_shared<Eigen::MatrixXd>(n, n);
  auto& m = *factor_;
  auto fill = [&](double jitter) {
    if (model_.kind == NoiseModel::Kind::Explicit) {
      m = *model_.covariance;
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        auto cj = sites.coordinates(static_cast<std::size_t>(j));
        for (Eigen::Index i = j; i < n; ++i) {
          m(i, j) = model_.kernel_value(sites.coordinates(static_cast<std::size_t>(i)), cj);
        }
      }
    }
    m.diagonal().array() += jitter;
  };
  const double s2 = model_.kind == NoiseModel::Kind::Explicit ? model_.covariance->diagonal().maxCoeff()
                                                              : model_.sigma2;
  for (double rel : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    fill(rel * s2);
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(m);
    if (llt.info() == Eigen::Success) {
      jitter_ = rel * s2;
      m.triangularView<Eigen::StrictlyUpper>().setZero();
      return;
    }
  }
  factor_.reset();
  throw InvalidCovariance("covariance is not positive semidefinite within jitter 1e-8*sigma2");
}

void NoiseSampler::sample_into(std::uint64_t seed, std::vector<double>& out) const {
  out.assign(n_, 0.0);
  switch (model_.kind) {
    case NoiseModel::Kind::Zero: return;
    case NoiseModel::Kind::IID: {
      const double sd = std::sqrt(model_.sigma2);
      for (std::size_t i = 0; i < n_; ++i) out[i] = sd * standard_normal(seed, Stream::SiteNoise, i);
      return;
    }
    case NoiseModel::Kind::Shared: {
      const double g = std::sqrt(model_.sigma2) * standard_normal(seed, Stream::SharedNoise, 0);
      std::fill(out.begin(), out.end(), g);
      return;
    }
    case NoiseModel::Kind::Kernel:
    case NoiseModel::Kind::Explicit: {
      Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
      for (std::size_t i = 0; i < n_; ++i) z[static_cast<Eigen::Index>(i)] = standard_normal(seed, Stream::SiteNoise, i);
      Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(n_));
      y.noalias() = factor_->triangularView<Eigen::Lower>() * z;
      return;
    }
  }
}

NoiseSample NoiseSampler::sample(std::uint64_t seed) const {
  NoiseSample s;
  s.seed = seed;
  s.model = model_;
  sample_into(seed, s.site_values);
  return s;
}

std::vector<std::vector<double>> NoiseSampler::sample_many(const std::vector<std::uint64_t>& seeds) const {
  std::vector<std::vector<double>> out(seeds.size());
  if (!model_.correlated() || seeds.size() < 2) {
    for (std::size_t j = 0; j < seeds.size(); ++j) sample_into(seeds[j], out[j]);
    return out;
  }
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      z(i, static_cast<Eigen::Index>(j)) = standard_normal(seeds[j], Stream::SiteNoise, static_cast<std::uint64_t>(i));
    }
  }
  Eigen::MatrixXd y = factor_->triangularView<Eigen::Lower>() * z;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    out[j].resize(n_);
    Eigen::Map<Eigen::VectorXd>(out[j].data(), n) = y.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

NoiseSample sample(const NoiseModel& model, const SiteList& sites, std::uint64_t seed,
                   const NoiseLimits& limits) {
  return NoiseSampler(model, sites, limits).sample(seed);
}

std::vector<double> check_assumption_i(const NoiseSample& s, const SiteList& sites, const ShellTable& table) {
  if (s.site_values.size() != sites.size()) throw_invalid("noise sample is not aligned with the site list");
  const int N = table.max_shell();
  std::vector<double> shell_max(N + 1, 0.0);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& e = sites[i];
    if (e.side < 0 || e.shell > N) continue;
    shell_max[e.shell] = std::max(shell_max[e.shell], std::abs(s.site_values[i]));
  }
  std::vector<double> rho(N > 0 ? N : 0);
  double run = shell_max.empty() ? 0.0 : shell_max[0];
  for (int n = 1; n <= N; ++n) {
    run = std::max(run, shell_max[n]);
    rho[n - 1] = run / (table.values[n] - table.values[n - 1]);
  }
  return rho;
}

std::vector<MaxNoisePoint> max_noise_curve(const NoiseModel& model, const LatticeSpec& spec,
                                           const std::vector<int>& shells, int seeds,
                                           std::uint64_t base_seed, const ShellLimits& limits,
                                           const NoiseLimits& noise_limits) {
  if (shells.empty()) return {};
  if (seeds < 1) throw_invalid("max_noise_curve needs at least one seed");
  const int top = *std::max_element(shells.begin(), shells.end());
  if (*std::min_element(shells.begin(), shells.end()) < 0) throw_invalid("shell indices must be >= 0");
  SiteList sites = enumerate_sites(spec, top, limits);
  NoiseSampler sampler(model, sites, noise_limits);
  std::vector<double> sum(top + 1, 0.0), sumsq(top + 1, 0.0);
  std::vector<double> g;
  for (int r = 0; r < seeds; ++r) {
    sampler.sample_into(derive_seed(base_seed, static_cast<std::uint64_t>(r)), g);
    std::vector<double> shell_max(top + 1, 0.0);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (sites[i].side < 0) continue;
      shell_max[sites[i].shell] = std::max(shell_max[sites[i].shell], std::abs(g[i]));
    }
    double run = 0;
    for (int n = 0; n <= top; ++n) {
      run = std::max(run, shell_max[n]);
      sum[n] += run;
      sumsq[n] += run * run;
    }
  }
  std::vector<MaxNoisePoint> out;
  for (int n : shells) {
    MaxNoisePoint p;
    p.max_shell = n;
    p.seeds = seeds;
    p.mean = sum[n] / seeds;
    if (seeds > 1) {
      double var = (sumsq[n] - seeds * p.mean * p.mean) / (seeds - 1);
      p.stderr_mean = std::sqrt(std::max(0.0, var) / seeds);
    }
    out.push_back(p);
  }
  return out;
}

Eigen::MatrixXd read_covariance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open covariance file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidCovariance("non-numeric covariance entry '" + cell + "' in " + path);
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) throw InvalidCovariance("covariance file is not square: " + path);
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace rigidity
