#include "rigidity/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rigidity/errors.hpp"
#include "rigidity/io.hpp"
#include "rigidity/random.hpp"

#ifndef RIGIDITY_VERSION
#define RIGIDITY_VERSION "0.0.0"
#endif

namespace rigidity {

using nlohmann::json;

const char* const kToolName = "rigidity-lab";

std::string tool_version() { return RIGIDITY_VERSION; }

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, int trials) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(std::max(trials, 0)));
  for (std::size_t t = 0; t < s.size(); ++t) s[t] = derive_seed(seed, t);
  return s;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string join_ids(const std::vector<std::int64_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ids[i]);
  }
  return s;
}

json chain_json(const MismatchChain& c) {
  return {{"sites", c.sites},
          {"end", c.end == MismatchChain::End::HitB ? "hit_b" : "exited_window"},
          {"subsequence", c.subsequence}};
}

DetectorConfig detector_config(const ExperimentConfig& c) {
  DetectorConfig d = c.detector;
  d.spec = c.spec;
  d.max_shell = c.window.max_shell;
  return d;
}

}  // namespace

std::vector<TrialOutcome> run_detector_trials(const ExperimentConfig& c, int jobs) {
  const DetectorConfig dc = detector_config(c);
  dc.validate();
  WindowSpec window = c.window;
  window.edge_margin = dc.edge_margin;
  const SiteList sites = enumerate_sites(c.spec, window.max_shell);
  const NoiseSampler sampler(c.noise, sites);
  const Side side = c.spec.domain == Domain::TwoSided ? Side::TwoSided : Side::Positive;
  const DetectorWindow dw(dc, side);
  const auto seeds = trial_seeds(c.seed, c.trials);
  std::vector<TrialOutcome> out(seeds.size());

  auto trial = [&](std::size_t t, const std::vector<double>& g) {
    TrialOutcome& r = out[t];
    r.seed = seeds[t];
    r.deleted = resolve_deletion(c.deletion, sites, r.seed);
    SimulatedProcess proc = simulate_process(c.spec, sites, g, r.deleted, window, c.noise);
    DetectorProfile prof =
        side == Side::TwoSided ? two_sided_profile(dw, proc.observed) : detector_profile(dw, proc.observed);
    r.D = prof.D;
    r.k_hat = prof.k_hat;
    r.points = static_cast<std::int64_t>(proc.observed.points.size());
    r.cut_exits = proc.truth.cut_exits();
    r.window_sites = proc.truth.window_sites();
    if (c.trace_chains && side == Side::Positive) {
      const int top = std::min<int>(static_cast<int>(r.deleted.size()) - 1, dc.k_max);
      for (int k = 0; k <= top; ++k) {
        for (auto& ch : trace_mismatch_chains(dw, proc.observed, prof.witness[k], proc.truth)) {
          r.chains.emplace_back(k, std::move(ch));
        }
      }
    }
  };

  if (c.noise.correlated()) {
    // One triangular product per batch of seeds; trials of a batch then run in parallel.
    const std::size_t batch = 32;
    for (std::size_t start = 0; start < seeds.size(); start += batch) {
      const std::size_t stop = std::min(seeds.size(), start + batch);
      std::vector<std::uint64_t> chunk(seeds.begin() + start, seeds.begin() + stop);
      auto noise = sampler.sample_many(chunk);
      parallel_for(chunk.size(), jobs, [&](std::size_t i) { trial(start + i, noise[i]); });
    }
  } else {
    parallel_for(seeds.size(), jobs, [&](std::size_t t) {
      std::vector<double> g;
      sampler.sample_into(seeds[t], g);
      trial(t, g);
    });
  }
  return out;
}

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

struct Output {
  json summary = json::object();
  json profile = json::object();
  std::string results;
  json seeds = json::array();
  std::optional<double> cut_exit_fraction;
};

double exit_fraction(const std::vector<TrialOutcome>& trials) {
  std::int64_t exits = 0, sites = 0;
  for (const auto& t : trials) {
    exits += t.cut_exits;
    sites += t.window_sites;
  }
  return sites ? static_cast<double>(exits) / static_cast<double>(sites) : 0.0;
}

json k_hat_counts(const std::vector<TrialOutcome>& trials) {
  std::map<std::string, int> counts;
  for (const auto& t : trials) ++counts[t.k_hat ? std::to_string(*t.k_hat) : "none"];
  json j = json::object();
  for (const auto& [k, v] : counts) j[k] = v;
  return j;
}

Output detector_trial(const ExperimentConfig& c, int jobs) {
  auto trials = run_detector_trials(c, jobs);
  const int K = c.detector.k_max;
  std::vector<std::string> header{"trial", "seed", "deleted", "k_hat", "correct", "points", "cut_exits", "window_sites"};
  for (int k = 0; k <= K; ++k) header.push_back("D_" + std::to_string(k));
  io::CsvWriter csv(header);
  Output o;
  json rows = json::array();
  int correct = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& r = trials[t];
    correct += r.correct();
    csv.cell(static_cast<std::int64_t>(t)).cell(r.seed).cell(join_ids(r.deleted));
    if (r.k_hat) csv.cell(*r.k_hat);
    else csv.empty();
    csv.cell(r.correct() ? 1 : 0).cell(r.points).cell(r.cut_exits).cell(r.window_sites);
    for (double d : r.D) csv.cell(d);
    csv.end_row();
    json row{{"trial", t}, {"seed", r.seed}, {"deleted", r.deleted}, {"D", r.D}, {"correct", r.correct()}};
    row["k_hat"] = r.k_hat ? json(*r.k_hat) : json(nullptr);
    if (c.trace_chains) {
      json chains = json::array();
      for (const auto& [k, ch] : r.chains) {
        json cj = chain_json(ch);
        cj["k"] = k;
        chains.push_back(cj);
      }
      row["chains"] = chains;
    }
    rows.push_back(row);
    o.seeds.push_back(r.seed);
  }
  const double acc = trials.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(trials.size());
  o.cut_exit_fraction = exit_fraction(trials);
  o.results = csv.str();
  o.summary = {{"trials", trials.size()},
               {"correct", correct},
               {"accuracy", acc},
               {"k_hat_counts", k_hat_counts(trials)},
               {"cut_exit_fraction", *o.cut_exit_fraction}};
  o.profile = {{"experiment", "detector-trial"}, {"tau", c.detector.tau}, {"summary", o.summary}, {"trials", rows}};
  return o;
}

ExperimentConfig with_parameter(ExperimentConfig c, const std::string& p, double v) {
  auto as_int = [&](double x) {
    if (x != std::floor(x)) throw_invalid("sweep value for " + p + " must be an integer");
    return static_cast<int>(x);
  };
  if (p == "alpha") {
    c.spec.alpha = v;
    c.spec.validate();
  } else if (p == "tau") {
    c.detector.tau = v;
  } else if (p == "max_shell") {
    c.window.max_shell = as_int(v);
  } else if (p == "sigma2") {
    if (c.noise.kind == NoiseModel::Kind::Zero || c.noise.kind == NoiseModel::Kind::Explicit) {
      throw_invalid("sigma2 sweep needs an iid, shared or kernel noise model");
    }
    c.noise.sigma2 = v;
    c.noise.validate();
  } else if (p == "burn_in") {
    c.detector.burn_in = as_int(v);
  } else {
    throw_invalid("unknown sweep parameter " + p);
  }
  c.validate();
  return c;
}

Output threshold_sweep(const ExperimentConfig& c, int jobs) {
  io::CsvWriter csv({"parameter", "value", "trials", "correct", "accuracy", "mean_D_true", "mean_D_below",
                     "no_k_hat", "cut_exit_fraction"});
  Output o;
  json points = json::array();
  std::int64_t exits = 0, sites = 0;
  for (double v : c.sweep.values) {
    ExperimentConfig cv = with_parameter(c, c.sweep.parameter, v);
    auto trials = run_detector_trials(cv, jobs);
    int correct = 0, none = 0, n_true = 0, n_below = 0;
    double sum_true = 0, sum_below = 0;
    for (const auto& r : trials) {
      correct += r.correct();
      none += !r.k_hat;
      const auto s = r.deleted.size();
      if (s < r.D.size()) {
        sum_true += r.D[s];
        ++n_true;
      }
      if (s >= 1 && s - 1 < r.D.size()) {
        sum_below += r.D[s - 1];
        ++n_below;
      }
      exits += r.cut_exits;
      sites += r.window_sites;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(trials.size());
    const double frac = exit_fraction(trials);
    csv.cell(c.sweep.parameter).cell(v).cell(static_cast<std::int64_t>(trials.size())).cell(correct).cell(acc);
    if (n_true) csv.cell(sum_true / n_true);
    else csv.empty();
    if (n_below) csv.cell(sum_below / n_below);
    else csv.empty();
    csv.cell(none).cell(frac);
    csv.end_row();
    points.push_back({{"value", v}, {"accuracy", acc}, {"k_hat_counts", k_hat_counts(trials)}});
  }
  for (auto s : trial_seeds(c.seed, c.trials)) o.seeds.push_back(s);
  o.cut_exit_fraction = sites ? static_cast<double>(exits) / static_cast<double>(sites) : 0.0;
  o.results = csv.str();
  o.summary = {{"parameter", c.sweep.parameter}, {"points", points}, {"cut_exit_fraction", *o.cut_exit_fraction}};
  o.profile = {{"experiment", "threshold-sweep"}, {"summary", o.summary}};
  return o;
}

// Largest N whose window holds at most cap sites.
int largest_window(const LatticeSpec& spec, std::int64_t cap) {
  if (spec.domain == Domain::TwoSided) cap /= 2;
  if (cap < 1) throw_invalid("mc_max_sites is too small");
  if (spec.domain != Domain::Lattice) return static_cast<int>(std::min<std::int64_t>(cap - 1, 1'000'000'000));
  for (int hi = 2;; hi *= 2) {
    ShellTable t = enumerate_shells(spec, hi);
    if (t.cumulative.back() > cap) {
      int n = 0;
      while (n + 1 <= hi && t.cumulative[n + 1] <= cap) ++n;
      return n;
    }
    if (hi > (1 << 24)) return hi;
  }
}

bool analytic_available(const ExperimentConfig& c) {
  return c.noise.kind == NoiseModel::Kind::IID && c.variance.test_function.kind == TestFunction::Kind::Exponential &&
         c.spec.domain != Domain::TwoSided &&
         !(c.spec.domain == Domain::Lattice && c.spec.norm.kind == Norm::Kind::Lp);
}

Output variance_curve(const ExperimentConfig& c, int jobs) {
  const auto& v = c.variance;
  const bool analytic = analytic_available(c);
  if (!analytic && v.reps == 0) {
    throw_invalid("no closed form for this noise model or test function; set variance.reps >= 2");
  }
  const int window = v.reps > 0 ? largest_window(c.spec, v.mc_max_sites) : 0;
  const auto seeds = trial_seeds(c.seed, static_cast<int>(v.n.size()));
  std::vector<VariancePoint> pts(v.n.size());
  std::vector<std::optional<AnalyticVariance>> full(v.n.size()), windowed(v.n.size());
  std::vector<std::optional<VarianceEstimate>> cov(v.n.size());
  auto scale_of = [&](double n) { return v.scale_mode == "shell" ? std::pow(n, c.spec.alpha) : n; };

  parallel_for(v.n.size(), jobs, [&](std::size_t i) {
    VariancePoint& p = pts[i];
    p.n = v.n[i];
    p.scale = scale_of(p.n);
    p.seed = seeds[i];
    if (analytic) {
      full[i] = analytic_variance_exponential(c.spec, c.noise.sigma2, p.scale);
      p.analytic = full[i]->value;
      if (v.reps > 0) {
        windowed[i] = analytic_variance_exponential(c.spec, c.noise.sigma2, p.scale, {window, false});
      }
    }
    if (v.reps > 0) {
      auto est = mc_variance(c.spec, c.noise, v.test_function, p.scale, window, v.reps, p.seed);
      p.mc_mean = est.value;
      p.mc_stderr = est.stderr_value;
      p.reps = est.reps;
      if (v.covariance_m) {
        cov[i] = covariance_statistic(c.spec, c.noise, v.test_function, p.scale, scale_of(*v.covariance_m), window,
                                      v.reps, p.seed);
      }
    }
  });

  io::CsvWriter csv({"n", "scale", "analytic", "analytic_tail", "window_shell", "analytic_window", "mc_mean",
                     "mc_stderr", "z_score", "reps", "seed", "cov_m", "cov_stderr"});
  Output o;
  json rows = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    csv.cell(p.n).cell(p.scale);
    if (full[i]) csv.cell(full[i]->value).cell(full[i]->tail_bound);
    else csv.empty().empty();
    if (v.reps > 0) csv.cell(window);
    else csv.empty();
    if (windowed[i]) csv.cell(windowed[i]->value);
    else csv.empty();
    std::optional<double> z;
    if (p.mc_mean) {
      csv.cell(*p.mc_mean).cell(*p.mc_stderr);
      if (windowed[i] && *p.mc_stderr > 0) z = (*p.mc_mean - windowed[i]->value) / *p.mc_stderr;
    } else {
      csv.empty().empty();
    }
    if (z) csv.cell(*z);
    else csv.empty();
    csv.cell(p.reps).cell(p.seed);
    if (cov[i]) csv.cell(cov[i]->value).cell(cov[i]->stderr_value);
    else csv.empty().empty();
    csv.end_row();
    json row{{"n", p.n}, {"scale", p.scale}, {"seed", p.seed}};
    if (p.analytic) row["analytic"] = *p.analytic;
    if (p.mc_mean) {
      row["mc_mean"] = *p.mc_mean;
      row["mc_stderr"] = *p.mc_stderr;
    }
    if (z) row["z_score"] = *z;
    rows.push_back(row);
    o.seeds.push_back(p.seed);
  }
  json fit = nullptr;
  std::string fit_error;
  try {
    ScalingFit f = variance_scaling_fit({pts}, v.bootstrap, derive_seed(c.seed, 0xB007));
    fit = {{"slope", f.slope}, {"intercept", f.intercept}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high},
           {"resamples", f.resamples}};
  } catch (const InvalidArgument& e) {
    fit_error = e.what();
  }
  o.results = csv.str();
  o.summary = {{"points", pts.size()}, {"fit", fit}, {"analytic", analytic}};
  if (!fit_error.empty()) o.summary["fit_error"] = fit_error;
  if (v.reps > 0) o.summary["window_shell"] = window;
  o.profile = {{"experiment", "variance-curve"}, {"summary", o.summary}, {"points", rows}};
  return o;
}

Output shepp_report(const ExperimentConfig& c) {
  ShiftScenario sc;
  sc.kind = c.shepp.scenario;
  sc.spec = c.spec;
  sc.S = c.shepp.S;
  sc.T = c.shepp.T;
  sc.alpha = c.shepp.alpha;
  SheppReport r = shepp_sum(sc, c.shepp.I_max);
  io::CsvWriter csv({"I", "partial_sum", "last_term", "fitted_exponent"});
  json cps = json::array();
  for (const auto& cp : r.checkpoints) {
    csv.cell(cp.I).cell(cp.partial_sum).cell(cp.last_term);
    // The tail fit covers the last decade, so only the final row carries it.
    if (r.tail && &cp == &r.checkpoints.back()) csv.cell(r.tail->exponent);
    else csv.empty();
    csv.end_row();
    cps.push_back({{"I", cp.I}, {"partial_sum", cp.partial_sum}, {"last_term", cp.last_term}});
  }
  Output o;
  o.results = csv.str();
  json tail = nullptr;
  if (r.tail) tail = {{"exponent", r.tail->exponent}, {"ci_low", r.tail->ci_low}, {"ci_high", r.tail->ci_high}};
  o.summary = {{"verdict", to_string(r.verdict)},
               {"tail", tail},
               {"terms_vanish", r.terms_vanish},
               {"last_nonzero", r.last_nonzero}};
  o.profile = {{"experiment", "shepp-report"}, {"summary", o.summary}, {"checkpoints", cps}};
  return o;
}

Output assumption_check(const ExperimentConfig& c, int jobs) {
  const int N = c.window.max_shell;
  const SiteList sites = enumerate_sites(c.spec, N);
  const ShellTable table = enumerate_shells(c.spec, N);
  const NoiseSampler sampler(c.noise, sites);
  const auto seeds = trial_seeds(c.seed, c.trials);
  std::vector<std::vector<double>> rho(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t t) { rho[t] = check_assumption_i(sampler.sample(seeds[t]), sites, table); });

  std::vector<double> mean(N, 0.0), mx(N, 0.0);
  for (const auto& r : rho) {
    for (int n = 0; n < N; ++n) {
      mean[n] += r[n] / static_cast<double>(rho.size());
      mx[n] = std::max(mx[n], r[n]);
    }
  }
  io::CsvWriter csv({"n", "r_n", "gap", "rho_mean", "rho_max"});
  for (int n = 1; n <= N; ++n) {
    csv.cell(n).cell(table.values[n]).cell(table.values[n] - table.values[n - 1]).cell(mean[n - 1]).cell(mx[n - 1]);
    csv.end_row();
  }
  std::vector<double> lx, ly;
  for (int n = std::max(1, N / 10); n <= N; ++n) {
    if (mean[n - 1] > 0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(mean[n - 1]));
    }
  }
  json slope = nullptr;
  if (lx.size() >= 2 && lx.front() < lx.back()) slope = least_squares(lx, ly).slope;

  std::vector<int> shells = c.assumption_shells;
  if (shells.empty()) {
    for (int s : {N / 8, N / 4, N / 2, N}) {
      if (s >= 1 && (shells.empty() || shells.back() != s)) shells.push_back(s);
    }
  }
  json curve = json::array();
  for (const auto& p : max_noise_curve(c.noise, c.spec, shells, c.trials, derive_seed(c.seed, 0x3A7))) {
    curve.push_back({{"max_shell", p.max_shell}, {"mean", p.mean}, {"stderr", p.stderr_mean}, {"seeds", p.seeds}});
  }
  Output o;
  for (auto s : seeds) o.seeds.push_back(s);
  o.results = csv.str();
  o.summary = {{"max_shell", N}, {"rho_mean_last", N ? mean[N - 1] : 0.0}, {"tail_slope", slope}};
  o.profile = {{"experiment", "assumption-check"}, {"summary", o.summary}, {"max_noise", curve}};
  return o;
}

Output ellp_report(const ExperimentConfig& c) {
  EllpReport r = ellp_condition(c.spec, c.ellp_max_n);
  io::CsvWriter csv({"n", "s_n", "ratio"});
  for (std::size_t i = 0; i < r.ratios.size(); ++i) {
    const std::size_t n = i + 1;
    csv.cell(static_cast<std::int64_t>(n));
    if (n < r.s.size()) csv.cell(r.s[n]);
    else csv.empty();
    csv.cell(r.ratios[i]);
    csv.end_row();
  }
  Output o;
  o.results = csv.str();
  o.summary = {{"max_n", c.ellp_max_n},
               {"tail_slope", r.tail_slope},
               {"trend", to_string(r.trend)},
               {"gap_zero", r.gap_zero}};
  o.profile = {{"experiment", "ellp-report"}, {"summary", o.summary}};
  return o;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& config, const RunOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  if (!config.output.empty()) return config.output;
  const std::string leaf = to_string(config.experiment) + "-" + std::to_string(config.seed);
  if (const char* root = std::getenv("RIGIDITY_LAB_OUT"); root && *root) {
    return (std::filesystem::path(root) / leaf).string();
  }
  return (std::filesystem::path("runs") / leaf).string();
}

RunResult run(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.trials) config.trials = *options.trials;
  config.validate();
  const int jobs =
      options.jobs > 0 ? options.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();

  Output out;
  switch (config.experiment) {
    case Experiment::DetectorTrial: out = detector_trial(config, jobs); break;
    case Experiment::ThresholdSweep: out = threshold_sweep(config, jobs); break;
    case Experiment::VarianceCurve: out = variance_curve(config, jobs); break;
    case Experiment::SheppReport: out = shepp_report(config); break;
    case Experiment::AssumptionCheck: out = assumption_check(config, jobs); break;
    case Experiment::EllpReport: out = ellp_report(config); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunResult res;
  res.directory = resolve_output_dir(config, options);
  res.summary = out.summary;
  const json snapshot = to_json(config);
  res.files = {{"config.json", io::dump_json(snapshot)}, {"results.csv", out.results},
               {"profile.json", io::dump_json(out.profile)}};
  json digests = json::object();
  for (const auto& [name, body] : res.files) digests[name] = io::sha256_hex(body);
  res.manifest = {{"tool", kToolName},
                  {"version", tool_version()},
                  {"experiment", to_string(config.experiment)},
                  {"config", snapshot},
                  {"seeds", out.seeds},
                  {"jobs", jobs},
                  {"started_at", started},
                  {"wall_clock_seconds", wall},
                  {"files", digests}};
  if (out.cut_exit_fraction) res.manifest["cut_exit_fraction"] = *out.cut_exit_fraction;
  res.files.emplace_back("manifest.json", io::dump_json(res.manifest));
  if (options.write_files) {
    for (const auto& [name, body] : res.files) {
      io::write_file((std::filesystem::path(res.directory) / name).string(), body);
    }
  }
  return res;
}

json to_json(const DetectorProfile& profile, const DetectorWindow& window) {
  auto describe = [&](std::int64_t site) {
    const std::size_t cls = window.class_of_slot(window.slot_of_site(site));
    json j = {{"site", site}, {"shell", window.shell_of_class(cls)}};
    if (window.side() == Side::TwoSided) j["side"] = window.side_of_class(cls);
    return j;
  };
  json witness = json::array();
  for (std::size_t k = 0; k < profile.witness.size(); ++k) {
    const MatchResult& m = profile.witness[k];
    json skipped = json::array();
    for (auto s : m.skipped_interior) skipped.push_back(describe(s));
    witness.push_back({{"k", k},
                       {"bottleneck", m.bottleneck},
                       {"matched", m.assignment.size()},
                       {"skipped_interior", skipped},
                       {"skipped_trailing", m.skipped_trailing.size()},
                       {"monotone", m.monotone}});
  }
  json k_hat = nullptr;
  if (profile.k_hat) k_hat = *profile.k_hat;
  return {{"D", profile.D}, {"k_hat", k_hat}, {"tau", profile.tau}, {"witness", witness}};
}

json detect_points(const ExperimentConfig& c, std::vector<double> points) {
  const DetectorConfig dc = detector_config(c);
  dc.validate();
  PointConfiguration obs;
  obs.side = c.spec.domain == Domain::TwoSided ? Side::TwoSided : Side::Positive;
  switch (c.window.cut) {
    case WindowSpec::Cut::Value:
      obs.window_cut = c.window.cut_value;
      if (obs.side == Side::TwoSided) obs.window_cut_low = c.window.cut_value_low;
      break;
    case WindowSpec::Cut::Default: {
      auto [low, high] = default_window_cut(c.spec, c.noise, c.window.max_shell, dc.edge_margin);
      obs.window_cut = high;
      if (obs.side == Side::TwoSided) obs.window_cut_low = low;
      break;
    }
    case WindowSpec::Cut::None:
      break;
  }
  std::sort(points.begin(), points.end());
  const std::size_t given = points.size();
  for (double x : points) {
    if (x <= obs.window_cut && x >= obs.window_cut_low) obs.points.push_back(x);
  }
  obs.validate();
  const DetectorWindow dw(dc, obs.side);
  DetectorProfile prof = obs.side == Side::TwoSided ? two_sided_profile(dw, obs) : detector_profile(dw, obs);
  json j = to_json(prof, dw);
  j["points"] = obs.points.size();
  j["dropped"] = given - obs.points.size();
  j["window_cut"] = std::isfinite(obs.window_cut) ? json(obs.window_cut) : json(nullptr);
  if (obs.side == Side::TwoSided) {
    j["window_cut_low"] = std::isfinite(obs.window_cut_low) ? json(obs.window_cut_low) : json(nullptr);
  }
  return j;
}

int exit_code_of(const std::exception& e) {
  if (auto* err = dynamic_cast<const Error*>(&e)) return err->exit_code();
  return 1;
}

json error_record(const std::exception& e) {
  std::string kind = "internal";
  if (auto* err = dynamic_cast<const Error*>(&e)) kind = err->kind();
  return {{"error", {{"kind", kind}, {"message", e.what()}, {"exit_code", exit_code_of(e)}}}};
}

}  // namespace rigidity
