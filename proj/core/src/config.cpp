#include "rigidity/config.hpp"

#include <filesystem>
#include <set>

#include "rigidity/errors.hpp"
#include "rigidity/io.hpp"

namespace rigidity {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw SchemaError(path_ + (key.empty() ? "" : "/" + key) + ": " + what);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) fail(key, "required");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double dflt) { return has(key) ? number(key) : dflt; }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t dflt) { return has(key) ? integer(key) : dflt; }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(key, "expected a nonnegative integer");
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& dflt) { return has(key) ? string(key) : dflt; }

  bool boolean(const std::string& key, bool dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::int64_t> integers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  Reader object(const std::string& key) { return Reader(raw(key), path_ + "/" + key); }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Norm parse_norm(Reader& r) {
  std::string n = r.string("norm", "l1");
  if (n == "l1") return Norm::l1();
  if (n == "linf") return Norm::linf();
  if (n == "lp") return Norm::lp(r.number("p"));
  r.fail("norm", "expected one of l1, linf, lp");
}

Domain parse_domain(Reader& r) {
  std::string d = r.string("domain", "lattice");
  if (d == "lattice") return Domain::Lattice;
  if (d == "half_line") return Domain::HalfLine;
  if (d == "two_sided") return Domain::TwoSided;
  r.fail("domain", "expected one of lattice, half_line, two_sided");
}

NoiseModel parse_noise(Reader r, std::string& covariance_csv) {
  std::string kind = r.string("kind");
  NoiseModel m;
  try {
    if (kind == "none") {
      m = NoiseModel::zero();
    } else if (kind == "iid") {
      m = NoiseModel::iid(r.number("sigma2"));
    } else if (kind == "shared") {
      m = NoiseModel::shared(r.number("sigma2"));
    } else if (kind == "kernel") {
      std::string k = r.string("kernel", "exponential");
      KernelType kt;
      if (k == "exponential") kt = KernelType::Exponential;
      else if (k == "squared_exponential") kt = KernelType::SquaredExponential;
      else r.fail("kernel", "expected exponential or squared_exponential");
      m = NoiseModel::kernel_model(kt, r.number("sigma2"), r.number("length_scale"));
    } else if (kind == "explicit") {
      covariance_csv = r.string("covariance_csv");
      m = NoiseModel::explicit_covariance(read_covariance_csv(covariance_csv));
    } else {
      r.fail("kind", "expected one of none, iid, shared, kernel, explicit");
    }
  } catch (const InvalidArgument& e) {
    throw SchemaError(r.path() + ": " + e.what());
  }
  r.finish();
  return m;
}

TestFunction parse_test_function(Reader r) {
  std::string kind = r.string("kind", "exponential");
  TestFunction f;
  if (kind == "exponential") {
    f = TestFunction::exponential();
  } else if (kind == "custom") {
    try {
      f = TestFunction::tabulated(r.numbers("x"), r.numbers("y"));
    } catch (const InvalidArgument& e) {
      throw SchemaError(r.path() + ": " + e.what());
    }
  } else {
    r.fail("kind", "expected exponential or custom");
  }
  r.finish();
  return f;
}

ShiftScenario::Kind parse_scenario(Reader& r) {
  std::string s = r.string("scenario");
  if (s == "unit_shift") return ShiftScenario::Kind::UnitShift;
  if (s == "single_deletion") return ShiftScenario::Kind::SingleDeletion;
  if (s == "paired_deletion") return ShiftScenario::Kind::PairedDeletion;
  if (s == "double_sided") return ShiftScenario::Kind::DoubleSided;
  r.fail("scenario", "expected one of unit_shift, single_deletion, paired_deletion, double_sided");
}

bool needs_process(Experiment e) {
  return e == Experiment::DetectorTrial || e == Experiment::ThresholdSweep || e == Experiment::AssumptionCheck;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::DetectorTrial: return "detector-trial";
    case Experiment::ThresholdSweep: return "threshold-sweep";
    case Experiment::VarianceCurve: return "variance-curve";
    case Experiment::SheppReport: return "shepp-report";
    case Experiment::AssumptionCheck: return "assumption-check";
    case Experiment::EllpReport: return "ellp-report";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::DetectorTrial, Experiment::ThresholdSweep, Experiment::VarianceCurve,
                 Experiment::SheppReport, Experiment::AssumptionCheck, Experiment::EllpReport}) {
    if (to_string(e) == s) return e;
  }
  throw SchemaError("/experiment: unknown experiment '" + s + "'");
}

LatticeSpec parse_spec(const json& j, const std::string& where) {
  Reader r(j, where);
  LatticeSpec s;
  s.dimension = static_cast<int>(r.integer("dimension", 1));
  s.norm = parse_norm(r);
  s.alpha = r.number("alpha");
  s.domain = parse_domain(r);
  s.alpha_negative = r.number("alpha_negative", 2.0);
  r.finish();
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return s;
}

json to_json(const LatticeSpec& s) {
  json j{{"dimension", s.dimension}, {"norm", s.norm.kind == Norm::Kind::L1     ? "l1"
                                              : s.norm.kind == Norm::Kind::Linf ? "linf"
                                                                                : "lp"},
         {"alpha", s.alpha}, {"domain", to_string(s.domain)}};
  if (s.norm.kind == Norm::Kind::Lp) j["p"] = s.norm.p;
  if (s.domain == Domain::TwoSided) j["alpha_negative"] = s.alpha_negative;
  return j;
}

ExperimentConfig parse_config(const json& j) {
  Reader r(j, "");
  ExperimentConfig c;
  c.experiment = experiment_from_string(r.string("experiment"));
  c.seed = r.unsigned_integer("seed");
  c.trials = static_cast<int>(r.integer("trials", 1));
  c.output = r.string("output", "");
  const Experiment e = c.experiment;

  if (r.has("spec")) c.spec = parse_spec(r.raw("spec"));
  else if (e != Experiment::SheppReport) r.fail("spec", "required");

  if (r.has("noise")) c.noise = parse_noise(r.object("noise"), c.covariance_csv);
  else if (needs_process(e) || e == Experiment::VarianceCurve) r.fail("noise", "required");

  if (r.has("deletion")) {
    Reader d = r.object("deletion");
    if (d.has("random")) {
      Reader rr = d.object("random");
      c.deletion = DeletionSpec::random(static_cast<int>(rr.integer("count")), static_cast<int>(rr.integer("max_shell")));
      rr.finish();
    } else {
      c.deletion.kind = DeletionSpec::Kind::Explicit;
      if (d.has("sites")) c.deletion.sites = d.integers("sites");
      if (d.has("coords")) {
        const json& arr = d.raw("coords");
        if (!arr.is_array()) d.fail("coords", "expected an array of coordinate arrays");
        for (const auto& p : arr) {
          if (!p.is_array()) d.fail("coords", "expected an array of coordinate arrays");
          std::vector<std::int32_t> v;
          for (const auto& x : p) {
            if (!x.is_number_integer()) d.fail("coords", "coordinates must be integers");
            v.push_back(x.get<std::int32_t>());
          }
          c.deletion.coords.push_back(std::move(v));
        }
      }
      if (c.deletion.sites.empty() && c.deletion.coords.empty()) c.deletion.kind = DeletionSpec::Kind::None;
    }
    d.finish();
  }

  if (r.has("window")) {
    Reader w = r.object("window");
    c.window.max_shell = static_cast<int>(w.integer("max_shell"));
    if (w.has("cut")) {
      const json& cut = w.raw("cut");
      if (cut.is_string()) {
        std::string s = cut.get<std::string>();
        if (s == "default") c.window.cut = WindowSpec::Cut::Default;
        else if (s == "none") c.window.cut = WindowSpec::Cut::None;
        else w.fail("cut", "expected \"default\", \"none\" or a number");
      } else if (cut.is_number()) {
        c.window.cut = WindowSpec::Cut::Value;
        c.window.cut_value = cut.get<double>();
        c.window.cut_value_low = w.number("cut_low", -c.window.cut_value);
      } else {
        w.fail("cut", "expected \"default\", \"none\" or a number");
      }
    }
    if (c.window.cut != WindowSpec::Cut::Value && w.has("cut_low")) w.fail("cut_low", "only valid with a numeric cut");
    w.finish();
  } else if (needs_process(e)) {
    r.fail("window", "required");
  }

  c.detector.spec = c.spec;
  c.detector.max_shell = c.window.max_shell;
  if (r.has("detector")) {
    Reader d = r.object("detector");
    c.detector.k_max = static_cast<int>(d.integer("k_max", 4));
    c.detector.tau = d.number("tau", 0.5);
    c.detector.edge_margin = static_cast<int>(d.integer("edge_margin", 2));
    c.detector.burn_in = static_cast<int>(d.integer("burn_in", -1));
    c.trace_chains = d.boolean("trace_chains", false);
    d.finish();
  }
  c.window.edge_margin = c.detector.edge_margin;

  if (r.has("sweep")) {
    Reader s = r.object("sweep");
    c.sweep.parameter = s.string("parameter");
    c.sweep.values = s.numbers("values");
    s.finish();
  } else if (e == Experiment::ThresholdSweep) {
    r.fail("sweep", "required");
  }

  if (r.has("variance")) {
    Reader v = r.object("variance");
    c.variance.n = v.numbers("n");
    c.variance.scale_mode = v.string("scale_mode", "shell");
    c.variance.reps = static_cast<int>(v.integer("reps", 0));
    c.variance.mc_max_sites = v.integer("mc_max_sites", 40'000);
    if (v.has("test_function")) c.variance.test_function = parse_test_function(v.object("test_function"));
    c.variance.bootstrap = static_cast<int>(v.integer("bootstrap", 200));
    if (v.has("covariance_m")) c.variance.covariance_m = v.number("covariance_m");
    v.finish();
  } else if (e == Experiment::VarianceCurve) {
    r.fail("variance", "required");
  }

  if (r.has("shepp")) {
    Reader s = r.object("shepp");
    c.shepp.scenario = parse_scenario(s);
    c.shepp.alpha = s.number("alpha", c.spec.alpha);
    if (s.has("S")) c.shepp.S = s.integers("S");
    if (s.has("T")) c.shepp.T = s.integers("T");
    c.shepp.I_max = s.integer("I_max", 1'000'000);
    s.finish();
  } else if (e == Experiment::SheppReport) {
    r.fail("shepp", "required");
  }

  if (r.has("ellp")) {
    Reader s = r.object("ellp");
    c.ellp_max_n = static_cast<int>(s.integer("max_n"));
    s.finish();
  }
  if (r.has("assumption")) {
    Reader s = r.object("assumption");
    if (s.has("shells")) {
      for (auto v : s.integers("shells")) c.assumption_shells.push_back(static_cast<int>(v));
    }
    s.finish();
  }
  r.finish();
  try {
    c.validate();
  } catch (const InvalidArgument& ex) {
    throw SchemaError(ex.what());
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw_invalid("/trials: must be >= 1");
  const Experiment e = experiment;
  if (needs_process(e)) {
    if (window.max_shell < 1) throw_invalid("/window/max_shell: must be >= 1");
  }
  if (e == Experiment::DetectorTrial || e == Experiment::ThresholdSweep) {
    detector.validate();
    if (deletion.kind == DeletionSpec::Kind::Random && deletion.max_shell > window.max_shell) {
      throw_invalid("/deletion/random/max_shell: deletion outside the window");
    }
  }
  if (e == Experiment::ThresholdSweep) {
    static const std::set<std::string> ok{"alpha", "tau", "max_shell", "sigma2", "burn_in"};
    if (!ok.count(sweep.parameter)) throw_invalid("/sweep/parameter: expected alpha, tau, max_shell, sigma2 or burn_in");
    if (sweep.values.empty()) throw_invalid("/sweep/values: must not be empty");
  }
  if (e == Experiment::VarianceCurve) {
    if (variance.scale_mode != "shell" && variance.scale_mode != "direct") {
      throw_invalid("/variance/scale_mode: expected shell or direct");
    }
    if (variance.n.empty()) throw_invalid("/variance/n: must not be empty");
    for (double n : variance.n) {
      if (!(n > 0)) throw_invalid("/variance/n: entries must be > 0");
    }
    if (variance.reps == 1 || variance.reps < 0) throw_invalid("/variance/reps: must be 0 or >= 2");
    if (variance.mc_max_sites < 1) throw_invalid("/variance/mc_max_sites: must be >= 1");
  }
  if (e == Experiment::SheppReport && shepp.I_max < 10) throw_invalid("/shepp/I_max: must be >= 10");
  if (e == Experiment::EllpReport) {
    if (spec.norm.kind != Norm::Kind::Lp || spec.domain != Domain::Lattice) {
      throw_invalid("/spec/norm: ellp-report needs an lp lattice");
    }
    if (ellp_max_n < 10) throw_invalid("/ellp/max_n: must be >= 10");
  }
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("tool")) j = j.at("config");
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  const Experiment e = c.experiment;
  if (e != Experiment::SheppReport || c.shepp.scenario == ShiftScenario::Kind::SingleDeletion ||
      c.shepp.scenario == ShiftScenario::Kind::PairedDeletion) {
    j["spec"] = to_json(c.spec);
  }
  if (needs_process(e) || e == Experiment::VarianceCurve) {
    json n{{"kind", to_string(c.noise.kind)}};
    if (c.noise.kind != NoiseModel::Kind::Zero && c.noise.kind != NoiseModel::Kind::Explicit) n["sigma2"] = c.noise.sigma2;
    if (c.noise.kind == NoiseModel::Kind::Kernel) {
      n["kernel"] = to_string(c.noise.kernel);
      n["length_scale"] = c.noise.length_scale;
    }
    if (c.noise.kind == NoiseModel::Kind::Explicit) n["covariance_csv"] = c.covariance_csv;
    j["noise"] = n;
  }
  if (needs_process(e)) {
    json w{{"max_shell", c.window.max_shell}};
    if (c.window.cut == WindowSpec::Cut::Default) w["cut"] = "default";
    else if (c.window.cut == WindowSpec::Cut::None) w["cut"] = "none";
    else {
      w["cut"] = c.window.cut_value;
      if (c.spec.domain == Domain::TwoSided) w["cut_low"] = c.window.cut_value_low;
    }
    j["window"] = w;
  }
  if (e == Experiment::DetectorTrial || e == Experiment::ThresholdSweep) {
    json d;
    if (c.deletion.kind == DeletionSpec::Kind::Random) {
      d["random"] = {{"count", c.deletion.count}, {"max_shell", c.deletion.max_shell}};
    } else if (c.deletion.kind == DeletionSpec::Kind::Explicit) {
      if (!c.deletion.sites.empty()) d["sites"] = c.deletion.sites;
      if (!c.deletion.coords.empty()) d["coords"] = c.deletion.coords;
    }
    j["deletion"] = d.is_null() ? json::object() : d;
    j["detector"] = {{"k_max", c.detector.k_max},
                     {"tau", c.detector.tau},
                     {"edge_margin", c.detector.edge_margin},
                     {"burn_in", c.detector.burn_in},
                     {"trace_chains", c.trace_chains}};
  }
  if (e == Experiment::ThresholdSweep) j["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  if (e == Experiment::VarianceCurve) {
    json v{{"n", c.variance.n},
           {"scale_mode", c.variance.scale_mode},
           {"reps", c.variance.reps},
           {"mc_max_sites", c.variance.mc_max_sites},
           {"bootstrap", c.variance.bootstrap}};
    if (c.variance.test_function.kind == TestFunction::Kind::Exponential) {
      v["test_function"] = {{"kind", "exponential"}};
    } else {
      v["test_function"] = {{"kind", "custom"}, {"x", c.variance.test_function.xs}, {"y", c.variance.test_function.ys}};
    }
    if (c.variance.covariance_m) v["covariance_m"] = *c.variance.covariance_m;
    j["variance"] = v;
  }
  if (e == Experiment::SheppReport) {
    json s{{"scenario", to_string(c.shepp.scenario)}, {"alpha", c.shepp.alpha}, {"I_max", c.shepp.I_max}};
    if (!c.shepp.S.empty()) s["S"] = c.shepp.S;
    if (!c.shepp.T.empty()) s["T"] = c.shepp.T;
    j["shepp"] = s;
  }
  if (e == Experiment::EllpReport) j["ellp"] = {{"max_n", c.ellp_max_n}};
  if (e == Experiment::AssumptionCheck && !c.assumption_shells.empty()) {
    j["assumption"] = {{"shells", c.assumption_shells}};
  }
  return j;
}

}  // namespace rigidity
