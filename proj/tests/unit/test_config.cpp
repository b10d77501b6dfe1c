#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "rigidity/config.hpp"
#include "rigidity/errors.hpp"

using namespace rigidity;
using nlohmann::json;

namespace {

json detector_doc() {
  return json::parse(R"({
    "experiment": "detector-trial", "seed": 7, "trials": 3,
    "spec": {"dimension": 2, "norm": "linf", "alpha": 1.5},
    "noise": {"kind": "kernel", "kernel": "squared_exponential", "sigma2": 2, "length_scale": 3},
    "deletion": {"random": {"count": 2, "max_shell": 10}},
    "window": {"max_shell": 20, "cut": 12.5, "cut_low": -30},
    "detector": {"k_max": 3, "tau": 0.25, "edge_margin": 1, "burn_in": 4}
  })");
}

std::string schema_message(const json& j) {
  try {
    parse_config(j);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parse fills every field") {
    auto c = parse_config(detector_doc());
    CHECK(c.experiment == Experiment::DetectorTrial);
    CHECK(c.seed == 7);
    CHECK(c.trials == 3);
    CHECK(c.spec.dimension == 2);
    CHECK(c.spec.norm.kind == Norm::Kind::Linf);
    CHECK(c.noise.sigma2 == 2.0);
    CHECK(c.deletion.kind == DeletionSpec::Kind::Random);
    CHECK(c.window.cut == WindowSpec::Cut::Value);
    CHECK(c.window.cut_value == 12.5);
    CHECK(c.window.cut_value_low == -30);
    CHECK(c.detector.tau == 0.25);
    CHECK(c.detector.max_shell == 20);
    CHECK(c.detector.burn_in == 4);
  }

  TEST_CASE("normalized form round trips") {
    for (const char* path : {"unit_shift_alpha_0.4.json", "detector_kernel.json", "half_line_shared.json",
                             "two_sided_origin.json", "tau_sweep.json", "variance_mc.json", "assumption_linf.json",
                             "ellp_d4.json"}) {
      CAPTURE(path);
      auto c = load_config(std::string(RIGIDITY_RECIPES) + "/" + path);
      json once = to_json(c);
      json twice = to_json(parse_config(once));
      CHECK(once == twice);
    }
    json once = to_json(parse_config(detector_doc()));
    CHECK(once == to_json(parse_config(once)));
  }

  TEST_CASE("unknown keys are reported with their location") {
    json j = detector_doc();
    j["detector"]["tua"] = 1;
    CHECK(schema_message(j).find("/detector/tua") != std::string::npos);
    j = detector_doc();
    j["extra"] = true;
    CHECK(schema_message(j).find("/extra") != std::string::npos);
  }

  TEST_CASE("type and value errors") {
    json j = detector_doc();
    j["seed"] = "seven";
    CHECK(schema_message(j).find("/seed") != std::string::npos);
    j = detector_doc();
    j["window"]["cut"] = "sometimes";
    CHECK(schema_message(j).find("/window/cut") != std::string::npos);
    j = detector_doc();
    j["noise"]["kind"] = "pink";
    CHECK_FALSE(schema_message(j).empty());
    j = detector_doc();
    j.erase("window");
    CHECK(schema_message(j).find("/window") != std::string::npos);
    j = detector_doc();
    j["experiment"] = "nothing";
    CHECK_THROWS_AS(parse_config(j), SchemaError);
    j = detector_doc();
    j["trials"] = 0;
    CHECK_THROWS_AS(parse_config(j), Error);
  }

  TEST_CASE("manifest documents load their config snapshot") {
    auto dir = oracle::temp_dir("config_manifest");
    json cfg = to_json(parse_config(detector_doc()));
    json manifest = {{"tool", "rigidity-lab"}, {"config", cfg}};
    std::ofstream(dir + "/manifest.json") << manifest.dump();
    auto c = load_config(dir + "/manifest.json");
    CHECK(to_json(c) == cfg);
    CHECK_THROWS_AS(load_config(dir + "/missing.json"), IoError);
  }

  TEST_CASE("experiment names") {
    for (auto e : {Experiment::DetectorTrial, Experiment::ThresholdSweep, Experiment::VarianceCurve,
                   Experiment::SheppReport, Experiment::AssumptionCheck, Experiment::EllpReport}) {
      CHECK(experiment_from_string(to_string(e)) == e);
    }
  }
}
