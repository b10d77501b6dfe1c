#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "rigidity/config.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/harness.hpp"
#include "rigidity/io.hpp"
#include "rigidity/lattice.hpp"

namespace {

using namespace rigidity;
using nlohmann::json;

// --spec accepts inline JSON or a path to a JSON file.
LatticeSpec spec_argument(const std::string& arg) {
  std::string text = arg;
  auto first = arg.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || arg[first] != '{') text = io::read_file(arg);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("spec") && j.at("spec").is_object()) j = j.at("spec");
  return parse_spec(j, "");
}

int report(const std::exception& e, const std::string& dir) {
  json rec = error_record(e);
  std::cerr << rec.dump() << "\n";
  if (!dir.empty()) {
    try {
      io::write_file((std::filesystem::path(dir) / "error.json").string(), io::dump_json(rec));
    } catch (const std::exception&) {
    }
  }
  return exit_code_of(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and analysis of projected perturbed lattices"};
  app.set_version_flag("--version", rigidity::tool_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, spec_arg, points_path;
  std::uint64_t seed = 0;
  int trials = 0, jobs = 0, max_shell = 0;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write its result directory");
  run_cmd->add_option("--config", config_path, "Config or manifest JSON")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  auto* trials_opt = run_cmd->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Check a config against the schema");
  validate_cmd->add_option("--config", config_path, "Config JSON")->required();

  auto* shells_cmd = app.add_subcommand("shells", "Print the shell table as CSV");
  shells_cmd->add_option("--spec", spec_arg, "Lattice spec (inline JSON or path)")->required();
  shells_cmd->add_option("--max-shell", max_shell, "Largest shell index")->required()->check(CLI::NonNegativeNumber);

  auto* detect_cmd = app.add_subcommand("detect", "Run the detector on points read from a CSV file");
  detect_cmd->add_option("--config", config_path, "Config with spec, window and detector sections")->required();
  detect_cmd->add_option("--points", points_path, "CSV with one observed point per line")->required();

  CLI11_PARSE(app, argc, argv);

  std::string dir;
  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      RunOptions opts;
      opts.out_dir = out_dir;
      opts.jobs = jobs;
      if (*seed_opt) opts.seed = seed;
      if (*trials_opt) opts.trials = trials;
      ExperimentConfig resolved = cfg;
      if (opts.seed) resolved.seed = *opts.seed;
      dir = resolve_output_dir(resolved, opts);
      RunResult res = run(cfg, opts);
      std::cout << json{{"directory", res.directory}, {"summary", res.summary}}.dump(2) << "\n";
    } else if (*validate_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      std::cout << io::dump_json(to_json(cfg));
    } else if (*shells_cmd) {
      LatticeSpec spec = spec_argument(spec_arg);
      ShellTable t = enumerate_shells(spec, max_shell);
      io::CsvWriter csv({"n", "r_n", "multiplicity", "gap"});
      for (std::size_t n = 0; n < t.size(); ++n) {
        csv.cell(static_cast<std::int64_t>(n)).cell(t.values[n]).cell(t.multiplicities[n]);
        if (n == 0) csv.empty();
        else csv.cell(t.values[n] - t.values[n - 1]);
        csv.end_row();
      }
      std::cout << csv.str();
    } else if (*detect_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      std::cout << detect_points(cfg, io::read_points_csv(points_path)).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    return report(e, dir);
  }
  return 0;
}
