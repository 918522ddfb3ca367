// qoesim: run, sweep and validate streaming scenarios; emit plot-ready CSV.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qoestream/config.hpp"
#include "qoestream/experiment.hpp"
#include "qoestream/oracle.hpp"
#include "qoestream/report.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::optional<double> gamma;
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--gamma", o.gamma, "Channel scaling parameter");
  cmd->add_option("--policy", o.policy, "queue-case1 | queue-case2 | avg-quality");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
}

json load_or_empty(const std::string& path) {
  return path.empty() ? json::object() : qoe::read_json_file(path);
}

std::filesystem::path dir_of(const std::string& path) {
  return path.empty() ? std::filesystem::path{} : std::filesystem::path(path).parent_path();
}

void print_progress(const qoe::RunOutcome& o) {
  if (o.digest) {
    std::fprintf(stderr, "%-14s satisfied=%.4f admitted=%.4f (%.1fs)\n", o.run_id.c_str(),
                 o.digest->summary.satisfied_frac, o.digest->summary.admitted_frac, o.seconds);
  } else {
    std::fprintf(stderr, "%-14s FAILED: %s\n", o.run_id.c_str(), o.error.c_str());
  }
}

int finish(const qoe::ExperimentSpec& spec, const std::vector<qoe::SweepPoint>& points,
           const std::vector<qoe::RunOutcome>& outcomes) {
  for (const auto& f : qoe::emit_report(spec, points, outcomes)) std::cout << f.string() << '\n';
  std::size_t failed = 0;
  for (const auto& o : outcomes) failed += o.digest ? 0 : 1;
  if (failed) std::fprintf(stderr, "%zu run(s) failed; see manifest.json\n", failed);
  return 0;
}

int cmd_run(const std::string& config_path, const Overrides& o, std::size_t workers) {
  json doc = load_or_empty(config_path);
  if (o.gamma) doc["gamma"] = *o.gamma;
  if (o.policy) doc["policy"] = *o.policy;
  qoe::ExperimentSpec spec;
  spec.scenario = "custom";
  spec.base_dir = dir_of(config_path);
  spec.seeds = {o.seed ? *o.seed : qoe::apply_scenario_json(doc, {}, spec.base_dir).seed};
  spec.out_dir = o.out ? *o.out : "results/run";
  spec.workers = workers;
  spec.overrides = doc;
  const auto points = qoe::expand(spec);
  const auto outcomes = qoe::execute(points, spec.seeds, spec.workers, print_progress);
  return finish(spec, points, outcomes);
}

int cmd_sweep(const std::string& spec_path, const std::string& experiment,
              const std::string& config_path, const std::vector<std::uint64_t>& seeds,
              std::size_t workers, bool workers_set, const Overrides& o) {
  json doc = load_or_empty(spec_path);
  qoe::ExperimentSpec spec = qoe::parse_experiment(doc, dir_of(spec_path));
  if (!experiment.empty()) spec.scenario = experiment;
  if (!config_path.empty()) {
    spec.overrides = qoe::read_json_file(config_path);
    spec.base_dir = dir_of(config_path);
  }
  if (o.gamma) spec.gammas = {*o.gamma};
  if (o.policy) spec.overrides["policy"] = *o.policy;
  if (!seeds.empty()) spec.seeds = seeds;
  if (o.seed) spec.seeds = {*o.seed};
  if (o.out) spec.out_dir = *o.out;
  if (workers_set) spec.workers = workers;
  const auto points = qoe::expand(spec);
  std::fprintf(stderr, "%s: %zu point(s) x %zu seed(s)\n", spec.scenario.c_str(), points.size(),
               spec.seeds.size());
  const auto outcomes = qoe::execute(points, spec.seeds, spec.workers, print_progress);
  return finish(spec, points, outcomes);
}

int cmd_validate(const std::string& path) {
  const json doc = qoe::read_json_file(path);
  if (doc.is_object() && doc.contains("experiment")) {
    qoe::ExperimentSpec spec = qoe::parse_experiment(doc, dir_of(path));
    const auto points = qoe::expand(spec);
    std::cout << "ok: experiment " << spec.scenario << ", " << points.size() << " point(s), "
              << spec.seeds.size() << " seed(s)\n";
  } else {
    const qoe::ScenarioConfig c = qoe::apply_scenario_json(doc, {}, dir_of(path));
    c.validate();
    std::cout << "ok: scenario, gamma " << c.gamma << ", policy " << qoe::to_string(c.policy)
              << ", admission " << qoe::to_string(c.admission) << '\n';
  }
  return 0;
}

int cmd_oracle(int instances, std::uint64_t seed, int levels, double tolerance) {
  const qoe::OracleReport r = qoe::run_oracle_suite(instances, seed, levels, tolerance);
  std::printf("instances=%d failures=%d worst_excess=%.3g best_improvement=%.3g seconds=%.2f\n",
              r.instances, r.failures, r.max_relative_gap, -r.min_relative_gap, r.seconds);
  return r.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoE-constrained video rate adaptation and admission control simulator"};
  app.require_subcommand(1);
  std::size_t workers = 1;

  Overrides run_o;
  std::string run_config;
  auto* run = app.add_subcommand("run", "Run one scenario and write its report");
  run->add_option("file", run_config, "Scenario JSON file")->check(CLI::ExistingFile);
  run->add_option("-c,--config", run_config, "Scenario JSON file")->check(CLI::ExistingFile);
  add_overrides(run, run_o);

  Overrides sweep_o;
  std::string sweep_spec, sweep_name, sweep_config;
  std::vector<std::uint64_t> sweep_seeds;
  auto* sweep = app.add_subcommand("sweep", "Run a named experiment over seeds");
  sweep->add_option("spec", sweep_spec, "Experiment JSON file")->check(CLI::ExistingFile);
  sweep->add_option("-e,--experiment", sweep_name,
                    "fig5 | fig4-sweep | fig6a | fig6b | fig7-grid | fig8-sweep | fig9 | custom");
  sweep->add_option("-c,--config", sweep_config, "Scenario JSON applied to every point")
      ->check(CLI::ExistingFile);
  sweep->add_option("--seeds", sweep_seeds, "Seeds (space separated)");
  auto* workers_opt = sweep->add_option("-j,--workers", workers, "Parallel runs");
  add_overrides(sweep, sweep_o);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario or experiment file");
  validate->add_option("file", validate_path, "JSON file")->required()->check(CLI::ExistingFile);

  int oracle_instances = 100;
  std::uint64_t oracle_seed = 1;
  int oracle_levels = 200;
  double oracle_tol = 1e-4;
  auto* oracle = app.add_subcommand("oracle", "Check the slot solver against brute force");
  oracle->add_option("-n,--instances", oracle_instances, "Random instances")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oracle_seed, "Seed");
  oracle->add_option("--levels", oracle_levels, "Grid levels per user")->check(CLI::Range(2, 2000));
  oracle->add_option("--tolerance", oracle_tol, "Relative objective tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config, run_o, workers);
    if (*sweep) {
      if (sweep_spec.empty() && sweep_name.empty()) {
        std::cerr << "sweep: give an experiment file or --experiment\n";
        return 2;
      }
      return cmd_sweep(sweep_spec, sweep_name, sweep_config, sweep_seeds, workers,
                       workers_opt->count() > 0, sweep_o);
    }
    if (*validate) return cmd_validate(validate_path);
    if (*oracle) return cmd_oracle(oracle_instances, oracle_seed, oracle_levels, oracle_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
