// Command line front end: single runs, fixed-probability grid search and
// parameter sweeps over the offloading simulator.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcsim/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::int64_t seed = -1;
  std::int64_t warmup = -1;
  std::string strategy;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario config JSON")
      ->required();
  cmd->add_option("--out", args.out_path, "Append results CSV here");
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--warmup-slots", args.warmup,
                  "Exclude packets generated before this slot");
  cmd->add_option("--strategy", args.strategy,
                  "Override the config strategy (fuzzyq|greedy|fp)");
}

vcsim::ScenarioConfig load_with_overrides(const CommonArgs& args) {
  vcsim::ScenarioConfig cfg = vcsim::load_config_file(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.warmup >= 0) cfg.warmup_slots = args.warmup;
  if (!args.strategy.empty()) cfg.strategy = args.strategy;
  vcsim::validate(cfg);
  return cfg;
}

int cmd_run(const CommonArgs& args, const vcsim::RunArtifacts& artifacts,
            const std::string& report_json_path) {
  vcsim::ScenarioConfig cfg = load_with_overrides(args);
  vcsim::RunResult result = vcsim::run_scenario(cfg, artifacts);
  if (!args.out_path.empty())
    vcsim::append_results_csv(
        args.out_path,
        {vcsim::results_csv_row(cfg, std::to_string(cfg.seed), result.report)});
  if (report_json_path.empty()) {
    vcsim::write_report_json(std::cout, result.report);
  } else {
    std::ofstream out(report_json_path);
    if (!out) {
      std::cerr << "cannot write report: " << report_json_path << '\n';
      return 1;
    }
    vcsim::write_report_json(out, result.report);
  }
  return 0;
}

int cmd_grid_fp(const CommonArgs& args, const std::vector<double>& values) {
  vcsim::ScenarioConfig cfg = load_with_overrides(args);
  vcsim::GridFpResult result = vcsim::grid_search_fp(cfg, values);
  if (result.skipped > 0)
    std::cerr << "note: skipped " << result.skipped
              << " infeasible combinations (probabilities above 1)\n";
  std::vector<std::string> rows;
  rows.reserve(result.entries.size());
  for (const auto& entry : result.entries)
    rows.push_back(vcsim::grid_csv_row(entry));
  if (args.out_path.empty()) {
    std::cout << vcsim::grid_csv_header() << '\n';
    for (const auto& row : rows) std::cout << row << '\n';
  } else {
    const bool fresh = !std::filesystem::exists(args.out_path) ||
                       std::filesystem::file_size(args.out_path) == 0;
    std::ofstream out(args.out_path, std::ios::app);
    if (!out) {
      std::cerr << "cannot open results file: " << args.out_path << '\n';
      return 1;
    }
    if (fresh) out << vcsim::grid_csv_header() << '\n';
    for (const auto& row : rows) out << row << '\n';
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis,
              const std::vector<double>& values,
              const std::vector<std::uint64_t>& seeds) {
  vcsim::ScenarioConfig base = load_with_overrides(args);
  vcsim::SweepSpec spec;
  spec.axis = axis;
  spec.values = values;
  spec.seeds = seeds.empty() ? std::vector<std::uint64_t>{1, 2, 3, 4, 5} : seeds;
  vcsim::SweepResult result = vcsim::sweep(base, spec);

  std::vector<std::string> rows;
  for (const auto& cell : result.cells) {
    vcsim::ScenarioConfig cfg = base;
    vcsim::apply_axis(cfg, spec.axis, cell.value);
    cfg.seed = cell.seed;
    rows.push_back(
        vcsim::results_csv_row(cfg, std::to_string(cell.seed), cell.report));
  }
  for (const auto& agg : result.aggregates) {
    vcsim::ScenarioConfig cfg = base;
    vcsim::apply_axis(cfg, spec.axis, agg.value);
    rows.push_back(vcsim::results_csv_row(cfg, "median", agg.median));
    rows.push_back(vcsim::results_csv_row(cfg, "mean", agg.mean));
  }
  if (args.out_path.empty()) {
    std::cout << vcsim::results_csv_header() << '\n';
    for (const auto& row : rows) std::cout << row << '\n';
  } else {
    vcsim::append_results_csv(args.out_path, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular crowdsensing offloading simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  vcsim::RunArtifacts artifacts;
  std::string report_json_path;
  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_args);
  run->add_option("--event-log", artifacts.event_log_path,
                  "Write the per-packet event CSV here");
  run->add_option("--report-json", report_json_path,
                  "Write the JSON report here instead of stdout");
  run->add_option("--qtable-out", artifacts.qtable_out_dir,
                  "Directory for per-device agent tables");
  run->add_option("--qtable-in", artifacts.qtable_in_dir,
                  "Warm-start agent tables from this directory");

  CommonArgs grid_args;
  std::vector<double> grid_values{0.1, 0.3, 0.5};
  CLI::App* grid = app.add_subcommand(
      "grid-fp", "Grid search over fixed offloading probabilities");
  add_common(grid, grid_args);
  grid->add_option("--values", grid_values,
                   "Probability values tried for p_keep, p_rsu and p_sensor")
      ->delimiter(',');

  CommonArgs sweep_args;
  std::string axis;
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> sweep_seeds;
  CLI::App* swp =
      app.add_subcommand("sweep", "Sweep one parameter across seeds");
  add_common(swp, sweep_args);
  swp->add_option("--axis", axis, "lambda_d | delta | packet_size | tx_range")
      ->required();
  swp->add_option("--values", sweep_values, "Axis values")
      ->required()
      ->delimiter(',');
  swp->add_option("--seeds", sweep_seeds, "Seeds (default 1..5)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args, artifacts, report_json_path);
    if (grid->parsed()) return cmd_grid_fp(grid_args, grid_values);
    if (swp->parsed()) return cmd_sweep(sweep_args, axis, sweep_values, sweep_seeds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
