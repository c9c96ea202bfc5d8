#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vcsim/config.hpp"
#include "vcsim/metrics.hpp"
#include "vcsim/simcore.hpp"

namespace vcsim {

// Materializes the mobility layer described by the config. Synthetic traces
// follow the run seed unless trace.seed pins them.
std::vector<mobility::Route> build_traces(const ScenarioConfig& cfg);
std::vector<Vec2> build_rsus(const ScenarioConfig& cfg,
                             const std::vector<mobility::Route>& routes);

StrategyFactory make_strategy_factory(const ScenarioConfig& cfg);

struct RunArtifacts {
  std::string event_log_path;  // per-packet CSV, empty = skip
  std::string qtable_out_dir;  // per-device agent tables, empty = skip
  std::string qtable_in_dir;   // warm-start tables, empty = cold start
};

struct RunResult {
  MetricsReport report;
  std::unique_ptr<World> world;  // finished world, handy for inspection
};

RunResult run_scenario(const ScenarioConfig& cfg,
                       const RunArtifacts& artifacts = {});

// Results table. The seed column is a label so aggregate rows can carry
// "median" or "mean" instead of a number.
std::string results_csv_header();
std::string results_csv_row(const ScenarioConfig& cfg,
                            const std::string& seed_label,
                            const MetricsReport& report);
// Appends rows, emitting the header only when the file is new or empty.
void append_results_csv(const std::string& path,
                        const std::vector<std::string>& rows);

struct GridFpEntry {
  FpConfig fp;
  MetricsReport report;
};

struct GridFpResult {
  std::vector<GridFpEntry> entries;  // sorted by (r_drop, r_server) ascending
  long skipped = 0;                  // combinations with p_keep+p_rsu+p_sensor > 1
};

// Evaluates every (p_keep, p_rsu, p_sensor) combination from `values` with
// p_server making up the difference to 1.
GridFpResult grid_search_fp(const ScenarioConfig& base,
                            const std::vector<double>& values);

std::string grid_csv_header();
std::string grid_csv_row(const GridFpEntry& entry);

struct SweepSpec {
  std::string axis;  // lambda_d | delta | packet_size | tx_range
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
};

struct SweepCell {
  double value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct SweepAggregate {
  double value = 0.0;
  MetricsReport median;  // element-wise across seeds, histogram left empty
  MetricsReport mean;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepAggregate> aggregates;
};

void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value);

SweepResult sweep(const ScenarioConfig& base, const SweepSpec& spec);

}  // namespace vcsim
