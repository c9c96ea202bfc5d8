#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vcsim/fuzzy.hpp"
#include "vcsim/mobility.hpp"
#include "vcsim/qlearning.hpp"
#include "vcsim/simcore.hpp"
#include "vcsim/strategies.hpp"

namespace vcsim {

struct TraceConfig {
  enum class Kind { Synthetic, File };
  Kind kind = Kind::Synthetic;

  // Synthetic generator knobs. duration_slots 0 follows the scenario
  // horizon; seed 0 follows the run seed (set a nonzero seed to pin the
  // trace set across runs).
  long n_devices = 776;
  double area_m2 = 16e6;
  long duration_slots = 0;
  double speed_min_mps = 5.0;
  double speed_max_mps = 15.0;
  double street_spacing_m = 500.0;
  std::uint64_t seed = 0;

  std::string path;  // Kind::File
  double min_span_minutes = 90.0;
};

struct RsuLayoutConfig {
  enum class Kind { Grid, Place, Explicit, File };
  Kind kind = Kind::Grid;

  // Grid: `count` units on a square lattice over the covered area.
  long count = 384;

  // Place: walk the routes dropping units at sampled gaps; the denser
  // interval applies inside the center circle. Center defaults to the
  // middle of the trace bounding box with radius = a quarter of its larger
  // side; override via the explicit fields.
  double center_x_m = -1.0;
  double center_y_m = -1.0;
  double center_radius_m = -1.0;
  double center_gap_min_m = 1000.0;
  double center_gap_max_m = 3000.0;
  double outer_gap_min_m = 4000.0;
  double outer_gap_max_m = 8000.0;
  double merge_radius_m = 100.0;

  std::vector<Vec2> positions;  // Kind::Explicit
  std::string path;             // Kind::File
};

struct ScenarioConfig {
  std::string scenario_id = "base";
  std::string strategy = "fuzzyq";  // fuzzyq | greedy | fp
  std::uint64_t seed = 1;

  long horizon_slots = 1000;
  long warmup_slots = 0;
  double packet_size_mb = 1.0;
  double capacity_mb = 25.0;
  double device_tx_range_m = 40.0;
  double rsu_range_m = 250.0;
  double bw_cellular_mbps = 500.0;
  double bw_wifi_mbps = 1000.0;
  double bw_wired_mbps = 10000.0;
  double slot_seconds = 60.0;
  long lambda_slots = 1;
  long delay_threshold_slots = 10;
  EnergyModel energy;

  AgentConfig agent;  // capacity, threshold and max_time are filled in from
                      // the scenario when the agent is built
  FpConfig fp;
  TraceConfig trace;
  RsuLayoutConfig rsus;
  fuzzy::RuleBase fuzzy_rules = fuzzy::RuleBase::defaults();
};

// Parses a JSON scenario. Missing keys keep their defaults; unknown keys and
// out-of-range values raise std::runtime_error naming every offender.
ScenarioConfig parse_config(const std::string& json_text,
                            const std::string& name = "config");
ScenarioConfig load_config_file(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

void validate(const ScenarioConfig& cfg);

WorldConfig world_config(const ScenarioConfig& cfg);
AgentConfig agent_config(const ScenarioConfig& cfg);

}  // namespace vcsim
