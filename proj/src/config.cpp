#include "vcsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vcsim {

namespace {

using nlohmann::json;

class ErrorList {
 public:
  explicit ErrorList(std::string name) : name_(std::move(name)) {}

  void add(const std::string& message) { errors_.push_back(message); }

  void raise_if_any() const {
    if (errors_.empty()) return;
    std::string text = name_ + ": invalid configuration:";
    for (const std::string& e : errors_) text += "\n  - " + e;
    throw std::runtime_error(text);
  }

 private:
  std::string name_;
  std::vector<std::string> errors_;
};

void check_keys(const json& j, const std::string& scope,
                std::initializer_list<const char*> allowed, ErrorList& errors) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) errors.add("unknown key '" + scope + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const std::string& scope, const char* key, T& out,
          ErrorList& errors) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception&) {
    errors.add("key '" + scope + key + "' has the wrong type");
  }
}

fuzzy::Level parse_level(const json& j, const std::string& scope,
                         ErrorList& errors) {
  const std::string s = j.is_string() ? j.get<std::string>() : std::string();
  if (s == "low") return fuzzy::Level::Low;
  if (s == "medium") return fuzzy::Level::Medium;
  if (s == "high") return fuzzy::Level::High;
  errors.add("'" + scope + "' must be low, medium or high");
  return fuzzy::Level::Low;
}

fuzzy::TrapezoidalMf parse_trapezoid(const json& j, const std::string& scope,
                                     ErrorList& errors) {
  if (!j.is_array() || j.size() != 4 ||
      !std::all_of(j.begin(), j.end(),
                   [](const json& v) { return v.is_number(); })) {
    errors.add("'" + scope + "' must be an array of 4 numbers");
    return fuzzy::TrapezoidalMf(0, 0, 1, 1);
  }
  try {
    return fuzzy::TrapezoidalMf(j[0].get<double>(), j[1].get<double>(),
                                j[2].get<double>(), j[3].get<double>());
  } catch (const std::invalid_argument& e) {
    errors.add("'" + scope + "': " + e.what());
    return fuzzy::TrapezoidalMf(0, 0, 1, 1);
  }
}

fuzzy::Variable parse_variable(const json& j, const std::string& scope,
                               const fuzzy::Variable& fallback,
                               ErrorList& errors) {
  if (!j.is_array() || j.size() != 3) {
    errors.add("'" + scope + "' must be an array of 3 trapezoids");
    return fallback;
  }
  return fuzzy::Variable{parse_trapezoid(j[0], scope + "[0]", errors),
                         parse_trapezoid(j[1], scope + "[1]", errors),
                         parse_trapezoid(j[2], scope + "[2]", errors)};
}

void parse_fuzzy(const json& j, fuzzy::RuleBase& rb, ErrorList& errors) {
  check_keys(j, "fuzzy.", {"resource", "elapsed", "theta", "rules"}, errors);
  if (j.contains("resource"))
    rb.resource = parse_variable(j["resource"], "fuzzy.resource", rb.resource, errors);
  if (j.contains("elapsed"))
    rb.elapsed = parse_variable(j["elapsed"], "fuzzy.elapsed", rb.elapsed, errors);
  if (j.contains("theta"))
    rb.theta = parse_variable(j["theta"], "fuzzy.theta", rb.theta, errors);
  if (j.contains("rules")) {
    const json& rules = j["rules"];
    if (!rules.is_array() || rules.size() != 9) {
      errors.add("'fuzzy.rules' must be an array of 9 [resource,elapsed,theta] triples");
      return;
    }
    for (std::size_t i = 0; i < 9; ++i) {
      const json& r = rules[i];
      const std::string scope = "fuzzy.rules[" + std::to_string(i) + "]";
      if (!r.is_array() || r.size() != 3) {
        errors.add("'" + scope + "' must be a triple");
        continue;
      }
      rb.rules[i] = fuzzy::Rule{parse_level(r[0], scope + "[0]", errors),
                                parse_level(r[1], scope + "[1]", errors),
                                parse_level(r[2], scope + "[2]", errors)};
    }
  }
}

void parse_trace(const json& j, TraceConfig& t, ErrorList& errors) {
  check_keys(j, "trace.",
             {"kind", "n_devices", "area_m2", "duration_slots", "speed_min_mps",
              "speed_max_mps", "street_spacing_m", "seed", "path",
              "min_span_minutes"},
             errors);
  std::string kind = j.value("kind", std::string("synthetic"));
  if (kind == "synthetic")
    t.kind = TraceConfig::Kind::Synthetic;
  else if (kind == "file")
    t.kind = TraceConfig::Kind::File;
  else
    errors.add("'trace.kind' must be synthetic or file");
  read(j, "trace.", "n_devices", t.n_devices, errors);
  read(j, "trace.", "area_m2", t.area_m2, errors);
  read(j, "trace.", "duration_slots", t.duration_slots, errors);
  read(j, "trace.", "speed_min_mps", t.speed_min_mps, errors);
  read(j, "trace.", "speed_max_mps", t.speed_max_mps, errors);
  read(j, "trace.", "street_spacing_m", t.street_spacing_m, errors);
  read(j, "trace.", "seed", t.seed, errors);
  read(j, "trace.", "path", t.path, errors);
  read(j, "trace.", "min_span_minutes", t.min_span_minutes, errors);
}

void parse_rsus(const json& j, RsuLayoutConfig& r, ErrorList& errors) {
  check_keys(j, "rsus.",
             {"kind", "count", "center_x_m", "center_y_m", "center_radius_m",
              "center_gap_min_m", "center_gap_max_m", "outer_gap_min_m",
              "outer_gap_max_m", "merge_radius_m", "positions", "path"},
             errors);
  std::string kind = j.value("kind", std::string("grid"));
  if (kind == "grid")
    r.kind = RsuLayoutConfig::Kind::Grid;
  else if (kind == "place")
    r.kind = RsuLayoutConfig::Kind::Place;
  else if (kind == "explicit")
    r.kind = RsuLayoutConfig::Kind::Explicit;
  else if (kind == "file")
    r.kind = RsuLayoutConfig::Kind::File;
  else
    errors.add("'rsus.kind' must be grid, place, explicit or file");
  read(j, "rsus.", "count", r.count, errors);
  read(j, "rsus.", "center_x_m", r.center_x_m, errors);
  read(j, "rsus.", "center_y_m", r.center_y_m, errors);
  read(j, "rsus.", "center_radius_m", r.center_radius_m, errors);
  read(j, "rsus.", "center_gap_min_m", r.center_gap_min_m, errors);
  read(j, "rsus.", "center_gap_max_m", r.center_gap_max_m, errors);
  read(j, "rsus.", "outer_gap_min_m", r.outer_gap_min_m, errors);
  read(j, "rsus.", "outer_gap_max_m", r.outer_gap_max_m, errors);
  read(j, "rsus.", "merge_radius_m", r.merge_radius_m, errors);
  read(j, "rsus.", "path", r.path, errors);
  if (j.contains("positions")) {
    const json& pos = j["positions"];
    if (!pos.is_array()) {
      errors.add("'rsus.positions' must be an array of [x, y] pairs");
    } else {
      r.positions.clear();
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const json& p = pos[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number()) {
          errors.add("'rsus.positions[" + std::to_string(i) +
                     "]' must be an [x, y] pair");
          continue;
        }
        r.positions.push_back(Vec2{p[0].get<double>(), p[1].get<double>()});
      }
    }
  }
}

void parse_agent(const json& j, AgentConfig& a, ErrorList& errors) {
  check_keys(j, "agent.",
             {"alpha", "gamma", "epsilon0", "max_time", "penalty",
              "elapsed_cap_slots"},
             errors);
  read(j, "agent.", "alpha", a.alpha, errors);
  read(j, "agent.", "gamma", a.gamma, errors);
  read(j, "agent.", "epsilon0", a.epsilon0, errors);
  read(j, "agent.", "max_time", a.max_time, errors);
  read(j, "agent.", "penalty", a.penalty, errors);
  read(j, "agent.", "elapsed_cap_slots", a.elapsed_cap_slots, errors);
}

void parse_fp(const json& j, FpConfig& fp, ErrorList& errors) {
  check_keys(j, "fp.", {"p_keep", "p_server", "p_rsu", "p_sensor"}, errors);
  read(j, "fp.", "p_keep", fp.p_keep, errors);
  read(j, "fp.", "p_server", fp.p_server, errors);
  read(j, "fp.", "p_rsu", fp.p_rsu, errors);
  read(j, "fp.", "p_sensor", fp.p_sensor, errors);
}

void validate_into(const ScenarioConfig& cfg, ErrorList& errors) {
  auto positive = [&](double v, const char* key) {
    if (!(v > 0.0)) errors.add(std::string("'") + key + "' must be > 0");
  };
  positive(cfg.packet_size_mb, "packet_size_mb");
  positive(cfg.capacity_mb, "capacity_mb");
  positive(cfg.device_tx_range_m, "device_tx_range_m");
  positive(cfg.rsu_range_m, "rsu_range_m");
  positive(cfg.bw_cellular_mbps, "bw_cellular_mbps");
  positive(cfg.bw_wifi_mbps, "bw_wifi_mbps");
  positive(cfg.bw_wired_mbps, "bw_wired_mbps");
  positive(cfg.slot_seconds, "slot_seconds");
  if (cfg.lambda_slots <= 0) errors.add("'lambda_slots' must be > 0");
  if (cfg.delay_threshold_slots <= 0)
    errors.add("'delay_threshold_slots' must be > 0");
  if (cfg.horizon_slots < 0) errors.add("'horizon_slots' must be >= 0");
  if (cfg.warmup_slots < 0 || cfg.warmup_slots > cfg.horizon_slots)
    errors.add("'warmup_slots' must lie in [0, horizon_slots]");
  if (cfg.packet_size_mb > cfg.capacity_mb)
    errors.add("'packet_size_mb' must not exceed 'capacity_mb'");

  if (cfg.strategy != "fuzzyq" && cfg.strategy != "greedy" &&
      cfg.strategy != "fp")
    errors.add("'strategy' must be fuzzyq, greedy or fp");

  if (cfg.agent.alpha < 0.0 || cfg.agent.alpha > 1.0)
    errors.add("'agent.alpha' must lie in [0, 1]");
  if (cfg.agent.gamma < 0.0 || cfg.agent.gamma >= 1.0)
    errors.add("'agent.gamma' must lie in [0, 1)");
  if (cfg.agent.epsilon0 < 0.0 || cfg.agent.epsilon0 > 1.0)
    errors.add("'agent.epsilon0' must lie in [0, 1]");
  if (cfg.agent.max_time < 0) errors.add("'agent.max_time' must be >= 0");
  if (cfg.agent.elapsed_cap_slots < 0)
    errors.add("'agent.elapsed_cap_slots' must be >= 0");

  if (cfg.strategy == "fp") {
    try {
      validate(cfg.fp);
    } catch (const std::invalid_argument& e) {
      errors.add(std::string("'fp': ") + e.what());
    }
  }

  if (cfg.trace.kind == TraceConfig::Kind::Synthetic) {
    if (cfg.trace.n_devices <= 0) errors.add("'trace.n_devices' must be > 0");
    if (!(cfg.trace.area_m2 > 0.0)) errors.add("'trace.area_m2' must be > 0");
    if (cfg.trace.speed_min_mps < 0.0 ||
        cfg.trace.speed_max_mps < cfg.trace.speed_min_mps)
      errors.add("'trace.speed_min_mps/speed_max_mps' must satisfy 0 <= min <= max");
    if (!(cfg.trace.street_spacing_m > 0.0))
      errors.add("'trace.street_spacing_m' must be > 0");
    if (cfg.trace.duration_slots < 0)
      errors.add("'trace.duration_slots' must be >= 0");
  } else if (cfg.trace.path.empty()) {
    errors.add("'trace.path' is required when trace.kind is file");
  }

  switch (cfg.rsus.kind) {
    case RsuLayoutConfig::Kind::Grid:
      if (cfg.rsus.count < 0) errors.add("'rsus.count' must be >= 0");
      break;
    case RsuLayoutConfig::Kind::Place:
      if (!(cfg.rsus.center_gap_min_m > 0.0) ||
          cfg.rsus.center_gap_max_m < cfg.rsus.center_gap_min_m)
        errors.add("'rsus.center_gap_*' must satisfy 0 < min <= max");
      if (!(cfg.rsus.outer_gap_min_m > 0.0) ||
          cfg.rsus.outer_gap_max_m < cfg.rsus.outer_gap_min_m)
        errors.add("'rsus.outer_gap_*' must satisfy 0 < min <= max");
      if (cfg.rsus.merge_radius_m < 0.0)
        errors.add("'rsus.merge_radius_m' must be >= 0");
      break;
    case RsuLayoutConfig::Kind::File:
      if (cfg.rsus.path.empty())
        errors.add("'rsus.path' is required when rsus.kind is file");
      break;
    case RsuLayoutConfig::Kind::Explicit:
      break;
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text,
                            const std::string& name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(name + ": expected a JSON object");

  ErrorList errors(name);
  ScenarioConfig cfg;
  check_keys(j, "",
             {"scenario_id", "strategy", "seed", "horizon_slots",
              "warmup_slots", "packet_size_mb", "capacity_mb",
              "device_tx_range_m", "rsu_range_m", "bw_cellular_mbps",
              "bw_wifi_mbps", "bw_wired_mbps", "slot_seconds", "lambda_slots",
              "delay_threshold_slots", "energy_cellular_w", "energy_wifi_w",
              "agent", "fp", "trace", "rsus", "fuzzy"},
             errors);
  read(j, "", "scenario_id", cfg.scenario_id, errors);
  read(j, "", "strategy", cfg.strategy, errors);
  read(j, "", "seed", cfg.seed, errors);
  read(j, "", "horizon_slots", cfg.horizon_slots, errors);
  read(j, "", "warmup_slots", cfg.warmup_slots, errors);
  read(j, "", "packet_size_mb", cfg.packet_size_mb, errors);
  read(j, "", "capacity_mb", cfg.capacity_mb, errors);
  read(j, "", "device_tx_range_m", cfg.device_tx_range_m, errors);
  read(j, "", "rsu_range_m", cfg.rsu_range_m, errors);
  read(j, "", "bw_cellular_mbps", cfg.bw_cellular_mbps, errors);
  read(j, "", "bw_wifi_mbps", cfg.bw_wifi_mbps, errors);
  read(j, "", "bw_wired_mbps", cfg.bw_wired_mbps, errors);
  read(j, "", "slot_seconds", cfg.slot_seconds, errors);
  read(j, "", "lambda_slots", cfg.lambda_slots, errors);
  read(j, "", "delay_threshold_slots", cfg.delay_threshold_slots, errors);
  read(j, "", "energy_cellular_w", cfg.energy.cellular_w, errors);
  read(j, "", "energy_wifi_w", cfg.energy.wifi_w, errors);
  if (j.contains("agent") && j["agent"].is_object())
    parse_agent(j["agent"], cfg.agent, errors);
  else if (j.contains("agent"))
    errors.add("'agent' must be an object");
  if (j.contains("fp") && j["fp"].is_object())
    parse_fp(j["fp"], cfg.fp, errors);
  else if (j.contains("fp"))
    errors.add("'fp' must be an object");
  if (j.contains("trace") && j["trace"].is_object())
    parse_trace(j["trace"], cfg.trace, errors);
  else if (j.contains("trace"))
    errors.add("'trace' must be an object");
  if (j.contains("rsus") && j["rsus"].is_object())
    parse_rsus(j["rsus"], cfg.rsus, errors);
  else if (j.contains("rsus"))
    errors.add("'rsus' must be an object");
  if (j.contains("fuzzy") && j["fuzzy"].is_object())
    parse_fuzzy(j["fuzzy"], cfg.fuzzy_rules, errors);
  else if (j.contains("fuzzy"))
    errors.add("'fuzzy' must be an object");

  validate_into(cfg, errors);
  errors.raise_if_any();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

void validate(const ScenarioConfig& cfg) {
  ErrorList errors("config");
  validate_into(cfg, errors);
  errors.raise_if_any();
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario_id"] = cfg.scenario_id;
  j["strategy"] = cfg.strategy;
  j["seed"] = cfg.seed;
  j["horizon_slots"] = cfg.horizon_slots;
  j["warmup_slots"] = cfg.warmup_slots;
  j["packet_size_mb"] = cfg.packet_size_mb;
  j["capacity_mb"] = cfg.capacity_mb;
  j["device_tx_range_m"] = cfg.device_tx_range_m;
  j["rsu_range_m"] = cfg.rsu_range_m;
  j["bw_cellular_mbps"] = cfg.bw_cellular_mbps;
  j["bw_wifi_mbps"] = cfg.bw_wifi_mbps;
  j["bw_wired_mbps"] = cfg.bw_wired_mbps;
  j["slot_seconds"] = cfg.slot_seconds;
  j["lambda_slots"] = cfg.lambda_slots;
  j["delay_threshold_slots"] = cfg.delay_threshold_slots;
  j["energy_cellular_w"] = cfg.energy.cellular_w;
  j["energy_wifi_w"] = cfg.energy.wifi_w;
  j["agent"] = {{"alpha", cfg.agent.alpha},
                {"gamma", cfg.agent.gamma},
                {"epsilon0", cfg.agent.epsilon0},
                {"max_time", cfg.agent.max_time},
                {"penalty", cfg.agent.penalty},
                {"elapsed_cap_slots", cfg.agent.elapsed_cap_slots}};
  j["fp"] = {{"p_keep", cfg.fp.p_keep},
             {"p_server", cfg.fp.p_server},
             {"p_rsu", cfg.fp.p_rsu},
             {"p_sensor", cfg.fp.p_sensor}};
  json trace;
  trace["kind"] =
      cfg.trace.kind == TraceConfig::Kind::Synthetic ? "synthetic" : "file";
  trace["n_devices"] = cfg.trace.n_devices;
  trace["area_m2"] = cfg.trace.area_m2;
  trace["duration_slots"] = cfg.trace.duration_slots;
  trace["speed_min_mps"] = cfg.trace.speed_min_mps;
  trace["speed_max_mps"] = cfg.trace.speed_max_mps;
  trace["street_spacing_m"] = cfg.trace.street_spacing_m;
  trace["seed"] = cfg.trace.seed;
  trace["path"] = cfg.trace.path;
  trace["min_span_minutes"] = cfg.trace.min_span_minutes;
  j["trace"] = trace;
  json rsus;
  switch (cfg.rsus.kind) {
    case RsuLayoutConfig::Kind::Grid: rsus["kind"] = "grid"; break;
    case RsuLayoutConfig::Kind::Place: rsus["kind"] = "place"; break;
    case RsuLayoutConfig::Kind::Explicit: rsus["kind"] = "explicit"; break;
    case RsuLayoutConfig::Kind::File: rsus["kind"] = "file"; break;
  }
  rsus["count"] = cfg.rsus.count;
  rsus["center_x_m"] = cfg.rsus.center_x_m;
  rsus["center_y_m"] = cfg.rsus.center_y_m;
  rsus["center_radius_m"] = cfg.rsus.center_radius_m;
  rsus["center_gap_min_m"] = cfg.rsus.center_gap_min_m;
  rsus["center_gap_max_m"] = cfg.rsus.center_gap_max_m;
  rsus["outer_gap_min_m"] = cfg.rsus.outer_gap_min_m;
  rsus["outer_gap_max_m"] = cfg.rsus.outer_gap_max_m;
  rsus["merge_radius_m"] = cfg.rsus.merge_radius_m;
  json positions = json::array();
  for (const Vec2& p : cfg.rsus.positions)
    positions.push_back(json::array({p.x, p.y}));
  rsus["positions"] = positions;
  rsus["path"] = cfg.rsus.path;
  j["rsus"] = rsus;
  return j.dump(2);
}

WorldConfig world_config(const ScenarioConfig& cfg) {
  WorldConfig w;
  w.packet_size_mb = cfg.packet_size_mb;
  w.capacity_mb = cfg.capacity_mb;
  w.device_tx_range_m = cfg.device_tx_range_m;
  w.rsu_range_m = cfg.rsu_range_m;
  w.bw_cellular_mbps = cfg.bw_cellular_mbps;
  w.bw_wifi_mbps = cfg.bw_wifi_mbps;
  w.bw_wired_mbps = cfg.bw_wired_mbps;
  w.slot_seconds = cfg.slot_seconds;
  w.lambda_slots = cfg.lambda_slots;
  w.delay_threshold_slots = cfg.delay_threshold_slots;
  w.horizon_slots = cfg.horizon_slots;
  w.warmup_slots = cfg.warmup_slots;
  w.energy = cfg.energy;
  return w;
}

AgentConfig agent_config(const ScenarioConfig& cfg) {
  AgentConfig a = cfg.agent;
  a.capacity_mb = cfg.capacity_mb;
  a.delay_threshold_slots = cfg.delay_threshold_slots;
  if (a.max_time <= 0) a.max_time = std::max<long>(cfg.horizon_slots, 1);
  return a;
}

}  // namespace vcsim
