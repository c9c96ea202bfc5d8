#include "vcsim/experiment.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vcsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  assert(ec == std::errc());
  return std::string(buf, end);
}

std::uint64_t effective_trace_seed(const ScenarioConfig& cfg) {
  return cfg.trace.seed != 0 ? cfg.trace.seed : cfg.seed;
}

struct Bounds {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

Bounds bounding_box(const std::vector<mobility::Route>& routes) {
  Bounds b;
  bool first = true;
  for (const auto& route : routes)
    for (const auto& s : route.samples) {
      if (first) {
        b = Bounds{s.pos.x, s.pos.y, s.pos.x, s.pos.y};
        first = false;
        continue;
      }
      b.min_x = std::min(b.min_x, s.pos.x);
      b.min_y = std::min(b.min_y, s.pos.y);
      b.max_x = std::max(b.max_x, s.pos.x);
      b.max_y = std::max(b.max_y, s.pos.y);
    }
  return b;
}

}  // namespace

std::vector<mobility::Route> build_traces(const ScenarioConfig& cfg) {
  if (cfg.trace.kind == TraceConfig::Kind::File)
    return mobility::load_traces_file(cfg.trace.path,
                                      cfg.trace.min_span_minutes);
  mobility::SynthSpec spec;
  spec.n_devices = cfg.trace.n_devices;
  spec.area_m2 = cfg.trace.area_m2;
  spec.duration_slots = cfg.trace.duration_slots > 0 ? cfg.trace.duration_slots
                                                     : cfg.horizon_slots;
  spec.slot_seconds = cfg.slot_seconds;
  spec.speed_min_mps = cfg.trace.speed_min_mps;
  spec.speed_max_mps = cfg.trace.speed_max_mps;
  spec.street_spacing_m = cfg.trace.street_spacing_m;
  spec.seed = effective_trace_seed(cfg);
  return mobility::synth_traces(spec);
}

std::vector<Vec2> build_rsus(const ScenarioConfig& cfg,
                             const std::vector<mobility::Route>& routes) {
  switch (cfg.rsus.kind) {
    case RsuLayoutConfig::Kind::Explicit:
      return cfg.rsus.positions;

    case RsuLayoutConfig::Kind::File: {
      std::ifstream in(cfg.rsus.path);
      if (!in)
        throw std::runtime_error("cannot open rsu file: " + cfg.rsus.path);
      return mobility::load_rsus(in, cfg.rsus.path).positions;
    }

    case RsuLayoutConfig::Kind::Grid: {
      std::vector<Vec2> out;
      if (cfg.rsus.count <= 0) return out;
      const Bounds b = bounding_box(routes);
      const long nx = static_cast<long>(
          std::ceil(std::sqrt(static_cast<double>(cfg.rsus.count))));
      const long ny = (cfg.rsus.count + nx - 1) / nx;
      const double w = (b.max_x - b.min_x) / static_cast<double>(nx);
      const double h = (b.max_y - b.min_y) / static_cast<double>(ny);
      for (long j = 0; j < ny && static_cast<long>(out.size()) < cfg.rsus.count; ++j)
        for (long i = 0; i < nx && static_cast<long>(out.size()) < cfg.rsus.count; ++i)
          out.push_back(Vec2{b.min_x + (static_cast<double>(i) + 0.5) * w,
                             b.min_y + (static_cast<double>(j) + 0.5) * h});
      return out;
    }

    case RsuLayoutConfig::Kind::Place: {
      mobility::PlacementSpec spec;
      const Bounds b = bounding_box(routes);
      spec.center.center = cfg.rsus.center_x_m >= 0.0 && cfg.rsus.center_y_m >= 0.0
                               ? Vec2{cfg.rsus.center_x_m, cfg.rsus.center_y_m}
                               : Vec2{0.5 * (b.min_x + b.max_x),
                                      0.5 * (b.min_y + b.max_y)};
      spec.center.radius_m =
          cfg.rsus.center_radius_m >= 0.0
              ? cfg.rsus.center_radius_m
              : 0.25 * std::max(b.max_x - b.min_x, b.max_y - b.min_y);
      spec.center_gap_min_m = cfg.rsus.center_gap_min_m;
      spec.center_gap_max_m = cfg.rsus.center_gap_max_m;
      spec.outer_gap_min_m = cfg.rsus.outer_gap_min_m;
      spec.outer_gap_max_m = cfg.rsus.outer_gap_max_m;
      spec.merge_radius_m = cfg.rsus.merge_radius_m;
      // Placement randomness is tied to the trace seed so the road-side
      // infrastructure stays put when only the run seed changes.
      Rng rng(effective_trace_seed(cfg) ^ 0x5eedf00dULL);
      return mobility::place_rsus(routes, spec, rng).positions;
    }
  }
  return {};
}

StrategyFactory make_strategy_factory(const ScenarioConfig& cfg) {
  if (cfg.strategy == "greedy")
    return [](int) { return std::make_unique<GreedyStrategy>(); };
  if (cfg.strategy == "fp") {
    const FpConfig fp = cfg.fp;
    return [fp](int) { return std::make_unique<FixedProbabilityStrategy>(fp); };
  }
  if (cfg.strategy == "fuzzyq") {
    const AgentConfig agent = agent_config(cfg);
    const fuzzy::RuleBase rules = cfg.fuzzy_rules;
    return [agent, rules](int) {
      return std::make_unique<FuzzyQStrategy>(agent, rules);
    };
  }
  throw std::invalid_argument("unknown strategy: " + cfg.strategy);
}

namespace {

StrategyFactory with_warm_start(StrategyFactory inner,
                                const std::string& qtable_dir) {
  return [inner, qtable_dir](int device_id) {
    auto strategy = inner(device_id);
    if (auto* fq = dynamic_cast<FuzzyQStrategy*>(strategy.get())) {
      const std::string path =
          qtable_dir + "/qtable_" + std::to_string(device_id) + ".csv";
      std::ifstream in(path);
      if (in) fq->table() = QTable::load(in);
    }
    return strategy;
  };
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg,
                       const RunArtifacts& artifacts) {
  validate(cfg);
  auto routes = build_traces(cfg);
  auto rsus = build_rsus(cfg, routes);
  StrategyFactory factory = make_strategy_factory(cfg);
  if (!artifacts.qtable_in_dir.empty())
    factory = with_warm_start(factory, artifacts.qtable_in_dir);

  RunResult result;
  result.world = std::make_unique<World>(world_config(cfg), std::move(routes),
                                         std::move(rsus), factory, cfg.seed);
  result.report = result.world->run();

  if (!artifacts.event_log_path.empty()) {
    std::ofstream out(artifacts.event_log_path);
    if (!out)
      throw std::runtime_error("cannot write event log: " +
                               artifacts.event_log_path);
    write_event_log(out, *result.world);
  }
  if (!artifacts.qtable_out_dir.empty()) {
    std::filesystem::create_directories(artifacts.qtable_out_dir);
    for (std::size_t i = 0; i < result.world->device_count(); ++i) {
      auto* fq = dynamic_cast<FuzzyQStrategy*>(&result.world->strategy(i));
      if (!fq) continue;
      const std::string path = artifacts.qtable_out_dir + "/qtable_" +
                               std::to_string(result.world->device(i).id) +
                               ".csv";
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write qtable: " + path);
      fq->table().save(out);
    }
  }
  return result;
}

std::string results_csv_header() {
  return "scenario_id,seed,strategy,lambda_d,delta,packet_size,tx_range,"
         "r_drop,r_delay,r_server,r_rsu,energy_total_j,energy_per_delivered_j,"
         "contact_rate";
}

std::string results_csv_row(const ScenarioConfig& cfg,
                            const std::string& seed_label,
                            const MetricsReport& report) {
  std::string row;
  row += cfg.scenario_id;
  row += ',' + seed_label;
  row += ',' + cfg.strategy;
  row += ',' + std::to_string(cfg.lambda_slots);
  row += ',' + std::to_string(cfg.delay_threshold_slots);
  row += ',' + format_double(cfg.packet_size_mb);
  row += ',' + format_double(cfg.device_tx_range_m);
  row += ',' + format_double(report.r_drop);
  row += ',' + format_double(report.r_delay);
  row += ',' + format_double(report.r_server);
  row += ',' + format_double(report.r_rsu);
  row += ',' + format_double(report.energy_total_j);
  row += ',' + format_double(report.energy_per_delivered_j);
  row += ',' + format_double(report.contact_rate);
  return row;
}

void append_results_csv(const std::string& path,
                        const std::vector<std::string>& rows) {
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open results file: " + path);
  if (fresh) out << results_csv_header() << '\n';
  for (const std::string& row : rows) out << row << '\n';
}

GridFpResult grid_search_fp(const ScenarioConfig& base,
                            const std::vector<double>& values) {
  GridFpResult result;
  for (double p_keep : values)
    for (double p_rsu : values)
      for (double p_sensor : values) {
        double p_server = 1.0 - p_keep - p_rsu - p_sensor;
        if (std::abs(p_server) < 1e-12) p_server = 0.0;
        if (p_server < 0.0) {
          ++result.skipped;
          continue;
        }
        ScenarioConfig cfg = base;
        cfg.strategy = "fp";
        cfg.fp = FpConfig{p_keep, p_server, p_rsu, p_sensor};
        GridFpEntry entry;
        entry.fp = cfg.fp;
        entry.report = run_scenario(cfg).report;
        result.entries.push_back(std::move(entry));
      }
  std::stable_sort(result.entries.begin(), result.entries.end(),
                   [](const GridFpEntry& a, const GridFpEntry& b) {
                     if (a.report.r_drop != b.report.r_drop)
                       return a.report.r_drop < b.report.r_drop;
                     return a.report.r_server < b.report.r_server;
                   });
  return result;
}

std::string grid_csv_header() {
  return "p_keep,p_server,p_rsu,p_sensor,r_drop,r_delay,r_server,r_rsu,"
         "energy_total_j,energy_per_delivered_j,contact_rate";
}

std::string grid_csv_row(const GridFpEntry& entry) {
  std::string row;
  row += format_double(entry.fp.p_keep);
  row += ',' + format_double(entry.fp.p_server);
  row += ',' + format_double(entry.fp.p_rsu);
  row += ',' + format_double(entry.fp.p_sensor);
  row += ',' + format_double(entry.report.r_drop);
  row += ',' + format_double(entry.report.r_delay);
  row += ',' + format_double(entry.report.r_server);
  row += ',' + format_double(entry.report.r_rsu);
  row += ',' + format_double(entry.report.energy_total_j);
  row += ',' + format_double(entry.report.energy_per_delivered_j);
  row += ',' + format_double(entry.report.contact_rate);
  return row;
}

void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value) {
  if (axis == "lambda_d")
    cfg.lambda_slots = std::lround(value);
  else if (axis == "delta")
    cfg.delay_threshold_slots = std::lround(value);
  else if (axis == "packet_size")
    cfg.packet_size_mb = value;
  else if (axis == "tx_range")
    cfg.device_tx_range_m = value;
  else
    throw std::invalid_argument("unknown sweep axis: " + axis);
}

namespace {

double median_of(std::vector<double> v) {
  assert(!v.empty());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

MetricsReport fold_reports(const std::vector<MetricsReport>& reports,
                           bool use_median) {
  auto fold = [&](auto pick) {
    std::vector<double> values;
    values.reserve(reports.size());
    for (const MetricsReport& r : reports) values.push_back(pick(r));
    return use_median ? median_of(values) : mean_of(values);
  };
  MetricsReport out;
  out.generated = std::lround(fold([](const MetricsReport& r) {
    return static_cast<double>(r.generated);
  }));
  out.delivered = std::lround(fold([](const MetricsReport& r) {
    return static_cast<double>(r.delivered);
  }));
  out.dropped = std::lround(fold([](const MetricsReport& r) {
    return static_cast<double>(r.dropped);
  }));
  out.r_drop = fold([](const MetricsReport& r) { return r.r_drop; });
  out.r_delay = fold([](const MetricsReport& r) { return r.r_delay; });
  out.r_server = fold([](const MetricsReport& r) { return r.r_server; });
  out.r_rsu = fold([](const MetricsReport& r) { return r.r_rsu; });
  out.energy_total_j =
      fold([](const MetricsReport& r) { return r.energy_total_j; });
  out.energy_per_delivered_j =
      fold([](const MetricsReport& r) { return r.energy_per_delivered_j; });
  out.contact_rate =
      fold([](const MetricsReport& r) { return r.contact_rate; });
  return out;
}

}  // namespace

SweepResult sweep(const ScenarioConfig& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs values");
  if (spec.seeds.empty()) throw std::invalid_argument("sweep needs seeds");
  SweepResult result;
  for (double value : spec.values) {
    std::vector<MetricsReport> reports;
    for (std::uint64_t seed : spec.seeds) {
      ScenarioConfig cfg = base;
      apply_axis(cfg, spec.axis, value);
      cfg.seed = seed;
      SweepCell cell;
      cell.value = value;
      cell.seed = seed;
      cell.report = run_scenario(cfg).report;
      reports.push_back(cell.report);
      result.cells.push_back(std::move(cell));
    }
    SweepAggregate agg;
    agg.value = value;
    agg.median = fold_reports(reports, true);
    agg.mean = fold_reports(reports, false);
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

}  // namespace vcsim
