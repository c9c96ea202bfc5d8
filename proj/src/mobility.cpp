#include "vcsim/mobility.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vcsim {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace mobility {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  assert(ec == std::errc());
  return std::string(buf, end);
}

double parse_double(const std::string& text, const std::string& name,
                    int line_no) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error(name + " line " + std::to_string(line_no) +
                             ": bad number '" + text + "'");
  return out;
}

long parse_long(const std::string& text, const std::string& name,
                int line_no) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error(name + " line " + std::to_string(line_no) +
                             ": bad integer '" + text + "'");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::optional<Vec2> Route::position_at_time(double t_s) const {
  if (samples.empty() || t_s < first_s() || t_s > last_s()) return std::nullopt;
  // First sample with t >= t_s.
  auto it = std::lower_bound(samples.begin(), samples.end(), t_s,
                             [](const Sample& s, double t) { return s.t_s < t; });
  if (it->t_s == t_s) return it->pos;
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  const double w = (t_s - lo.t_s) / (hi.t_s - lo.t_s);
  return Vec2{lo.pos.x + w * (hi.pos.x - lo.pos.x),
              lo.pos.y + w * (hi.pos.y - lo.pos.y)};
}

std::optional<Vec2> position_at(const Route& route, long t_slot,
                                double slot_seconds) {
  return route.position_at_time(static_cast<double>(t_slot) * slot_seconds);
}

std::vector<Route> load_traces(std::istream& in, double min_span_minutes,
                               const std::string& name) {
  struct Row {
    double t_s;
    Vec2 pos;
    int file_order;
  };
  std::map<long, std::vector<Row>> by_device;
  std::string line;
  int line_no = 0;
  int order = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "device_id,timestamp_s,x_m,y_m") continue;
    auto fields = split_csv(line);
    if (fields.size() != 4)
      throw std::runtime_error(name + " line " + std::to_string(line_no) +
                               ": expected device_id,timestamp_s,x_m,y_m");
    const long id = parse_long(fields[0], name, line_no);
    Row row;
    row.t_s = parse_double(fields[1], name, line_no);
    row.pos.x = parse_double(fields[2], name, line_no);
    row.pos.y = parse_double(fields[3], name, line_no);
    row.file_order = order++;
    by_device[id].push_back(row);
  }

  std::vector<Route> routes;
  for (auto& [id, rows] : by_device) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.t_s != b.t_s) return a.t_s < b.t_s;
      return a.file_order < b.file_order;  // first occurrence wins below
    });
    Route route;
    route.device_id = static_cast<int>(id);
    for (const Row& row : rows) {
      if (!route.samples.empty() && route.samples.back().t_s == row.t_s)
        continue;  // duplicate timestamp, keep the first
      route.samples.push_back(Sample{row.t_s, row.pos});
    }
    const double span_min = (route.last_s() - route.first_s()) / 60.0;
    if (span_min < min_span_minutes) continue;
    routes.push_back(std::move(route));
  }
  if (routes.empty())
    throw std::runtime_error(name + ": no usable devices (empty dataset)");
  return routes;
}

std::vector<Route> load_traces_file(const std::string& path,
                                    double min_span_minutes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return load_traces(in, min_span_minutes, path);
}

void save_traces(std::ostream& out, const std::vector<Route>& routes) {
  out << "device_id,timestamp_s,x_m,y_m\n";
  for (const Route& route : routes)
    for (const Sample& s : route.samples)
      out << route.device_id << ',' << format_double(s.t_s) << ','
          << format_double(s.pos.x) << ',' << format_double(s.pos.y) << '\n';
}

std::vector<Route> synth_traces(const SynthSpec& spec) {
  if (spec.n_devices <= 0) throw std::invalid_argument("n_devices must be > 0");
  if (spec.area_m2 <= 0.0) throw std::invalid_argument("area_m2 must be > 0");
  if (spec.speed_min_mps < 0.0 || spec.speed_max_mps < spec.speed_min_mps)
    throw std::invalid_argument("bad speed range");

  Rng rng(spec.seed);
  const double side = std::sqrt(spec.area_m2);
  const long cells = std::max<long>(1, static_cast<long>(side / spec.street_spacing_m));
  const long nodes = cells + 1;  // intersections per axis
  const double spacing = side / static_cast<double>(cells);
  const double duration_s = static_cast<double>(spec.duration_slots) * spec.slot_seconds;

  auto node_pos = [&](long ix, long iy) {
    return Vec2{static_cast<double>(ix) * spacing,
                static_cast<double>(iy) * spacing};
  };

  std::vector<Route> routes;
  routes.reserve(static_cast<std::size_t>(spec.n_devices));
  for (long d = 0; d < spec.n_devices; ++d) {
    Route route;
    route.device_id = static_cast<int>(d);
    long ix = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(nodes)));
    long iy = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(nodes)));
    double t = 0.0;
    Vec2 pos = node_pos(ix, iy);
    route.samples.push_back(Sample{t, pos});

    while (t < duration_s) {
      long tx = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(nodes)));
      long ty = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(nodes)));
      if (tx == ix && ty == iy) continue;
      const double speed = rng.uniform(spec.speed_min_mps, spec.speed_max_mps);
      if (speed <= 0.0) break;  // stationary device, close out below

      // Manhattan leg: x first, then y.
      const Vec2 corner = node_pos(tx, iy);
      const Vec2 target = node_pos(tx, ty);
      for (const Vec2& waypoint : {corner, target}) {
        const double dist = distance(pos, waypoint);
        if (dist == 0.0) continue;
        const double leg_t = dist / speed;
        if (t + leg_t >= duration_s) {
          const double w = (duration_s - t) / leg_t;
          pos = Vec2{pos.x + w * (waypoint.x - pos.x),
                     pos.y + w * (waypoint.y - pos.y)};
          t = duration_s;
          route.samples.push_back(Sample{t, pos});
          break;
        }
        t += leg_t;
        pos = waypoint;
        route.samples.push_back(Sample{t, pos});
      }
      ix = tx;
      iy = ty;
    }
    if (route.samples.back().t_s < duration_s)
      route.samples.push_back(Sample{duration_s, pos});
    routes.push_back(std::move(route));
  }
  return routes;
}

RsuPlan place_rsus(const std::vector<Route>& routes, const PlacementSpec& spec,
                   Rng& rng) {
  RsuPlan plan;
  auto accept = [&](const Vec2& candidate) {
    for (const Vec2& existing : plan.positions)
      if (distance(candidate, existing) <= spec.merge_radius_m) return;
    plan.positions.push_back(candidate);
  };

  for (const Route& route : routes) {
    // Arc-length parametrization of the route polyline.
    std::vector<double> arc{0.0};
    std::vector<Vec2> pts{route.samples.front().pos};
    for (std::size_t i = 1; i < route.samples.size(); ++i) {
      const Vec2& p = route.samples[i].pos;
      const double d = distance(pts.back(), p);
      if (d == 0.0) continue;
      arc.push_back(arc.back() + d);
      pts.push_back(p);
    }
    const double total = arc.back();

    auto point_at_arc = [&](double s) {
      auto it = std::lower_bound(arc.begin(), arc.end(), s);
      if (it == arc.begin()) return pts.front();
      const std::size_t hi = static_cast<std::size_t>(it - arc.begin());
      const double w = (s - arc[hi - 1]) / (arc[hi] - arc[hi - 1]);
      return Vec2{pts[hi - 1].x + w * (pts[hi].x - pts[hi - 1].x),
                  pts[hi - 1].y + w * (pts[hi].y - pts[hi - 1].y)};
    };

    double s = 0.0;
    accept(pts.front());
    for (;;) {
      const Vec2 here = point_at_arc(s);
      const bool central =
          distance(here, spec.center.center) <= spec.center.radius_m;
      const double gap = central
                             ? rng.uniform(spec.center_gap_min_m, spec.center_gap_max_m)
                             : rng.uniform(spec.outer_gap_min_m, spec.outer_gap_max_m);
      s += gap;
      if (s > total) break;
      accept(point_at_arc(s));
    }
  }
  return plan;
}

void save_rsus(std::ostream& out, const RsuPlan& plan) {
  out << "rsu_id,x_m,y_m\n";
  for (std::size_t i = 0; i < plan.positions.size(); ++i)
    out << i << ',' << format_double(plan.positions[i].x) << ','
        << format_double(plan.positions[i].y) << '\n';
}

RsuPlan load_rsus(std::istream& in, const std::string& name) {
  RsuPlan plan;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "rsu_id,x_m,y_m") continue;
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw std::runtime_error(name + " line " + std::to_string(line_no) +
                               ": expected rsu_id,x_m,y_m");
    Vec2 pos;
    pos.x = parse_double(fields[1], name, line_no);
    pos.y = parse_double(fields[2], name, line_no);
    plan.positions.push_back(pos);
  }
  return plan;
}

}  // namespace mobility
}  // namespace vcsim
