#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vcsim/rng.hpp"

namespace vcsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

namespace mobility {

struct Sample {
  double t_s = 0.0;
  Vec2 pos;
};

// One device's movement, samples strictly increasing in time. The device is
// active only inside [first_s, last_s]; outside it has no position.
struct Route {
  int device_id = -1;
  std::vector<Sample> samples;

  double first_s() const { return samples.front().t_s; }
  double last_s() const { return samples.back().t_s; }

  std::optional<Vec2> position_at_time(double t_s) const;
};

// Position at an integer slot; empty when the device is inactive there.
std::optional<Vec2> position_at(const Route& route, long t_slot,
                                double slot_seconds);

// Reads "device_id,timestamp_s,x_m,y_m" rows (optional header). Sorts per
// device, keeps the first row of duplicate (device, timestamp) pairs and
// removes devices whose active span is shorter than min_span_minutes.
// Malformed rows and an empty result are reported with std::runtime_error.
std::vector<Route> load_traces(std::istream& in, double min_span_minutes,
                               const std::string& name = "traces");
std::vector<Route> load_traces_file(const std::string& path,
                                    double min_span_minutes);

// Normalized form understood by load_traces; round-trips exactly.
void save_traces(std::ostream& out, const std::vector<Route>& routes);

struct SynthSpec {
  long n_devices = 20;
  double area_m2 = 16e6;
  long duration_slots = 1000;
  double slot_seconds = 60.0;
  double speed_min_mps = 5.0;
  double speed_max_mps = 15.0;
  double street_spacing_m = 500.0;
  std::uint64_t seed = 0;
};

// Random-waypoint walks over a square Manhattan street grid: each trip picks
// a random intersection and a speed, then moves axis-by-axis. Samples land
// on the corner points so linear interpolation reproduces the path exactly.
// A speed range of [0, 0] produces stationary devices.
std::vector<Route> synth_traces(const SynthSpec& spec);

struct CenterCircle {
  Vec2 center;
  double radius_m = 0.0;
};

struct PlacementSpec {
  CenterCircle center;
  double center_gap_min_m = 1000.0;
  double center_gap_max_m = 3000.0;
  double outer_gap_min_m = 4000.0;
  double outer_gap_max_m = 8000.0;
  double merge_radius_m = 100.0;
};

struct RsuPlan {
  std::vector<Vec2> positions;
};

// Walks each route's polyline placing an RSU at its start and then at gaps
// drawn from the center or outer interval, depending on where the walk
// currently stands. Candidates within merge_radius of an accepted RSU merge
// into it.
RsuPlan place_rsus(const std::vector<Route>& routes, const PlacementSpec& spec,
                   Rng& rng);

void save_rsus(std::ostream& out, const RsuPlan& plan);
RsuPlan load_rsus(std::istream& in, const std::string& name = "rsus");

}  // namespace mobility
}  // namespace vcsim
