#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "vcsim/metrics.hpp"
#include "vcsim/mobility.hpp"
#include "vcsim/strategies.hpp"

namespace vcsim {

enum class PacketStatus { Queued, Delivered, Dropped };

enum class HopKind { Cellular, Relay, RsuWifi, RsuWired };

Channel channel_of(HopKind kind);

struct Hop {
  long slot = 0;
  HopKind kind = HopKind::Cellular;
  double seconds = 0.0;
  // Where the hop ended: a device id for relays, an RSU id for WiFi
  // offloads, -1 for the server itself.
  int target_id = -1;
};

struct Packet {
  std::uint64_t id = 0;
  int origin_device = -1;
  long gen_slot = 0;
  double size_mb = 0.0;
  std::vector<Hop> hops;
  PacketStatus status = PacketStatus::Queued;
  long delivery_slot = -1;
  DeliveryRoute route = DeliveryRoute::Cellular;  // meaningful when delivered

  double tx_seconds() const;
  double latency_slots(double slot_seconds) const;
};

struct WorldConfig {
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
  long horizon_slots = 1000;
  long warmup_slots = 0;  // packets generated before this slot stay out of
                          // the report
  EnergyModel energy;
};

struct DeviceState {
  int id = -1;
  std::deque<std::uint64_t> queue;  // packet ids, head at front
};

using StrategyFactory = std::function<std::unique_ptr<Strategy>(int device_id)>;

// Discrete-time world. Each slot: refresh positions, generate packets, then
// let every active device with a non-empty queue act once on its head
// packet, in ascending device-id order.
class World {
 public:
  World(const WorldConfig& cfg, std::vector<mobility::Route> routes,
        std::vector<Vec2> rsus, const StrategyFactory& make_strategy,
        std::uint64_t seed);

  void step();
  MetricsReport run();       // steps to the horizon, then finalize()
  MetricsReport finalize();  // strands dead queues, computes the report

  long slot() const { return slot_; }
  const WorldConfig& config() const { return cfg_; }
  std::size_t device_count() const { return devices_.size(); }
  const DeviceState& device(std::size_t idx) const { return devices_[idx]; }
  const std::vector<Packet>& packets() const { return packets_; }
  const std::vector<Vec2>& rsus() const { return rsus_; }
  const std::vector<mobility::Route>& routes() const { return routes_; }
  Strategy& strategy(std::size_t idx) { return *strategies_[idx]; }

  double free_mb(std::size_t idx) const;
  std::optional<Vec2> position(std::size_t idx) const { return pos_[idx]; }

  Observation observe(std::size_t idx) const;

  // Nearest in-range device id and RSU id as the device currently sees them.
  std::pair<std::optional<int>, std::optional<int>> contact_ids(
      std::size_t idx) const;

  // Applies the chosen action to the head packet. The device must be active
  // with a non-empty queue.
  ExecOutcome execute_action(std::size_t idx, Action action);

 private:
  void refresh_positions();
  void generate_packets();
  void process_devices();

  bool in_cohort(const Packet& p) const {
    return p.gen_slot >= cfg_.warmup_slots;
  }
  std::optional<std::size_t> nearest_neighbor(std::size_t idx) const;
  std::optional<std::size_t> nearest_rsu_in_range(std::size_t idx) const;
  std::optional<double> nearest_rsu_distance(const Vec2& from) const;
  ExecOutcome deliver_cellular(std::size_t idx, ExecOutcome outcome);
  ExecOutcome miss(std::size_t idx);

  WorldConfig cfg_;
  std::vector<mobility::Route> routes_;
  std::vector<Vec2> rsus_;
  std::vector<DeviceState> devices_;
  std::vector<std::unique_ptr<Strategy>> strategies_;
  std::vector<std::optional<Vec2>> pos_;
  std::vector<Packet> packets_;
  MetricsCollector collector_;
  Rng rng_;
  long slot_ = 0;
  bool finalized_ = false;
};

// Cohort packets as CSV rows. The route column is the '>' separated hop
// trail ("sensor:<id>", "rsu:<id>", "4g"), enough to re-derive every
// device-side transmission.
void write_event_log(std::ostream& out, const World& world);

}  // namespace vcsim
