#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "vcsim/mobility.hpp"

namespace vcsim {

// Transmission channels as seen from the energy model: the device radio pays
// for cellular and WiFi sends, the wired RSU backhaul is free for the device.
enum class Channel { Cellular, Wifi, Wired };

enum class DeliveryRoute { Cellular, Rsu };

struct EnergyModel {
  double cellular_w = 2.26;
  double wifi_w = 1.75;

  double hop_energy_j(Channel ch, double seconds) const {
    switch (ch) {
      case Channel::Cellular: return cellular_w * seconds;
      case Channel::Wifi: return wifi_w * seconds;
      case Channel::Wired: return 0.0;
    }
    return 0.0;
  }
};

// seconds = size_mb / bandwidth_mbps; zero-size packets transmit instantly.
double transmission_seconds(double size_mb, double bandwidth_mbps);

struct MetricsReport {
  long generated = 0;
  long delivered = 0;
  long dropped = 0;
  long still_queued = 0;
  long delayed = 0;
  long delivered_cellular = 0;
  long delivered_rsu = 0;

  double r_drop = 0.0;
  double r_delay = 0.0;
  double r_server = 0.0;
  double r_rsu = 0.0;

  double energy_total_j = 0.0;
  double energy_per_delivered_j = 0.0;
  double contact_rate = 0.0;

  // Delivered-latency histogram, keyed by whole slots (floor).
  std::map<long, long> latency_histogram;
};

// Accumulates per-packet events during a run; finalize() derives the ratios.
// All ratios are defined as 0 when their denominator is 0.
class MetricsCollector {
 public:
  explicit MetricsCollector(EnergyModel energy = {}) : energy_(energy) {}

  void record_generation() { ++generated_; }
  void record_drop() { ++dropped_; }
  void record_hop(Channel ch, double seconds) {
    energy_total_j_ += energy_.hop_energy_j(ch, seconds);
  }
  void record_delivery(DeliveryRoute route, double latency_slots);

  MetricsReport finalize(long delay_threshold_slots, long still_queued,
                         double contact_rate) const;

 private:
  EnergyModel energy_;
  long generated_ = 0;
  long dropped_ = 0;
  long delivered_cellular_ = 0;
  long delivered_rsu_ = 0;
  double energy_total_j_ = 0.0;
  std::vector<double> latencies_;
};

// Fraction of active slots in [from_slot, horizon) during which a device has
// at least one other active device within tx_range, averaged over devices
// that were active at all in the window.
double contact_rate(const std::vector<mobility::Route>& routes,
                    double tx_range_m, long horizon_slots, double slot_seconds,
                    long from_slot = 0);

void write_report_json(std::ostream& out, const MetricsReport& report);

}  // namespace vcsim
