#include "vcsim/metrics.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"

namespace vcsim {

double transmission_seconds(double size_mb, double bandwidth_mbps) {
  if (size_mb == 0.0) return 0.0;
  return size_mb / bandwidth_mbps;
}

void MetricsCollector::record_delivery(DeliveryRoute route,
                                       double latency_slots) {
  if (route == DeliveryRoute::Cellular)
    ++delivered_cellular_;
  else
    ++delivered_rsu_;
  latencies_.push_back(latency_slots);
}

MetricsReport MetricsCollector::finalize(long delay_threshold_slots,
                                         long still_queued,
                                         double contact_rate) const {
  MetricsReport r;
  r.generated = generated_;
  r.dropped = dropped_;
  r.delivered_cellular = delivered_cellular_;
  r.delivered_rsu = delivered_rsu_;
  r.delivered = delivered_cellular_ + delivered_rsu_;
  r.still_queued = still_queued;
  r.energy_total_j = energy_total_j_;
  r.contact_rate = contact_rate;

  for (double latency : latencies_) {
    if (latency > static_cast<double>(delay_threshold_slots)) ++r.delayed;
    ++r.latency_histogram[static_cast<long>(std::floor(latency))];
  }

  if (r.generated > 0)
    r.r_drop = static_cast<double>(r.dropped) / static_cast<double>(r.generated);
  if (r.delivered > 0) {
    r.r_delay = static_cast<double>(r.delayed) / static_cast<double>(r.delivered);
    r.r_server = static_cast<double>(r.delivered_cellular) /
                 static_cast<double>(r.delivered);
    r.r_rsu = static_cast<double>(r.delivered_rsu) /
              static_cast<double>(r.delivered);
    r.energy_per_delivered_j = r.energy_total_j / static_cast<double>(r.delivered);
  }
  return r;
}

double contact_rate(const std::vector<mobility::Route>& routes,
                    double tx_range_m, long horizon_slots, double slot_seconds,
                    long from_slot) {
  const std::size_t n = routes.size();
  std::vector<long> active_slots(n, 0);
  std::vector<long> contact_slots(n, 0);
  std::vector<std::optional<Vec2>> pos(n);

  for (long t = from_slot; t < horizon_slots; ++t) {
    for (std::size_t i = 0; i < n; ++i)
      pos[i] = mobility::position_at(routes[i], t, slot_seconds);
    for (std::size_t i = 0; i < n; ++i) {
      if (!pos[i]) continue;
      ++active_slots[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !pos[j]) continue;
        if (distance(*pos[i], *pos[j]) <= tx_range_m) {
          ++contact_slots[i];
          break;
        }
      }
    }
  }

  double sum = 0.0;
  long devices = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (active_slots[i] == 0) continue;
    sum += static_cast<double>(contact_slots[i]) /
           static_cast<double>(active_slots[i]);
    ++devices;
  }
  return devices > 0 ? sum / static_cast<double>(devices) : 0.0;
}

void write_report_json(std::ostream& out, const MetricsReport& report) {
  nlohmann::json j;
  j["generated"] = report.generated;
  j["delivered"] = report.delivered;
  j["dropped"] = report.dropped;
  j["still_queued"] = report.still_queued;
  j["delayed"] = report.delayed;
  j["delivered_cellular"] = report.delivered_cellular;
  j["delivered_rsu"] = report.delivered_rsu;
  j["r_drop"] = report.r_drop;
  j["r_delay"] = report.r_delay;
  j["r_server"] = report.r_server;
  j["r_rsu"] = report.r_rsu;
  j["energy_total_j"] = report.energy_total_j;
  j["energy_per_delivered_j"] = report.energy_per_delivered_j;
  j["contact_rate"] = report.contact_rate;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [bucket, count] : report.latency_histogram)
    hist[std::to_string(bucket)] = count;
  j["latency_histogram"] = hist;
  out << j.dump(2) << '\n';
}

}  // namespace vcsim
