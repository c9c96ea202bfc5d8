#include "vcsim/simcore.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <ostream>
#include <stdexcept>
#include <string>

namespace vcsim {

Channel channel_of(HopKind kind) {
  switch (kind) {
    case HopKind::Cellular: return Channel::Cellular;
    case HopKind::Relay:
    case HopKind::RsuWifi: return Channel::Wifi;
    case HopKind::RsuWired: return Channel::Wired;
  }
  return Channel::Cellular;
}

double Packet::tx_seconds() const {
  double sum = 0.0;
  for (const Hop& h : hops) sum += h.seconds;
  return sum;
}

double Packet::latency_slots(double slot_seconds) const {
  assert(status == PacketStatus::Delivered);
  return static_cast<double>(delivery_slot - gen_slot) +
         tx_seconds() / slot_seconds;
}

World::World(const WorldConfig& cfg, std::vector<mobility::Route> routes,
             std::vector<Vec2> rsus, const StrategyFactory& make_strategy,
             std::uint64_t seed)
    : cfg_(cfg),
      routes_(std::move(routes)),
      rsus_(std::move(rsus)),
      collector_(cfg.energy),
      rng_(seed) {
  if (routes_.empty()) throw std::invalid_argument("world needs devices");
  std::sort(routes_.begin(), routes_.end(),
            [](const mobility::Route& a, const mobility::Route& b) {
              return a.device_id < b.device_id;
            });
  devices_.resize(routes_.size());
  pos_.resize(routes_.size());
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    devices_[i].id = routes_[i].device_id;
    strategies_.push_back(make_strategy(routes_[i].device_id));
  }
}

double World::free_mb(std::size_t idx) const {
  // Homogeneous packet sizes, so occupancy is an exact product.
  return cfg_.capacity_mb -
         static_cast<double>(devices_[idx].queue.size()) * cfg_.packet_size_mb;
}

void World::refresh_positions() {
  for (std::size_t i = 0; i < routes_.size(); ++i)
    pos_[i] = mobility::position_at(routes_[i], slot_, cfg_.slot_seconds);
}

void World::generate_packets() {
  if (slot_ % cfg_.lambda_slots != 0) return;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (!pos_[i]) continue;
    Packet p;
    p.id = packets_.size();
    p.origin_device = devices_[i].id;
    p.gen_slot = slot_;
    p.size_mb = cfg_.packet_size_mb;
    const bool fits = free_mb(i) >= p.size_mb;
    if (!fits) p.status = PacketStatus::Dropped;
    if (in_cohort(p)) {
      collector_.record_generation();
      if (!fits) collector_.record_drop();
    }
    if (fits) devices_[i].queue.push_back(p.id);
    packets_.push_back(std::move(p));
  }
}

std::optional<std::size_t> World::nearest_neighbor(std::size_t idx) const {
  if (!pos_[idx]) return std::nullopt;
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t j = 0; j < devices_.size(); ++j) {
    if (j == idx || !pos_[j]) continue;
    const double d = distance(*pos_[idx], *pos_[j]);
    if (d > cfg_.device_tx_range_m) continue;
    if (!best || d < best_dist) {  // ascending id order breaks ties
      best = j;
      best_dist = d;
    }
  }
  return best;
}

std::optional<std::size_t> World::nearest_rsu_in_range(std::size_t idx) const {
  if (!pos_[idx]) return std::nullopt;
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t r = 0; r < rsus_.size(); ++r) {
    const double d = distance(*pos_[idx], rsus_[r]);
    if (d > cfg_.rsu_range_m) continue;
    if (!best || d < best_dist) {
      best = r;
      best_dist = d;
    }
  }
  return best;
}

std::optional<double> World::nearest_rsu_distance(const Vec2& from) const {
  std::optional<double> best;
  for (const Vec2& r : rsus_) {
    const double d = distance(from, r);
    if (!best || d < *best) best = d;
  }
  return best;
}

Observation World::observe(std::size_t idx) const {
  Observation o;
  o.device_id = devices_[idx].id;
  o.slot = slot_;
  const auto& queue = devices_[idx].queue;
  if (!queue.empty()) {
    const Packet& head = packets_[queue.front()];
    o.head = HeadPacket{head.id, head.gen_slot, head.size_mb};
    o.elapsed_slots = static_cast<double>(slot_ - head.gen_slot);
  }
  o.local_free_mb = free_mb(idx);
  if (auto n = nearest_neighbor(idx)) {
    NeighborInfo info;
    info.device_id = devices_[*n].id;
    info.distance_m = distance(*pos_[idx], *pos_[*n]);
    info.free_mb = free_mb(*n);
    info.rsu_distance_m = nearest_rsu_distance(*pos_[*n]);
    o.neighbor = info;
  }
  if (auto r = nearest_rsu_in_range(idx))
    o.rsu = RsuContact{static_cast<int>(*r), distance(*pos_[idx], rsus_[*r])};
  if (pos_[idx]) o.self_rsu_distance_m = nearest_rsu_distance(*pos_[idx]);
  return o;
}

std::pair<std::optional<int>, std::optional<int>> World::contact_ids(
    std::size_t idx) const {
  std::pair<std::optional<int>, std::optional<int>> out;
  if (auto n = nearest_neighbor(idx)) out.first = devices_[*n].id;
  if (auto r = nearest_rsu_in_range(idx)) out.second = static_cast<int>(*r);
  return out;
}

ExecOutcome World::deliver_cellular(std::size_t idx, ExecOutcome outcome) {
  DeviceState& dev = devices_[idx];
  Packet& p = packets_[dev.queue.front()];
  dev.queue.pop_front();
  const double seconds = transmission_seconds(p.size_mb, cfg_.bw_cellular_mbps);
  p.hops.push_back(Hop{slot_, HopKind::Cellular, seconds, -1});
  p.status = PacketStatus::Delivered;
  p.delivery_slot = slot_;
  p.route = DeliveryRoute::Cellular;
  if (in_cohort(p)) {
    collector_.record_hop(Channel::Cellular, seconds);
    collector_.record_delivery(DeliveryRoute::Cellular,
                               p.latency_slots(cfg_.slot_seconds));
  }
  return outcome;
}

ExecOutcome World::miss(std::size_t idx) {
  if (free_mb(idx) < cfg_.packet_size_mb)
    return deliver_cellular(idx, ExecOutcome::Miss4g);
  return ExecOutcome::MissHeld;
}

ExecOutcome World::execute_action(std::size_t idx, Action action) {
  DeviceState& dev = devices_[idx];
  assert(pos_[idx] && !dev.queue.empty());

  switch (action) {
    case Action::Keep:
      return ExecOutcome::Kept;

    case Action::SendServer:
      return deliver_cellular(idx, ExecOutcome::Delivered);

    case Action::SendRsu: {
      auto r = nearest_rsu_in_range(idx);
      if (!r) return miss(idx);
      Packet& p = packets_[dev.queue.front()];
      dev.queue.pop_front();
      const double wifi_s = transmission_seconds(p.size_mb, cfg_.bw_wifi_mbps);
      const double wired_s = transmission_seconds(p.size_mb, cfg_.bw_wired_mbps);
      p.hops.push_back(Hop{slot_, HopKind::RsuWifi, wifi_s, static_cast<int>(*r)});
      p.hops.push_back(Hop{slot_, HopKind::RsuWired, wired_s, -1});
      p.status = PacketStatus::Delivered;
      p.delivery_slot = slot_;
      p.route = DeliveryRoute::Rsu;
      if (in_cohort(p)) {
        collector_.record_hop(Channel::Wifi, wifi_s);
        collector_.record_hop(Channel::Wired, wired_s);
        collector_.record_delivery(DeliveryRoute::Rsu,
                                   p.latency_slots(cfg_.slot_seconds));
      }
      return ExecOutcome::Hit;
    }

    case Action::SendNeighbor: {
      auto n = nearest_neighbor(idx);
      if (!n) return miss(idx);
      Packet& p = packets_[dev.queue.front()];
      if (free_mb(*n) < p.size_mb) return miss(idx);
      dev.queue.pop_front();
      const double wifi_s = transmission_seconds(p.size_mb, cfg_.bw_wifi_mbps);
      p.hops.push_back(Hop{slot_, HopKind::Relay, wifi_s, devices_[*n].id});
      devices_[*n].queue.push_back(p.id);
      if (in_cohort(p)) collector_.record_hop(Channel::Wifi, wifi_s);
      return ExecOutcome::Relayed;
    }
  }
  return ExecOutcome::Kept;
}

void World::process_devices() {
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (!pos_[i] || devices_[i].queue.empty()) continue;
    const Observation before = observe(i);
    const Action action = strategies_[i]->decide(before, rng_);
    const ExecOutcome outcome = execute_action(i, action);
    const Observation after = observe(i);
    strategies_[i]->on_outcome(Transition{before, action, outcome, after});
  }
}

void World::step() {
  assert(!finalized_ && slot_ < cfg_.horizon_slots);
  refresh_positions();
  generate_packets();
  process_devices();
  ++slot_;
}

MetricsReport World::run() {
  while (slot_ < cfg_.horizon_slots) step();
  return finalize();
}

MetricsReport World::finalize() {
  assert(!finalized_);
  finalized_ = true;

  // Queues on devices that are inactive at the end can never drain.
  if (cfg_.horizon_slots > 0) {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      const bool active_at_end =
          mobility::position_at(routes_[i], cfg_.horizon_slots - 1,
                                cfg_.slot_seconds)
              .has_value();
      if (active_at_end) continue;
      for (std::uint64_t pid : devices_[i].queue) {
        packets_[pid].status = PacketStatus::Dropped;
        if (in_cohort(packets_[pid])) collector_.record_drop();
      }
      devices_[i].queue.clear();
    }
  }

  long still_queued = 0;
  for (const Packet& p : packets_)
    if (p.status == PacketStatus::Queued && in_cohort(p)) ++still_queued;

  const double contact =
      contact_rate(routes_, cfg_.device_tx_range_m, cfg_.horizon_slots,
                   cfg_.slot_seconds, cfg_.warmup_slots);
  return collector_.finalize(cfg_.delay_threshold_slots, still_queued, contact);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  assert(ec == std::errc());
  return std::string(buf, end);
}

const char* status_name(PacketStatus s) {
  switch (s) {
    case PacketStatus::Queued: return "queued";
    case PacketStatus::Delivered: return "delivered";
    case PacketStatus::Dropped: return "dropped";
  }
  return "?";
}

std::string route_trail(const Packet& p) {
  std::string out;
  for (const Hop& h : p.hops) {
    if (h.kind == HopKind::RsuWired) continue;  // implied by the rsu tag
    if (!out.empty()) out += '>';
    switch (h.kind) {
      case HopKind::Cellular: out += "4g"; break;
      case HopKind::Relay: out += "sensor:" + std::to_string(h.target_id); break;
      case HopKind::RsuWifi: out += "rsu:" + std::to_string(h.target_id); break;
      case HopKind::RsuWired: break;
    }
  }
  return out;
}

}  // namespace

void write_event_log(std::ostream& out, const World& world) {
  out << "packet_id,origin,gen_slot,status,delivery_slot,route,latency_slots\n";
  for (const Packet& p : world.packets()) {
    if (p.gen_slot < world.config().warmup_slots) continue;
    out << p.id << ',' << p.origin_device << ',' << p.gen_slot << ','
        << status_name(p.status) << ',';
    if (p.status == PacketStatus::Delivered) out << p.delivery_slot;
    out << ',' << route_trail(p) << ',';
    if (p.status == PacketStatus::Delivered)
      out << format_double(p.latency_slots(world.config().slot_seconds));
    out << '\n';
  }
}

}  // namespace vcsim
