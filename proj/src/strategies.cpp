#include "vcsim/strategies.hpp"

#include <stdexcept>
#include <utility>

namespace vcsim {

DeviceView to_device_view(const Observation& obs) {
  DeviceView v;
  v.elapsed_slots = obs.elapsed_slots;
  v.local_free_mb = obs.local_free_mb;
  if (obs.neighbor) v.neighbor_free_mb = obs.neighbor->free_mb;
  v.rsu_in_range = obs.rsu.has_value();
  return v;
}

const char* to_string(ExecOutcome o) {
  switch (o) {
    case ExecOutcome::Kept: return "kept";
    case ExecOutcome::Delivered: return "delivered";
    case ExecOutcome::Hit: return "hit";
    case ExecOutcome::Relayed: return "relayed";
    case ExecOutcome::MissHeld: return "miss_held";
    case ExecOutcome::Miss4g: return "miss_4g";
    case ExecOutcome::DroppedFull: return "dropped_full";
  }
  return "?";
}

Action greedy_decide(const Observation& obs) {
  if (obs.rsu) return Action::SendRsu;
  if (obs.neighbor && obs.neighbor->rsu_distance_m && obs.self_rsu_distance_m &&
      *obs.neighbor->rsu_distance_m < *obs.self_rsu_distance_m)
    return Action::SendNeighbor;
  return Action::SendServer;
}

void validate(const FpConfig& fp) {
  const double values[] = {fp.p_keep, fp.p_server, fp.p_rsu, fp.p_sensor};
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0)
      throw std::invalid_argument("fp probabilities must be non-negative");
    sum += v;
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
    throw std::invalid_argument("fp probabilities must sum to 1");
}

FixedProbabilityStrategy::FixedProbabilityStrategy(const FpConfig& fp)
    : fp_(fp) {
  validate(fp_);
}

Action FixedProbabilityStrategy::decide(const Observation&, Rng& rng) {
  const double r = rng.uniform();
  if (r < fp_.p_keep) return Action::Keep;
  if (r < fp_.p_keep + fp_.p_server) return Action::SendServer;
  if (r < fp_.p_keep + fp_.p_server + fp_.p_rsu) return Action::SendRsu;
  return Action::SendNeighbor;
}

FuzzyQStrategy::FuzzyQStrategy(const AgentConfig& cfg, fuzzy::RuleBase rules)
    : cfg_(cfg), rules_(std::move(rules)) {
  if (cfg_.max_time <= 0)
    throw std::invalid_argument("agent max_time must be positive");
}

Action FuzzyQStrategy::decide(const Observation& obs, Rng& rng) {
  const StateKey s = discretize_state(to_device_view(obs), cfg_);
  const double eps = epsilon_at(cfg_.epsilon0, obs.slot, cfg_.max_time);
  return select_action(table_, s, eps, rng);
}

void FuzzyQStrategy::on_outcome(const Transition& t) {
  const DeviceView post = to_device_view(t.after);
  const double theta =
      fuzzy::compute_theta(post.local_free_mb, cfg_.capacity_mb,
                           post.elapsed_slots,
                           static_cast<double>(cfg_.delay_threshold_slots),
                           rules_);
  const double r = reward(t.action, post, theta, cfg_);
  const StateKey s = discretize_state(to_device_view(t.before), cfg_);
  const StateKey s_next = discretize_state(post, cfg_);
  update(table_, s, t.action, r, s_next, cfg_);
}

}  // namespace vcsim
