#pragma once

#include <cstdint>
#include <optional>

#include "vcsim/fuzzy.hpp"
#include "vcsim/qlearning.hpp"
#include "vcsim/rng.hpp"

namespace vcsim {

struct HeadPacket {
  std::uint64_t packet_id = 0;
  long gen_slot = 0;
  double size_mb = 0.0;
};

struct NeighborInfo {
  int device_id = -1;
  double distance_m = 0.0;
  double free_mb = 0.0;
  // Distance from the neighbor to its nearest RSU, unbounded; empty when the
  // world has no RSUs at all.
  std::optional<double> rsu_distance_m;
};

struct RsuContact {
  int rsu_id = -1;
  double distance_m = 0.0;
};

// Everything a strategy may look at. Decisions must not consult any other
// world state, so geometry needed by the baselines is carried here.
struct Observation {
  int device_id = -1;
  long slot = 0;
  std::optional<HeadPacket> head;
  double elapsed_slots = 0.0;  // head age; 0 with an empty queue
  double local_free_mb = 0.0;
  std::optional<NeighborInfo> neighbor;       // nearest device within tx range
  std::optional<RsuContact> rsu;              // nearest RSU within its range
  std::optional<double> self_rsu_distance_m;  // nearest RSU, unbounded
};

DeviceView to_device_view(const Observation& obs);

// What execute_action reported back for the chosen action.
enum class ExecOutcome {
  Kept,         // keep: packet stays queued
  Delivered,    // cellular upload reached the server
  Hit,          // offload hit: RSU took the packet
  Relayed,      // offload hit: neighbor took the packet
  MissHeld,     // offload miss, queue had room, packet stays
  Miss4g,       // offload miss with a full queue, flushed over cellular
  DroppedFull,  // generation found the queue full
};

const char* to_string(ExecOutcome o);

struct Transition {
  Observation before;
  Action action = Action::Keep;
  ExecOutcome outcome = ExecOutcome::Kept;
  Observation after;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Action decide(const Observation& obs, Rng& rng) = 0;
  virtual void on_outcome(const Transition&) {}
};

// Pure rule: RSU in range -> send there; else a neighbor strictly nearer to
// an RSU -> relay; else upload over cellular. Never keeps.
Action greedy_decide(const Observation& obs);

class GreedyStrategy final : public Strategy {
 public:
  Action decide(const Observation& obs, Rng&) override {
    return greedy_decide(obs);
  }
};

struct FpConfig {
  double p_keep = 0.1;
  double p_server = 0.7;
  double p_rsu = 0.1;
  double p_sensor = 0.1;
};

// Throws std::invalid_argument unless all probabilities are >= 0 and sum to 1.
void validate(const FpConfig& fp);

// Draws a fresh action every slot from the fixed distribution. Infeasible
// draws are not redrawn; they surface as offload misses downstream.
class FixedProbabilityStrategy final : public Strategy {
 public:
  explicit FixedProbabilityStrategy(const FpConfig& fp);
  Action decide(const Observation& obs, Rng& rng) override;

 private:
  FpConfig fp_;
};

class FuzzyQStrategy final : public Strategy {
 public:
  FuzzyQStrategy(const AgentConfig& cfg, fuzzy::RuleBase rules);

  Action decide(const Observation& obs, Rng& rng) override;
  void on_outcome(const Transition& t) override;

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const AgentConfig& config() const { return cfg_; }

 private:
  AgentConfig cfg_;
  fuzzy::RuleBase rules_;
  QTable table_;
};

}  // namespace vcsim
