#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "vcsim/rng.hpp"

namespace vcsim {

enum class Action { Keep, SendServer, SendRsu, SendNeighbor };

// Declaration order doubles as the argmax tie-break order.
inline constexpr std::array<Action, 4> kAllActions = {
    Action::Keep, Action::SendServer, Action::SendRsu, Action::SendNeighbor};

const char* to_string(Action a);
std::optional<Action> action_from_string(const std::string& s);

// Raw continuous view of one device at decision time.
struct DeviceView {
  double elapsed_slots = 0.0;  // head-packet age; 0 when the queue is empty
  double local_free_mb = 0.0;
  std::optional<double> neighbor_free_mb;  // nearest in-range device, if any
  bool rsu_in_range = false;
};

// Discrete state. neighbor_free == kNoNeighbor encodes "no device in range".
struct StateKey {
  int elapsed_slots = 0;
  int local_free = 0;
  int neighbor_free = kNoNeighbor;
  bool rsu_in_range = false;

  static constexpr int kNoNeighbor = -1;

  auto operator<=>(const StateKey&) const = default;
};

std::string to_string(const StateKey& s);

struct AgentConfig {
  double alpha = 0.5;
  double gamma = 0.9;
  double epsilon0 = 0.9;
  long max_time = 0;  // exploration horizon in slots; must be > 0 at use
  double penalty = 100.0;
  double capacity_mb = 25.0;
  long delay_threshold_slots = 10;
  int elapsed_cap_slots = 0;  // 0 means 2 * delay_threshold_slots

  int effective_elapsed_cap() const {
    return elapsed_cap_slots > 0 ? elapsed_cap_slots
                                 : static_cast<int>(2 * delay_threshold_slots);
  }
};

// Sparse action-value table. Unvisited entries read as 0.
class QTable {
 public:
  double value(const StateKey& s, Action a) const;
  double max_value(const StateKey& s) const;
  void set(const StateKey& s, Action a, double q);
  std::size_t entry_count() const { return rows_.size() * kAllActions.size(); }
  std::size_t state_count() const { return rows_.size(); }

  // Flat text form, one "state_key,action,q_value" row per entry.
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

 private:
  std::map<StateKey, std::array<double, 4>> rows_;
};

// Round half up, clamp into the configured ranges.
StateKey discretize_state(const DeviceView& view, const AgentConfig& cfg);

// Linear decay from epsilon0 at t = 0 to 0 at t >= max_time.
double epsilon_at(double epsilon0, long t, long max_time);

// Epsilon-greedy over the four actions; greedy ties break in kAllActions
// order. Always consumes exactly one uniform draw, plus one more when it
// explores, so the caller's stream stays aligned regardless of epsilon.
Action select_action(const QTable& table, const StateKey& s, double epsilon,
                     Rng& rng);

// Reward for the action taken, evaluated on the post-action view. theta is
// the current offloading preference in [0, 1].
double reward(Action action, const DeviceView& post, double theta,
              const AgentConfig& cfg);

// One-step update toward r + gamma * max_a Q(s_next, a).
void update(QTable& table, const StateKey& s, Action a, double r,
            const StateKey& s_next, const AgentConfig& cfg);

}  // namespace vcsim
