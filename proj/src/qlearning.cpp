#include "vcsim/qlearning.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vcsim {

const char* to_string(Action a) {
  switch (a) {
    case Action::Keep: return "keep";
    case Action::SendServer: return "send_server";
    case Action::SendRsu: return "send_rsu";
    case Action::SendNeighbor: return "send_neighbor";
  }
  return "?";
}

std::optional<Action> action_from_string(const std::string& s) {
  for (Action a : kAllActions)
    if (s == to_string(a)) return a;
  return std::nullopt;
}

std::string to_string(const StateKey& s) {
  std::string out = std::to_string(s.elapsed_slots);
  out += '/';
  out += std::to_string(s.local_free);
  out += '/';
  if (s.neighbor_free == StateKey::kNoNeighbor)
    out += '-';
  else
    out += std::to_string(s.neighbor_free);
  out += '/';
  out += s.rsu_in_range ? '1' : '0';
  return out;
}

double QTable::value(const StateKey& s, Action a) const {
  auto it = rows_.find(s);
  if (it == rows_.end()) return 0.0;
  return it->second[static_cast<std::size_t>(a)];
}

double QTable::max_value(const StateKey& s) const {
  auto it = rows_.find(s);
  if (it == rows_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

void QTable::set(const StateKey& s, Action a, double q) {
  rows_[s][static_cast<std::size_t>(a)] = q;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  assert(ec == std::errc());
  return std::string(buf, end);
}

StateKey parse_state_key(const std::string& text, int line_no) {
  std::istringstream in(text);
  std::string part;
  std::array<std::string, 4> parts;
  int n = 0;
  while (std::getline(in, part, '/')) {
    if (n >= 4) break;
    parts[n++] = part;
  }
  if (n != 4)
    throw std::runtime_error("qtable line " + std::to_string(line_no) +
                             ": bad state key '" + text + "'");
  StateKey s;
  s.elapsed_slots = std::stoi(parts[0]);
  s.local_free = std::stoi(parts[1]);
  s.neighbor_free = parts[2] == "-" ? StateKey::kNoNeighbor : std::stoi(parts[2]);
  s.rsu_in_range = parts[3] == "1";
  return s;
}

}  // namespace

void QTable::save(std::ostream& out) const {
  out << "state_key,action,q_value\n";
  for (const auto& [state, row] : rows_) {
    for (Action a : kAllActions) {
      out << to_string(state) << ',' << to_string(a) << ','
          << format_double(row[static_cast<std::size_t>(a)]) << '\n';
    }
  }
}

QTable QTable::load(std::istream& in) {
  QTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == "state_key,action,q_value") continue;
    std::istringstream ls(line);
    std::string key_text, action_text, value_text;
    if (!std::getline(ls, key_text, ',') ||
        !std::getline(ls, action_text, ',') ||
        !std::getline(ls, value_text))
      throw std::runtime_error("qtable line " + std::to_string(line_no) +
                               ": expected state_key,action,q_value");
    auto action = action_from_string(action_text);
    if (!action)
      throw std::runtime_error("qtable line " + std::to_string(line_no) +
                               ": unknown action '" + action_text + "'");
    table.set(parse_state_key(key_text, line_no), *action,
              std::stod(value_text));
  }
  return table;
}

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

StateKey discretize_state(const DeviceView& view, const AgentConfig& cfg) {
  StateKey s;
  const int cap = cfg.effective_elapsed_cap();
  s.elapsed_slots = std::clamp(round_half_up(view.elapsed_slots), 0, cap);
  const int free_max = round_half_up(cfg.capacity_mb);
  s.local_free = std::clamp(round_half_up(view.local_free_mb), 0, free_max);
  if (view.neighbor_free_mb)
    s.neighbor_free = std::clamp(round_half_up(*view.neighbor_free_mb), 0, free_max);
  else
    s.neighbor_free = StateKey::kNoNeighbor;
  s.rsu_in_range = view.rsu_in_range;
  return s;
}

double epsilon_at(double epsilon0, long t, long max_time) {
  assert(max_time > 0);
  const double frac = static_cast<double>(max_time - t) / static_cast<double>(max_time);
  return epsilon0 * std::max(0.0, frac);
}

Action select_action(const QTable& table, const StateKey& s, double epsilon,
                     Rng& rng) {
  if (rng.uniform() < epsilon)
    return kAllActions[rng.uniform_int(kAllActions.size())];
  Action best = kAllActions[0];
  double best_q = table.value(s, best);
  for (std::size_t i = 1; i < kAllActions.size(); ++i) {
    const double q = table.value(s, kAllActions[i]);
    if (q > best_q) {
      best = kAllActions[i];
      best_q = q;
    }
  }
  return best;
}

double reward(Action action, const DeviceView& post, double theta,
              const AgentConfig& cfg) {
  // Starvation and staleness override everything else.
  if (post.local_free_mb <= 0.0 ||
      post.elapsed_slots > static_cast<double>(cfg.delay_threshold_slots))
    return -cfg.penalty;

  const double denom = 1.0 + post.elapsed_slots;
  switch (action) {
    case Action::Keep:
      return 0.0;
    case Action::SendServer:
      return (theta * cfg.capacity_mb - post.local_free_mb) / denom;
    case Action::SendRsu:
      return (cfg.capacity_mb - theta * post.local_free_mb) / denom;
    case Action::SendNeighbor: {
      if (!post.neighbor_free_mb) return 0.0;
      const double dc = *post.neighbor_free_mb - post.local_free_mb;
      if (dc == 0.0) return 0.0;
      return (dc > 0.0 ? 1.0 : -1.0) / denom;
    }
  }
  return 0.0;
}

void update(QTable& table, const StateKey& s, Action a, double r,
            const StateKey& s_next, const AgentConfig& cfg) {
  const double old_q = table.value(s, a);
  const double target = r + cfg.gamma * table.max_value(s_next);
  table.set(s, a, (1.0 - cfg.alpha) * old_q + cfg.alpha * target);
}

}  // namespace vcsim
