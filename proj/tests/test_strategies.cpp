#include "vcsim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "checks.hpp"

using namespace vcsim;

namespace {

Observation base_obs() {
  Observation o;
  o.device_id = 0;
  o.slot = 10;
  o.head = HeadPacket{1, 8, 1.0};
  o.elapsed_slots = 2.0;
  o.local_free_mb = 20.0;
  return o;
}

NeighborInfo neighbor_at(double dist, double free, double rsu_dist) {
  NeighborInfo n;
  n.device_id = 3;
  n.distance_m = dist;
  n.free_mb = free;
  n.rsu_distance_m = rsu_dist;
  return n;
}

}  // namespace

static void test_greedy() {
  // RSU contact always wins.
  Observation o = base_obs();
  o.rsu = RsuContact{0, 120.0};
  o.self_rsu_distance_m = 120.0;
  o.neighbor = neighbor_at(10.0, 25.0, 5.0);
  CHECK(greedy_decide(o) == Action::SendRsu);

  // No RSU contact, neighbor strictly nearer to one: relay.
  o = base_obs();
  o.self_rsu_distance_m = 900.0;
  o.neighbor = neighbor_at(30.0, 25.0, 400.0);
  CHECK(greedy_decide(o) == Action::SendNeighbor);

  // Neighbor in range but not nearer: upload.
  o.neighbor = neighbor_at(30.0, 25.0, 1500.0);
  CHECK(greedy_decide(o) == Action::SendServer);
  o.neighbor = neighbor_at(30.0, 25.0, 900.0);  // equal distance is not nearer
  CHECK(greedy_decide(o) == Action::SendServer);

  // Nobody around at all.
  o = base_obs();
  o.self_rsu_distance_m = 900.0;
  CHECK(greedy_decide(o) == Action::SendServer);

  // Pure function of the observation, and it never keeps.
  Rng rng(42);
  for (int i = 0; i < 5000; ++i) {
    Observation r = base_obs();
    r.slot = static_cast<long>(rng.uniform_int(1000));
    r.local_free_mb = rng.uniform(0.0, 25.0);
    if (rng.uniform() < 0.5) {
      r.self_rsu_distance_m = rng.uniform(0.0, 2000.0);
      if (*r.self_rsu_distance_m <= 250.0)
        r.rsu = RsuContact{0, *r.self_rsu_distance_m};
    }
    if (rng.uniform() < 0.5)
      r.neighbor = neighbor_at(rng.uniform(0.0, 40.0), rng.uniform(0.0, 25.0),
                               rng.uniform(0.0, 2000.0));
    const Action first = greedy_decide(r);
    CHECK(first == greedy_decide(r));
    CHECK(first != Action::Keep);
  }

  GreedyStrategy strategy;
  Rng unused(1);
  o = base_obs();
  o.rsu = RsuContact{2, 100.0};
  CHECK(strategy.decide(o, unused) == Action::SendRsu);
}

static void test_fp_validation() {
  validate(FpConfig{0.1, 0.7, 0.1, 0.1});
  validate(FpConfig{0.0, 1.0, 0.0, 0.0});

  bool threw = false;
  try {
    validate(FpConfig{-0.1, 0.9, 0.1, 0.1});
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK(threw);

  threw = false;
  try {
    validate(FpConfig{0.3, 0.3, 0.3, 0.3});
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK(threw);
}

static void test_fp_frequencies() {
  // Draw frequencies match the configured distribution within 3 sigma.
  const FpConfig fp{0.1, 0.5, 0.3, 0.1};
  FixedProbabilityStrategy strategy(fp);
  const Observation o = base_obs();  // no contacts; draws must not care
  const int kDraws = 10000;
  int counts[4] = {0, 0, 0, 0};
  Rng rng(2025);
  for (int i = 0; i < kDraws; ++i)
    ++counts[static_cast<int>(strategy.decide(o, rng))];
  const double expected[4] = {fp.p_keep, fp.p_server, fp.p_rsu, fp.p_sensor};
  for (int a = 0; a < 4; ++a) {
    const double mean = kDraws * expected[a];
    const double sigma = std::sqrt(kDraws * expected[a] * (1.0 - expected[a]));
    CHECK(std::fabs(counts[a] - mean) <= 3.0 * sigma);
  }
  // The rsu/sensor draws above were all infeasible (no contacts); decide
  // reports them anyway and leaves miss handling to execution.
  CHECK(counts[2] > 0);
  CHECK(counts[3] > 0);
}

static void test_fuzzyq() {
  AgentConfig cfg;
  cfg.max_time = 100;

  // Past max_time exploration is off; an empty table ties toward keep.
  FuzzyQStrategy agent(cfg, fuzzy::RuleBase::defaults());
  Observation o = base_obs();
  o.slot = 100;
  Rng rng(9);
  CHECK(agent.decide(o, rng) == Action::Keep);

  // A starved post-state burns the penalty into the visited entry:
  // Q = 0.5 * (-100 + 0.9 * 0) = -50.
  Transition t;
  t.before = base_obs();
  t.action = Action::Keep;
  t.outcome = ExecOutcome::Kept;
  t.after = base_obs();
  t.after.local_free_mb = 0.0;
  t.after.elapsed_slots = 3.0;
  agent.on_outcome(t);
  const StateKey s = discretize_state(to_device_view(t.before), agent.config());
  CHECK(agent.table().value(s, Action::Keep) == -50.0);

  // After the hit, keep is no longer the argmax in that state.
  o = base_obs();
  o.slot = 100;
  CHECK(agent.decide(o, rng) != Action::Keep);

  // Identical transition streams produce identical tables.
  FuzzyQStrategy a1(cfg, fuzzy::RuleBase::defaults());
  FuzzyQStrategy a2(cfg, fuzzy::RuleBase::defaults());
  Rng gen(321);
  for (int i = 0; i < 500; ++i) {
    Transition tr;
    tr.before = base_obs();
    tr.before.local_free_mb = std::floor(gen.uniform(1.0, 26.0));
    tr.before.elapsed_slots = std::floor(gen.uniform(0.0, 12.0));
    tr.action = kAllActions[gen.uniform_int(4)];
    tr.after = tr.before;
    tr.after.local_free_mb =
        std::max(0.0, tr.before.local_free_mb - std::floor(gen.uniform(0.0, 3.0)));
    a1.on_outcome(tr);
    a2.on_outcome(tr);
  }
  std::ostringstream s1, s2;
  a1.table().save(s1);
  a2.table().save(s2);
  CHECK(s1.str() == s2.str());

  bool threw = false;
  try {
    AgentConfig bad;
    bad.max_time = 0;
    FuzzyQStrategy invalid(bad, fuzzy::RuleBase::defaults());
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK(threw);
}

static void test_to_device_view() {
  Observation o = base_obs();
  o.neighbor = neighbor_at(12.0, 7.0, 600.0);
  o.rsu = RsuContact{1, 200.0};
  const DeviceView v = to_device_view(o);
  CHECK(v.elapsed_slots == 2.0);
  CHECK(v.local_free_mb == 20.0);
  CHECK(v.neighbor_free_mb && *v.neighbor_free_mb == 7.0);
  CHECK(v.rsu_in_range);

  const DeviceView bare = to_device_view(base_obs());
  CHECK(!bare.neighbor_free_mb);
  CHECK(!bare.rsu_in_range);
}

int main() {
  test_greedy();
  test_fp_validation();
  test_fp_frequencies();
  test_fuzzyq();
  test_to_device_view();
  std::puts("test_strategies: all checks passed");
  return 0;
}
