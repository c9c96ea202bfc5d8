#pragma once

#include <array>
#include <cstddef>

namespace vcsim::fuzzy {

// Trapezoidal membership function over [0, 1] with breakpoints a <= b <= c <= d.
// Degenerate shoulders (a == b or c == d) are allowed; the plateau branch wins
// at a shared breakpoint so membership there is 1.
struct TrapezoidalMf {
  double a;
  double b;
  double c;
  double d;

  TrapezoidalMf(double a, double b, double c, double d);

  double membership(double x) const;

  // Centroid of the full (unclipped) area under the membership curve.
  double centroid() const;
};

enum class Level { Low, Medium, High };

inline constexpr std::array<Level, 3> kLevels = {Level::Low, Level::Medium,
                                                 Level::High};

const char* to_string(Level level);

// One linguistic variable with the three standard terms.
struct Variable {
  TrapezoidalMf low;
  TrapezoidalMf medium;
  TrapezoidalMf high;

  const TrapezoidalMf& term(Level level) const;
};

struct Rule {
  Level resource;  // antecedent on normalized free queue space
  Level elapsed;   // antecedent on normalized head-packet age
  Level theta;     // consequent
};

// Complete controller definition: two input variables, one output variable
// and the ordered rule list. Rule order matters: when several rules tie for
// the highest firing strength the earliest one wins.
struct RuleBase {
  Variable resource;
  Variable elapsed;
  Variable theta;
  std::array<Rule, 9> rules;

  static RuleBase defaults();
};

// Firing strength of every rule (min of the two antecedent memberships),
// in rule order. Inputs must already be normalized to [0, 1].
std::array<double, 9> fire_rules(double resource_norm, double elapsed_norm,
                                 const RuleBase& rb);

// Full inference pass: normalize, fire, pick the strongest rule and return
// the centroid of its consequent term. remaining is free queue space,
// capacity the queue size, elapsed the head-packet age in slots and
// delay_threshold the freshness bound in slots.
double compute_theta(double remaining, double capacity, double elapsed,
                     double delay_threshold, const RuleBase& rb);

}  // namespace vcsim::fuzzy
