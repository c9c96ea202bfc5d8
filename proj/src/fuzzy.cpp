#include "vcsim/fuzzy.hpp"

#include <algorithm>
#include <stdexcept>

namespace vcsim::fuzzy {

TrapezoidalMf::TrapezoidalMf(double a, double b, double c, double d)
    : a(a), b(b), c(c), d(d) {
  if (!(a <= b && b <= c && c <= d))
    throw std::invalid_argument("trapezoid breakpoints must be ordered");
  if (a < 0.0 || d > 1.0)
    throw std::invalid_argument("trapezoid breakpoints must lie in [0, 1]");
}

double TrapezoidalMf::membership(double x) const {
  // Plateau first so degenerate shoulders (a == b, c == d) resolve to 1
  // at the shared breakpoint instead of hitting a zero-width ramp.
  if (x >= b && x <= c) return 1.0;
  if (x <= a || x >= d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

double TrapezoidalMf::centroid() const {
  // Closed form per segment: rising ramp, plateau, falling ramp.
  //   area      = (b-a)/2          + (c-b)        + (d-c)/2
  //   integral  = (b-a)(a+2b)/6    + (c^2-b^2)/2  + (d-c)(2c+d)/6
  const double area = 0.5 * (b - a) + (c - b) + 0.5 * (d - c);
  if (area == 0.0) return 0.5 * (a + d);
  const double moment = (b - a) * (a + 2.0 * b) / 6.0 +
                        0.5 * (c * c - b * b) +
                        (d - c) * (2.0 * c + d) / 6.0;
  return moment / area;
}

const char* to_string(Level level) {
  switch (level) {
    case Level::Low: return "low";
    case Level::Medium: return "medium";
    case Level::High: return "high";
  }
  return "?";
}

const TrapezoidalMf& Variable::term(Level level) const {
  switch (level) {
    case Level::Low: return low;
    case Level::Medium: return medium;
    case Level::High: return high;
  }
  return low;
}

RuleBase RuleBase::defaults() {
  Variable resource{{0.0, 0.0, 0.2, 0.3}, {0.2, 0.3, 0.5, 0.6}, {0.5, 0.6, 1.0, 1.0}};
  Variable elapsed{{0.0, 0.0, 0.4, 0.5}, {0.4, 0.5, 0.7, 0.8}, {0.7, 0.8, 1.0, 1.0}};
  Variable theta{{0.0, 0.0, 0.3, 0.4}, {0.3, 0.4, 0.6, 0.7}, {0.6, 0.7, 1.0, 1.0}};
  std::array<Rule, 9> rules = {{
      {Level::Low, Level::Low, Level::Medium},
      {Level::Low, Level::Medium, Level::High},
      {Level::Low, Level::High, Level::High},
      {Level::Medium, Level::Low, Level::Low},
      {Level::Medium, Level::Medium, Level::Medium},
      {Level::Medium, Level::High, Level::High},
      {Level::High, Level::Low, Level::Low},
      {Level::High, Level::Medium, Level::Low},
      {Level::High, Level::High, Level::Medium},
  }};
  return RuleBase{resource, elapsed, theta, rules};
}

std::array<double, 9> fire_rules(double resource_norm, double elapsed_norm,
                                 const RuleBase& rb) {
  std::array<double, 9> strengths{};
  for (std::size_t i = 0; i < rb.rules.size(); ++i) {
    const Rule& r = rb.rules[i];
    strengths[i] = std::min(rb.resource.term(r.resource).membership(resource_norm),
                            rb.elapsed.term(r.elapsed).membership(elapsed_norm));
  }
  return strengths;
}

double compute_theta(double remaining, double capacity, double elapsed,
                     double delay_threshold, const RuleBase& rb) {
  const double c = std::clamp(remaining / capacity, 0.0, 1.0);
  const double e = std::clamp(elapsed / delay_threshold, 0.0, 1.0);
  const auto strengths = fire_rules(c, e, rb);
  std::size_t best = 0;
  for (std::size_t i = 1; i < strengths.size(); ++i)
    if (strengths[i] > strengths[best]) best = i;
  return rb.theta.term(rb.rules[best].theta).centroid();
}

}  // namespace vcsim::fuzzy
