#pragma once

#include <algorithm>
#include <cmath>

#include "abm/models/schelling.hpp"

namespace tuning {

inline constexpr std::size_t kCap = 100;

/// Steps until 90% of agents are happy (kCap + 1 if never), averaged over seeds 1..5.
inline double steps_to_settle(std::int64_t min_to_be_happy) {
  abm::schelling::Config cfg;
  cfg.min_to_be_happy = min_to_be_happy;
  const auto fns = abm::schelling::step_functions();
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = abm::schelling::make(cfg, seed);
    std::size_t steps = kCap + 1;
    for (std::size_t s = 1; s <= kCap; ++s) {
      abm::step_once(m, fns);
      std::size_t happy = 0;
      for (const auto& [id, a] : m.agents()) happy += a[abm::schelling::mood];
      if (10 * happy >= 9 * m.agent_count()) {
        steps = s;
        break;
      }
    }
    total += double(steps);
  }
  return total / 5;
}

inline std::int64_t as_setting(double x) { return std::clamp<std::int64_t>(std::llround(x), 0, 8); }

}  // namespace tuning
