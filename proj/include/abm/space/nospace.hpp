#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "abm/agent.hpp"
#include "abm/rng.hpp"

namespace abm {

/// Space for models whose agents have no location. Every agent is at distance zero from every other.
class NoSpace {
 public:
  struct Position {
    friend bool operator==(const Position&, const Position&) = default;
  };

  void register_agent(AgentId id, Position) { ids_.insert(std::lower_bound(ids_.begin(), ids_.end(), id), id); }
  void unregister_agent(AgentId id, Position) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) throw NotFound("agent not indexed");
    ids_.erase(it);
  }
  void update_position(AgentId, Position, Position) {}
  [[nodiscard]] std::vector<AgentId> neighbor_ids(Position, double r) const {
    if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
    return ids_;
  }
  [[nodiscard]] Position random_position(Rng&) const { return {}; }

  [[nodiscard]] std::string describe() const { return "no space"; }

 private:
  std::vector<AgentId> ids_;
};

}  // namespace abm
