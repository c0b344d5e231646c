#pragma once

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "abm/space/contract.hpp"

// A 1-D ring of n sites. Distance is the shorter way around.
class RingSpace {
 public:
  using Position = int;

  explicit RingSpace(int n) : sites_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(sites_.size()); }

  int distance(int a, int b) const {
    const int d = std::abs(a - b);
    return std::min(d, size() - d);
  }

  void register_agent(abm::AgentId id, int p) {
    auto& s = sites_.at(static_cast<std::size_t>(p));
    s.insert(std::lower_bound(s.begin(), s.end(), id), id);
  }

  void unregister_agent(abm::AgentId id, int p) {
    auto& s = sites_.at(static_cast<std::size_t>(p));
    s.erase(std::lower_bound(s.begin(), s.end(), id));
  }

  void update_position(abm::AgentId id, int from, int to) {
    unregister_agent(id, from);
    register_agent(id, to);
  }

  std::vector<abm::AgentId> neighbor_ids(int p, double r) const {
    std::vector<abm::AgentId> out;
    std::vector<int> seen;
    const int reach = std::min(static_cast<int>(r), size() / 2);
    for (int d = -reach; d <= reach; ++d) {
      const int q = ((p + d) % size() + size()) % size();
      if (std::find(seen.begin(), seen.end(), q) != seen.end()) continue;
      seen.push_back(q);
      const auto& s = sites_[static_cast<std::size_t>(q)];
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  }

  int random_position(abm::Rng& rng) const { return static_cast<int>(rng.next_below(sites_.size())); }

 private:
  std::vector<std::vector<abm::AgentId>> sites_;
};

static_assert(abm::SpaceContract<RingSpace>);
