#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abm/agent.hpp"
#include "abm/rng.hpp"

namespace abm {

using NodeId = std::int64_t;

/// Directed graph whose nodes are positions. Nodes and edges may be added and removed at
/// runtime; removed node ids are never reused. Distance is the directed hop count.
class GraphSpace {
 public:
  using Position = NodeId;

  explicit GraphSpace(std::size_t nodes = 0);

  NodeId add_node();
  /// Removes an empty node and its incident edges. Throws OccupiedNode when agents reside on it.
  void remove_node(NodeId n);
  void add_edge(NodeId from, NodeId to);
  /// Adds both directions.
  void add_undirected_edge(NodeId a, NodeId b);
  void remove_edge(NodeId from, NodeId to);

  [[nodiscard]] bool has_node(NodeId n) const noexcept;
  [[nodiscard]] bool has_edge(NodeId from, NodeId to) const;
  [[nodiscard]] const std::vector<NodeId>& out_neighbors(NodeId n) const;
  /// Alive nodes in ascending order.
  [[nodiscard]] std::vector<NodeId> nodes() const;
  [[nodiscard]] std::size_t node_slots() const noexcept { return alive_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept;

  [[nodiscard]] Position normalize(Position p) const;

  void register_agent(AgentId id, Position p);
  void unregister_agent(AgentId id, Position p);
  void update_position(AgentId id, Position from, Position to);
  /// Ids on nodes reachable from p in at most floor(r) directed hops, p included.
  [[nodiscard]] std::vector<AgentId> neighbor_ids(Position p, double r) const;
  [[nodiscard]] Position random_position(Rng& rng) const;

  /// Nodes at hop distance 1..floor(r), in breadth-first order.
  [[nodiscard]] std::vector<Position> neighbor_positions(Position p, double r) const;

  [[nodiscard]] const std::vector<AgentId>& ids_in(Position p) const;
  [[nodiscard]] bool is_empty(Position p) const;
  [[nodiscard]] std::vector<Position> empty_positions() const;
  /// The k-th empty node in ascending order, k = next_below(#empty).
  [[nodiscard]] std::optional<Position> random_empty(Rng& rng) const;

  [[nodiscard]] std::string describe() const;

 private:
  void check(NodeId n) const;
  /// Breadth-first layers up to `hops`; calls f(node) for each reached node, origin first.
  template <class F>
  void bfs(NodeId origin, int hops, F&& f) const;

  std::vector<bool> alive_;
  std::vector<std::vector<NodeId>> out_;  // sorted
  std::vector<std::vector<AgentId>> ids_;  // sorted
};

}  // namespace abm
