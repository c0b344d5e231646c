#include <algorithm>
#include <deque>
#include <sstream>

#include "abm/space/graph.hpp"

namespace abm {

GraphSpace::GraphSpace(std::size_t nodes) : alive_(nodes, true), out_(nodes), ids_(nodes) {}

NodeId GraphSpace::add_node() {
  alive_.push_back(true);
  out_.emplace_back();
  ids_.emplace_back();
  return static_cast<NodeId>(alive_.size() - 1);
}

void GraphSpace::check(NodeId n) const {
  if (!has_node(n)) throw ContractViolation("node " + std::to_string(n) + " does not exist");
}

bool GraphSpace::has_node(NodeId n) const noexcept {
  return n >= 0 && static_cast<std::size_t>(n) < alive_.size() && alive_[static_cast<std::size_t>(n)];
}

void GraphSpace::remove_node(NodeId n) {
  check(n);
  if (!ids_[static_cast<std::size_t>(n)].empty())
    throw OccupiedNode("node " + std::to_string(n) + " is occupied and cannot be removed");
  alive_[static_cast<std::size_t>(n)] = false;
  out_[static_cast<std::size_t>(n)].clear();
  for (auto& edges : out_) {
    auto it = std::lower_bound(edges.begin(), edges.end(), n);
    if (it != edges.end() && *it == n) edges.erase(it);
  }
}

void GraphSpace::add_edge(NodeId from, NodeId to) {
  check(from);
  check(to);
  auto& edges = out_[static_cast<std::size_t>(from)];
  auto it = std::lower_bound(edges.begin(), edges.end(), to);
  if (it == edges.end() || *it != to) edges.insert(it, to);
}

void GraphSpace::add_undirected_edge(NodeId a, NodeId b) {
  add_edge(a, b);
  add_edge(b, a);
}

void GraphSpace::remove_edge(NodeId from, NodeId to) {
  check(from);
  auto& edges = out_[static_cast<std::size_t>(from)];
  auto it = std::lower_bound(edges.begin(), edges.end(), to);
  if (it != edges.end() && *it == to) edges.erase(it);
}

bool GraphSpace::has_edge(NodeId from, NodeId to) const {
  if (!has_node(from)) return false;
  const auto& edges = out_[static_cast<std::size_t>(from)];
  return std::binary_search(edges.begin(), edges.end(), to);
}

const std::vector<NodeId>& GraphSpace::out_neighbors(NodeId n) const {
  check(n);
  return out_[static_cast<std::size_t>(n)];
}

std::vector<NodeId> GraphSpace::nodes() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < alive_.size(); ++i)
    if (alive_[i]) out.push_back(static_cast<NodeId>(i));
  return out;
}

std::size_t GraphSpace::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : out_) n += e.size();
  return n;
}

GraphSpace::Position GraphSpace::normalize(Position p) const {
  check(p);
  return p;
}

void GraphSpace::register_agent(AgentId id, Position p) {
  check(p);
  auto& ids = ids_[static_cast<std::size_t>(p)];
  ids.insert(std::lower_bound(ids.begin(), ids.end(), id), id);
}

void GraphSpace::unregister_agent(AgentId id, Position p) {
  check(p);
  auto& ids = ids_[static_cast<std::size_t>(p)];
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) throw NotFound("agent not indexed on node " + std::to_string(p));
  ids.erase(it);
}

void GraphSpace::update_position(AgentId id, Position from, Position to) {
  if (from == to) return;
  unregister_agent(id, from);
  register_agent(id, to);
}

template <class F>
void GraphSpace::bfs(NodeId origin, int hops, F&& f) const {
  check(origin);
  std::vector<int> depth(alive_.size(), -1);
  std::deque<NodeId> queue{origin};
  depth[static_cast<std::size_t>(origin)] = 0;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    f(n);
    const int dn = depth[static_cast<std::size_t>(n)];
    if (dn == hops) continue;
    for (NodeId m : out_[static_cast<std::size_t>(n)]) {
      if (depth[static_cast<std::size_t>(m)] >= 0) continue;
      depth[static_cast<std::size_t>(m)] = dn + 1;
      queue.push_back(m);
    }
  }
}

std::vector<AgentId> GraphSpace::neighbor_ids(Position p, double r) const {
  if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
  std::vector<AgentId> out;
  bfs(p, static_cast<int>(std::floor(r)), [&](NodeId n) {
    const auto& ids = ids_[static_cast<std::size_t>(n)];
    out.insert(out.end(), ids.begin(), ids.end());
  });
  return out;
}

std::vector<GraphSpace::Position> GraphSpace::neighbor_positions(Position p, double r) const {
  if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
  std::vector<Position> out;
  bfs(p, static_cast<int>(std::floor(r)), [&](NodeId n) {
    if (n != p) out.push_back(n);
  });
  return out;
}

GraphSpace::Position GraphSpace::random_position(Rng& rng) const {
  const auto alive = nodes();
  if (alive.empty()) throw ContractViolation("graph has no nodes");
  return alive[rng.next_below(alive.size())];
}

const std::vector<AgentId>& GraphSpace::ids_in(Position p) const {
  check(p);
  return ids_[static_cast<std::size_t>(p)];
}

bool GraphSpace::is_empty(Position p) const { return ids_in(p).empty(); }

std::vector<GraphSpace::Position> GraphSpace::empty_positions() const {
  std::vector<Position> out;
  for (std::size_t i = 0; i < alive_.size(); ++i)
    if (alive_[i] && ids_[i].empty()) out.push_back(static_cast<NodeId>(i));
  return out;
}

std::optional<GraphSpace::Position> GraphSpace::random_empty(Rng& rng) const {
  const auto empty = empty_positions();
  if (empty.empty()) return std::nullopt;
  return empty[rng.next_below(empty.size())];
}

std::string GraphSpace::describe() const {
  std::ostringstream os;
  os << "GraphSpace with " << nodes().size() << " nodes and " << edge_count() << " edges";
  return os.str();
}

}  // namespace abm
