#pragma once

#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "abm/agent.hpp"
#include "abm/rng.hpp"

namespace abm {

/// The five operations a space must supply to plug into Model. Everything else a model
/// offers (adding, moving, killing, neighbor queries, scheduling, collection) is built on these.
///
///   register_agent(id, pos)         index a new agent at pos
///   unregister_agent(id, pos)       drop it from the index
///   update_position(id, old, new)   re-index after a move
///   neighbor_ids(pos, r)            ids whose position lies within distance r of pos (inclusive)
///   random_position(rng)            a uniformly drawn valid position
template <class S>
concept SpaceContract = requires(S& s, const S& cs, AgentId id, const typename S::Position& p, double r, Rng& rng) {
  typename S::Position;
  s.register_agent(id, p);
  s.unregister_agent(id, p);
  s.update_position(id, p, p);
  { cs.neighbor_ids(p, r) } -> std::convertible_to<std::vector<AgentId>>;
  { cs.random_position(rng) } -> std::convertible_to<typename S::Position>;
};

/// Optional: spaces with a notion of "empty position" (grid, graph).
template <class S>
concept HasEmptiness = SpaceContract<S> && requires(const S& cs, const typename S::Position& p, Rng& rng) {
  { cs.is_empty(p) } -> std::convertible_to<bool>;
  { cs.empty_positions() } -> std::convertible_to<std::vector<typename S::Position>>;
  { cs.random_empty(rng) } -> std::convertible_to<std::optional<typename S::Position>>;
};

/// Optional: spaces with discrete positions that can enumerate the positions around one.
template <class S>
concept HasPositionNeighbors = SpaceContract<S> && requires(const S& cs, const typename S::Position& p, double r) {
  { cs.neighbor_positions(p, r) } -> std::convertible_to<std::vector<typename S::Position>>;
};

/// Optional: validates a position (throwing ContractViolation) and maps it to canonical form,
/// e.g. wrapping on a periodic domain.
template <class S>
concept NormalizesPositions = SpaceContract<S> && requires(const S& cs, const typename S::Position& p) {
  { cs.normalize(p) } -> std::convertible_to<typename S::Position>;
};

template <class S>
concept Describable = requires(const S& cs) {
  { cs.describe() } -> std::convertible_to<std::string>;
};

}  // namespace abm
