#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "abm/agent.hpp"
#include "abm/errors.hpp"
#include "abm/rng.hpp"
#include "abm/schedule.hpp"
#include "abm/space/contract.hpp"
#include "abm/value.hpp"

namespace abm {

using Properties = std::map<std::string, Value, std::less<>>;
using PropertyArrays = std::map<std::string, std::vector<std::int64_t>, std::less<>>;

/// An agent-based model: the alive agents, the space they live in, model-level properties,
/// the activation scheduler, the random stream and the step counter.
///
/// Invariants: every alive agent is indexed exactly once by the space at its current position;
/// ids are issued in increasing order and never reused.
template <class Space>
class Model {
  static_assert(SpaceContract<Space>, "Space must implement the five space operations");

 public:
  using SpaceType = Space;
  using Position = typename Space::Position;
  using AgentType = Agent<Position>;
  using SchedulerType = Scheduler<Space>;
  using Registry = std::map<AgentId, AgentType>;

  Model(std::string name, Space space, Schema schema, Properties properties = {},
        SchedulerType scheduler = SchedulerType::fastest(), std::uint64_t seed = 0)
      : name_(std::move(name)),
        space_(std::move(space)),
        schema_(std::move(schema)),
        properties_(std::move(properties)),
        scheduler_(std::move(scheduler)),
        rng_(seed) {}

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const Space& space() const noexcept { return space_; }
  /// Mutable access for topology edits (graph nodes/edges). Agent indexing must go through the model.
  [[nodiscard]] Space& space_topology() noexcept { return space_; }
  [[nodiscard]] const Schema& schema() const noexcept { return schema_; }
  [[nodiscard]] const SchedulerType& scheduler() const noexcept { return scheduler_; }
  void set_scheduler(SchedulerType s) { scheduler_ = std::move(s); }
  [[nodiscard]] Rng& rng() noexcept { return rng_; }
  [[nodiscard]] const Rng& rng() const noexcept { return rng_; }
  void set_rng(const Rng& rng) noexcept { rng_ = rng; }

  [[nodiscard]] std::size_t step_count() const noexcept { return step_count_; }
  [[nodiscard]] std::int64_t next_id() const noexcept { return next_id_; }
  [[nodiscard]] bool model_step_first() const noexcept { return model_step_first_; }
  /// Run the model step before the agents instead of after them.
  void set_model_step_first(bool first) noexcept { model_step_first_ = first; }

  // --- properties ---------------------------------------------------------

  [[nodiscard]] const Properties& properties() const noexcept { return properties_; }
  [[nodiscard]] bool has_property(std::string_view name) const { return properties_.find(name) != properties_.end(); }

  [[nodiscard]] const Value& property(std::string_view name) const {
    auto it = properties_.find(name);
    if (it == properties_.end()) throw NotFound("model has no property '" + std::string(name) + "'");
    return it->second;
  }

  template <class T>
  [[nodiscard]] const T& get(std::string_view name) const {
    const auto& v = property(name);
    if (!std::holds_alternative<T>(v)) throw ContractViolation("property '" + std::string(name) + "' has another type");
    return std::get<T>(v);
  }

  template <class T>
  T& get(std::string_view name) {
    return const_cast<T&>(std::as_const(*this).template get<T>(name));
  }

  void set_property(std::string name, Value v) { properties_[std::move(name)] = std::move(v); }

  [[nodiscard]] const PropertyArrays& arrays() const noexcept { return arrays_; }
  std::vector<std::int64_t>& array(std::string_view name) {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) it = arrays_.emplace(std::string(name), std::vector<std::int64_t>{}).first;
    return it->second;
  }
  [[nodiscard]] const std::vector<std::int64_t>& array(std::string_view name) const {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) throw NotFound("model has no array '" + std::string(name) + "'");
    return it->second;
  }

  // --- registry -----------------------------------------------------------

  [[nodiscard]] const Registry& agents() const noexcept { return agents_; }
  [[nodiscard]] std::size_t agent_count() const noexcept { return agents_.size(); }
  [[nodiscard]] bool alive(AgentId id) const { return agents_.count(id) != 0; }

  [[nodiscard]] AgentType& agent(AgentId id) {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw NotFound("no alive agent with id " + std::to_string(id.value));
    return it->second;
  }
  [[nodiscard]] const AgentType& agent(AgentId id) const { return const_cast<Model&>(*this).agent(id); }

  /// Alive ids in ascending order.
  [[nodiscard]] std::vector<AgentId> ids() const {
    std::vector<AgentId> out;
    out.reserve(agents_.size());
    for (const auto& kv : agents_) out.push_back(kv.first);
    return out;
  }

  // --- adding -------------------------------------------------------------

  AgentType& add_agent(KindId kind, Props props, const Position& pos) {
    schema_.validate(kind, props);
    const Position p = canonical(pos);
    const AgentId id{next_id_++};
    auto [it, inserted] = agents_.emplace(id, AgentType{id, p, kind, std::move(props)});
    space_.register_agent(id, p);
    return it->second;
  }

  AgentType& add_agent_random(KindId kind, Props props) {
    const Position p = space_.random_position(rng_);
    return add_agent(kind, std::move(props), p);
  }

  /// Adds at a uniformly random empty position; throws NoEmptyPosition on a full space.
  AgentType& add_agent_single(KindId kind, Props props)
    requires HasEmptiness<Space>
  {
    auto p = space_.random_empty(rng_);
    if (!p) throw NoEmptyPosition{};
    return add_agent(kind, std::move(props), *p);
  }

  /// One new agent on every currently empty position, in the space's enumeration order.
  template <class Factory>
  std::size_t fill_space(KindId kind, Factory&& props_for)
    requires HasEmptiness<Space>
  {
    const auto empty = space_.empty_positions();
    for (const auto& p : empty) add_agent(kind, props_for(*this, p), p);
    return empty.size();
  }

  /// Restores an agent with an explicit id (checkpoint loading). The id must exceed every id issued so far.
  AgentType& restore_agent(AgentId id, KindId kind, Props props, const Position& pos) {
    if (id.value < next_id_) throw ContractViolation("restored agent ids must be increasing");
    next_id_ = id.value;
    return add_agent(kind, std::move(props), pos);
  }

  // --- moving -------------------------------------------------------------

  void move_agent(AgentType& agent, const Position& pos) {
    require_alive(agent);
    const Position p = canonical(pos);
    space_.update_position(agent.id_, agent.pos_, p);
    agent.pos_ = p;
  }

  /// Moves to a uniformly random empty position. Returns false, leaving the agent in place, when none exists.
  bool move_agent_single(AgentType& agent)
    requires HasEmptiness<Space>
  {
    require_alive(agent);
    auto p = space_.random_empty(rng_);
    if (!p) return false;
    move_agent(agent, *p);
    return true;
  }

  // --- killing ------------------------------------------------------------

  void kill_agent(AgentId id) {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw NotFound("no alive agent with id " + std::to_string(id.value));
    space_.unregister_agent(id, it->second.pos_);
    agents_.erase(it);
  }

  void kill_all() {
    for (const auto& [id, agent] : agents_) space_.unregister_agent(id, agent.pos_);
    agents_.clear();
  }

  template <class Pred>
  std::size_t kill_by(Pred&& pred) {
    std::vector<AgentId> doomed;
    for (const auto& [id, agent] : agents_)
      if (pred(agent)) doomed.push_back(id);
    for (AgentId id : doomed) kill_agent(id);
    return doomed.size();
  }

  /// Replaces the population by n draws with replacement, probability proportional to weight.
  /// Draw i picks the first agent (ascending id) whose cumulative weight exceeds u * total,
  /// u = next_float(). Clones get fresh ids and keep their source's kind, props and position.
  template <class Weight>
  void sample_agents(std::size_t n, Weight&& weight) {
    std::vector<const AgentType*> pool;
    std::vector<double> cumulative;
    double total = 0;
    for (const auto& [id, agent] : agents_) {
      const double w = weight(agent);
      if (!(w >= 0)) throw ContractViolation("sampling weights must be non-negative");
      total += w;
      pool.push_back(&agent);
      cumulative.push_back(total);
    }
    if (!(total > 0)) throw DegenerateWeights{};
    std::vector<AgentType> drawn;
    drawn.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng_.next_float() * total;
      const auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      drawn.push_back(*pool[std::min(k, pool.size() - 1)]);
    }
    kill_all();
    for (auto& a : drawn) add_agent(a.kind_, std::move(a.props), a.pos_);
  }

  // --- neighborhoods ------------------------------------------------------

  [[nodiscard]] std::vector<AgentId> nearby_ids(const Position& pos, double r) const {
    if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
    return space_.neighbor_ids(pos, r);
  }

  /// Ids within r of the agent, the agent itself excluded.
  [[nodiscard]] std::vector<AgentId> nearby_ids(const AgentType& agent, double r) const {
    auto ids = nearby_ids(agent.pos_, r);
    std::erase(ids, agent.id_);
    return ids;
  }

  [[nodiscard]] std::vector<AgentType*> nearby_agents(const AgentType& agent, double r) {
    std::vector<AgentType*> out;
    for (AgentId id : nearby_ids(agent, r)) out.push_back(&agents_.at(id));
    return out;
  }

  /// Positions within r of pos, pos itself excluded.
  [[nodiscard]] std::vector<Position> nearby_positions(const Position& pos, double r) const
    requires HasPositionNeighbors<Space>
  {
    if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
    return space_.neighbor_positions(pos, r);
  }

  // --- bookkeeping --------------------------------------------------------

  void advance_step_count() noexcept { ++step_count_; }
  void restore_counters(std::size_t step_count, std::int64_t next_id) {
    step_count_ = step_count;
    if (next_id < next_id_) throw ContractViolation("next_id must not decrease");
    next_id_ = next_id;
  }

  /// Console-style summary: agent count, space, scheduler, properties.
  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os << "AgentBasedModel with " << agents_.size() << " agents of kind ";
    for (std::size_t k = 0; k < schema_.kinds().size(); ++k) os << (k ? ", " : "") << schema_.kinds()[k].name;
    os << "\n space: ";
    if constexpr (Describable<Space>) os << space_.describe();
    else os << "custom space";
    os << "\n scheduler: " << scheduler_.name() << "\n properties: ";
    bool first = true;
    for (const auto& [k, v] : properties_) {
      os << (first ? "" : ", ") << k << " => " << to_string(v);
      first = false;
    }
    return os.str();
  }

 private:
  Position canonical(const Position& pos) const {
    if constexpr (NormalizesPositions<Space>) return space_.normalize(pos);
    else return pos;
  }

  void require_alive(const AgentType& agent) const {
    auto it = agents_.find(agent.id_);
    if (it == agents_.end() || &it->second != &agent) throw ContractViolation("agent is not alive in this model");
  }

  std::string name_;
  Space space_;
  Schema schema_;
  Properties properties_;
  PropertyArrays arrays_;
  SchedulerType scheduler_;
  Rng rng_;
  Registry agents_;
  std::size_t step_count_ = 0;
  std::int64_t next_id_ = 1;
  bool model_step_first_ = false;
};

/// Agent and model dynamics. Either may be left empty (no-op).
/// An agent step that kills its own agent must not touch the agent afterwards.
template <class ModelT>
struct StepFunctions {
  std::function<void(typename ModelT::AgentType&, ModelT&)> agent_step;
  std::function<void(ModelT&)> model_step;
};

/// Stop condition: called with the model and the number of steps taken so far in this call.
template <class ModelT>
using Until = std::function<bool(const ModelT&, std::size_t)>;

/// One step: schedule over the agents alive now, activate each one still alive, run the model
/// step (after the agents unless model_step_first), advance the counter.
/// Agents added during the step are not activated until the next one.
template <class ModelT>
void step_once(ModelT& model, const StepFunctions<ModelT>& fns) {
  if (model.model_step_first() && fns.model_step) fns.model_step(model);
  if (fns.agent_step) {
    const auto order = model.scheduler()(model);
    for (AgentId id : order) {
      auto it = model.agents().find(id);
      if (it == model.agents().end()) continue;
      fns.agent_step(const_cast<typename ModelT::AgentType&>(it->second), model);
    }
  }
  if (!model.model_step_first() && fns.model_step) fns.model_step(model);
  model.advance_step_count();
}

template <class ModelT>
void step(ModelT& model, const StepFunctions<ModelT>& fns, std::size_t n = 1) {
  for (std::size_t s = 0; s < n; ++s) step_once(model, fns);
}

/// Steps until `until(model, s)` returns true, s counting the steps taken by this call.
template <class ModelT>
std::size_t step(ModelT& model, const StepFunctions<ModelT>& fns, const Until<ModelT>& until) {
  std::size_t s = 0;
  while (!until(model, s)) {
    step_once(model, fns);
    ++s;
  }
  return s;
}

}  // namespace abm
