#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "abm/agent.hpp"
#include "abm/errors.hpp"

namespace abm {

/// Activation-order policy, evaluated afresh at the start of every step.
///
///   fastest      ascending id (insertion order)
///   random       ascending ids shuffled with the model rng
///   by_property  stable sort on a field; ties keep ascending id
///   by_type      listed kinds first in the given order, remaining kinds after in schema order;
///                ids within a kind ascending, or shuffled when shuffle_within
///   filtered     the base policy's order with agents failing the predicate removed
///   custom       any function of the model
template <class Space>
class Scheduler {
 public:
  using ModelT = Model<Space>;
  using AgentT = Agent<typename Space::Position>;
  using Predicate = std::function<bool(const AgentT&, const ModelT&)>;
  using CustomFn = std::function<std::vector<AgentId>(ModelT&)>;

  static Scheduler fastest() { return Scheduler{Fastest{}}; }
  static Scheduler random() { return Scheduler{Random{}}; }
  static Scheduler by_property(std::string field, bool ascending = true) {
    return Scheduler{ByProperty{std::move(field), ascending}};
  }
  static Scheduler by_type(std::vector<std::string> kinds, bool shuffle_within) {
    return Scheduler{ByType{std::move(kinds), shuffle_within}};
  }
  static Scheduler filtered(Predicate keep, Scheduler base) {
    return Scheduler{Filtered{std::move(keep), std::make_shared<const Scheduler>(std::move(base))}};
  }
  static Scheduler custom(std::string name, CustomFn fn) { return Scheduler{Custom{std::move(name), std::move(fn)}}; }

  /// Activation order over the agents alive right now.
  std::vector<AgentId> operator()(ModelT& model) const {
    return std::visit([&](const auto& p) { return order(p, model); }, policy_);
  }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& p) -> std::string {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, Fastest>) return "fastest";
          else if constexpr (std::is_same_v<P, Random>) return "random";
          else if constexpr (std::is_same_v<P, ByProperty>) return "by_property(" + p.field + (p.ascending ? ")" : ", descending)");
          else if constexpr (std::is_same_v<P, ByType>) return p.shuffle_within ? "by_type(shuffled)" : "by_type";
          else if constexpr (std::is_same_v<P, Filtered>) return "filtered(" + p.base->name() + ")";
          else return "custom(" + p.name + ")";
        },
        policy_);
  }

 private:
  struct Fastest {};
  struct Random {};
  struct ByProperty {
    std::string field;
    bool ascending;
  };
  struct ByType {
    std::vector<std::string> kinds;
    bool shuffle_within;
  };
  struct Filtered {
    Predicate keep;
    std::shared_ptr<const Scheduler> base;
  };
  struct Custom {
    std::string name;
    CustomFn fn;
  };
  using Policy = std::variant<Fastest, Random, ByProperty, ByType, Filtered, Custom>;

  explicit Scheduler(Policy p) : policy_(std::move(p)) {}

  static std::vector<AgentId> order(const Fastest&, ModelT& model) { return model.ids(); }

  static std::vector<AgentId> order(const Random&, ModelT& model) {
    auto ids = model.ids();
    model.rng().shuffle(ids);
    return ids;
  }

  static std::vector<AgentId> order(const ByProperty& p, ModelT& model) {
    struct Keyed {
      AgentId id;
      const Value* key;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(model.agent_count());
    for (const auto& [id, agent] : model.agents()) {
      auto idx = model.schema().field_index(agent.kind(), p.field);
      if (!idx) throw ContractViolation("by_property scheduler: agent kind lacks field '" + p.field + "'");
      keyed.push_back({id, &agent.props[*idx]});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
      return p.ascending ? value_less(*a.key, *b.key) : value_less(*b.key, *a.key);
    });
    std::vector<AgentId> ids;
    ids.reserve(keyed.size());
    for (const auto& k : keyed) ids.push_back(k.id);
    return ids;
  }

  static std::vector<AgentId> order(const ByType& p, ModelT& model) {
    const auto& schema = model.schema();
    std::vector<KindId> kinds;
    for (const auto& name : p.kinds) kinds.push_back(schema.kind_id(name));
    for (KindId k = 0; k < schema.kinds().size(); ++k)
      if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    std::vector<AgentId> out;
    out.reserve(model.agent_count());
    for (KindId k : kinds) {
      std::vector<AgentId> group;
      for (const auto& [id, agent] : model.agents())
        if (agent.kind() == k) group.push_back(id);
      if (p.shuffle_within) model.rng().shuffle(group);
      out.insert(out.end(), group.begin(), group.end());
    }
    return out;
  }

  static std::vector<AgentId> order(const Filtered& p, ModelT& model) {
    auto ids = (*p.base)(model);
    std::erase_if(ids, [&](AgentId id) { return !p.keep(model.agent(id), model); });
    return ids;
  }

  static std::vector<AgentId> order(const Custom& p, ModelT& model) {
    auto ids = p.fn(model);
#ifndef NDEBUG
    std::unordered_set<AgentId> seen;
    for (AgentId id : ids) {
      if (!model.alive(id)) throw ContractViolation("custom scheduler returned a dead id");
      if (!seen.insert(id).second) throw ContractViolation("custom scheduler returned a duplicate id");
    }
#endif
    return ids;
  }

  Policy policy_;
};

}  // namespace abm
