#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "abm/collect.hpp"
#include "abm/persist.hpp"
#include "abm/registry.hpp"

namespace abm {

/// The model-specific pieces a Simulation needs beyond the model itself.
template <class ModelT>
struct Bindings {
  using AgentT = typename ModelT::AgentType;
  using AgentFn = typename AgentCollector<ModelT>::SourceFn;
  using FilterFn = typename AgentCollector<ModelT>::FilterFn;
  using ModelFn = typename ModelCollector<ModelT>::SourceFn;

  StepFunctions<ModelT> fns;
  typename ModelT::SchedulerType scheduler = ModelT::SchedulerType::fastest();
  std::map<std::string, AgentFn, std::less<>> agent_functions;
  std::map<std::string, FilterFn, std::less<>> filters;
  std::map<std::string, ModelFn, std::less<>> model_functions;
  std::function<AgentGlyph(const AgentT&, const ModelT&)> glyph;
  std::function<std::optional<HeatGrid>(const ModelT&)> heat;
  std::function<bool(const ModelT&)> finished;
};

namespace detail {

template <class ModelT>
std::optional<AgentCollector<ModelT>> plain_source(std::string_view name, const ModelT& model, const Bindings<ModelT>& b) {
  if (auto it = b.agent_functions.find(name); it != b.agent_functions.end())
    return AgentCollector<ModelT>::function(std::string(name), it->second);
  if (model.schema().declares(name)) return AgentCollector<ModelT>::property(std::string(name));
  return std::nullopt;
}

}  // namespace detail

/// Resolves an agent collector name: `<source>` or `<aggregator>_<source>[_<filter>]`.
template <class ModelT>
std::optional<AgentCollector<ModelT>> parse_agent_collector(std::string_view name, const ModelT& model,
                                                            const Bindings<ModelT>& b) {
  if (auto c = detail::plain_source(name, model, b)) return c;
  const auto us = name.find('_');
  if (us == std::string_view::npos) return std::nullopt;
  const auto agg = aggregate::by_name(name.substr(0, us));
  if (!agg) return std::nullopt;
  const auto rest = name.substr(us + 1);
  if (auto c = detail::plain_source(rest, model, b)) return c->aggregated(*agg);
  const auto split = rest.rfind('_');
  if (split == std::string_view::npos) return std::nullopt;
  const auto filter = b.filters.find(rest.substr(split + 1));
  if (filter == b.filters.end()) return std::nullopt;
  if (auto c = detail::plain_source(rest.substr(0, split), model, b))
    return c->aggregated(*agg).where(filter->first, filter->second);
  return std::nullopt;
}

template <class ModelT>
std::optional<ModelCollector<ModelT>> parse_model_collector(std::string_view name, const ModelT& model,
                                                            const Bindings<ModelT>& b) {
  if (auto it = b.model_functions.find(name); it != b.model_functions.end())
    return ModelCollector<ModelT>::function(std::string(name), it->second);
  if (model.has_property(name)) return ModelCollector<ModelT>::property(std::string(name));
  return std::nullopt;
}

template <class ModelT>
class BoundSimulation final : public Simulation {
 public:
  BoundSimulation(ModelT model, Bindings<ModelT> bindings) : model_(std::move(model)), b_(std::move(bindings)) {}

  [[nodiscard]] ModelT& model() noexcept { return model_; }
  [[nodiscard]] const ModelT& model() const noexcept { return model_; }

  [[nodiscard]] const std::string& model_name() const override { return model_.name(); }
  [[nodiscard]] std::size_t step_count() const override { return model_.step_count(); }
  [[nodiscard]] std::size_t agent_count() const override { return model_.agent_count(); }
  void step(std::size_t n) override { abm::step(model_, b_.fns, n); }
  std::size_t step_until_finished(std::size_t n) override {
    return abm::step(model_, b_.fns, Until<ModelT>{[&](const ModelT& m, std::size_t s) { return s >= n || finished_(m); }});
  }
  [[nodiscard]] bool finished() const override { return finished_(model_); }

  RunResult run(std::size_t n, const std::vector<std::string>& adata, const std::vector<std::string>& mdata,
                std::size_t when) override {
    auto [a, m] = resolve(adata, mdata);
    return abm::run(model_, b_.fns, n, std::move(a), std::move(m), when);
  }

  void validate_collectors(const std::vector<std::string>& adata, const std::vector<std::string>& mdata) const override {
    auto [a, m] = resolve(adata, mdata);
    Recorder<ModelT> check(model_, std::move(a), std::move(m));
  }

  [[nodiscard]] std::vector<Value> sample(const std::vector<std::string>& names) const override {
    std::vector<Value> out;
    for (const auto& name : names) {
      if (auto m = parse_model_collector(name, model_, b_)) {
        out.push_back(m->value(model_));
        continue;
      }
      auto a = parse_agent_collector(name, model_, b_);
      if (!a || !a->is_aggregate()) throw unknown(name, "an aggregated or model");
      a->resolve(model_);
      std::vector<Value> values;
      for (const auto& [id, agent] : model_.agents())
        if (a->keeps(agent, model_))
          if (auto v = a->value(agent, model_)) values.push_back(std::move(*v));
      out.push_back(a->reduce(values));
    }
    return out;
  }

  [[nodiscard]] std::vector<std::string> collector_names() const override {
    std::vector<std::string> out;
    for (const auto& k : model_.schema().kinds())
      for (const auto& f : k.fields)
        if (std::find(out.begin(), out.end(), f.name) == out.end()) out.push_back(f.name);
    for (const auto& [k, f] : b_.agent_functions) out.push_back(k);
    for (const auto& [k, v] : model_.properties()) out.push_back(k);
    for (const auto& [k, f] : b_.model_functions) out.push_back(k);
    return out;
  }

  [[nodiscard]] const Properties& properties() const override { return model_.properties(); }

  void set_property(const std::string& name, const Value& v) override {
    const Value& current = model_.property(name);
    if (std::holds_alternative<double>(current) && std::holds_alternative<std::int64_t>(v)) {
      model_.set_property(name, static_cast<double>(std::get<std::int64_t>(v)));
    } else if (std::holds_alternative<std::int64_t>(current) && std::holds_alternative<double>(v)) {
      const double x = std::get<double>(v);
      if (x != std::floor(x)) throw ContractViolation("property '" + name + "' takes integers");
      model_.set_property(name, static_cast<std::int64_t>(x));
    } else if (current.index() == v.index()) {
      model_.set_property(name, v);
    } else {
      throw ContractViolation("property '" + name + "' expects a " + std::string(type_name(type_of(current))));
    }
  }

  [[nodiscard]] std::string checkpoint() const override { return persist::save_checkpoint(model_); }

  [[nodiscard]] Snapshot snapshot() const override {
    Snapshot s{model_.step_count(), {}, std::nullopt};
    if (b_.glyph)
      for (const auto& [id, agent] : model_.agents()) s.agents.push_back(b_.glyph(agent, model_));
    if (b_.heat) s.heat = b_.heat(model_);
    return s;
  }

  [[nodiscard]] std::string describe() const override { return model_.describe(); }

 private:
  bool finished_(const ModelT& m) const { return b_.finished && b_.finished(m); }

  CollectorResolution unknown(const std::string& name, const char* what) const {
    std::string list;
    for (const auto& n : collector_names()) list += (list.empty() ? "" : ", ") + n;
    return CollectorResolution("'" + name + "' is not " + what + " collector of model " + model_.name() +
                               " (sources: " + list + ")");
  }

  std::pair<AgentData<ModelT>, ModelData<ModelT>> resolve(const std::vector<std::string>& adata,
                                                          const std::vector<std::string>& mdata) const {
    AgentData<ModelT> a;
    ModelData<ModelT> m;
    for (const auto& name : adata) {
      auto c = parse_agent_collector(name, model_, b_);
      if (!c) throw unknown(name, "an agent");
      a.push_back(std::move(*c));
    }
    for (const auto& name : mdata) {
      auto c = parse_model_collector(name, model_, b_);
      if (!c) throw unknown(name, "a model");
      m.push_back(std::move(*c));
    }
    return {std::move(a), std::move(m)};
  }

  ModelT model_;
  Bindings<ModelT> b_;
};

}  // namespace abm
