#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "abm/errors.hpp"
#include "abm/model.hpp"
#include "abm/table.hpp"
#include "abm/value.hpp"

namespace abm {

/// Reduces the values collected over agents at one step to a single cell.
struct Aggregator {
  std::string name;
  std::function<Value(const std::vector<Value>&)> fn;
};

/// Built-in aggregators. Empty input: sum and count give 0, the others give a missing cell.
/// sum keeps integers integral (bools count as 0/1); std is the n-1 sample deviation (missing below 2 values).
namespace aggregate {
Aggregator sum();
Aggregator count();
Aggregator mean();
Aggregator minimum();
Aggregator maximum();
Aggregator stddev();
std::optional<Aggregator> by_name(std::string_view name);
}  // namespace aggregate

/// Agent-level collection entry: a property name or function, optionally aggregated,
/// and (only when aggregated) filtered.
template <class ModelT>
class AgentCollector {
 public:
  using AgentT = typename ModelT::AgentType;
  using SourceFn = std::function<Value(const AgentT&, const ModelT&)>;
  using FilterFn = std::function<bool(const AgentT&, const ModelT&)>;

  static AgentCollector property(std::string name) {
    AgentCollector c;
    c.source_ = std::move(name);
    return c;
  }

  static AgentCollector function(std::string name, SourceFn fn) {
    AgentCollector c;
    c.source_ = std::move(name);
    c.fn_ = std::move(fn);
    return c;
  }

  [[nodiscard]] AgentCollector aggregated(Aggregator agg) const {
    AgentCollector c = *this;
    c.aggregator_ = std::move(agg);
    return c;
  }

  [[nodiscard]] AgentCollector where(std::string name, FilterFn keep) const {
    AgentCollector c = *this;
    c.filter_name_ = std::move(name);
    c.filter_ = std::move(keep);
    return c;
  }

  [[nodiscard]] bool is_aggregate() const noexcept { return aggregator_.has_value(); }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  /// `<source>` raw; `<aggregator>_<source>[_<filter>]` aggregated.
  [[nodiscard]] std::string column_name() const {
    if (!aggregator_) return source_;
    std::string name = aggregator_->name + "_" + source_;
    if (filter_) name += "_" + filter_name_;
    return name;
  }

  /// Binds property names to per-kind field slots. Throws CollectorResolution on unknown names
  /// or a filter without an aggregator.
  void resolve(const ModelT& model) {
    if (filter_ && !aggregator_)
      throw CollectorResolution("collector '" + source_ + "': a filter requires an aggregator");
    if (fn_) return;
    const auto& schema = model.schema();
    if (!schema.declares(source_)) throw CollectorResolution("no agent kind declares a field '" + source_ + "'");
    slots_.clear();
    for (KindId k = 0; k < schema.kinds().size(); ++k) slots_.push_back(schema.field_index(k, source_));
  }

  /// The agent's value, or nullopt when its kind lacks the property.
  [[nodiscard]] std::optional<Value> value(const AgentT& agent, const ModelT& model) const {
    if (fn_) return fn_(agent, model);
    const auto& slot = slots_.at(agent.kind());
    if (!slot) return std::nullopt;
    return agent.props[*slot];
  }

  [[nodiscard]] bool keeps(const AgentT& agent, const ModelT& model) const { return !filter_ || filter_(agent, model); }

  [[nodiscard]] Value reduce(const std::vector<Value>& values) const { return aggregator_->fn(values); }

 private:
  std::string source_;
  SourceFn fn_;
  std::optional<Aggregator> aggregator_;
  std::string filter_name_;
  FilterFn filter_;
  std::vector<std::optional<std::uint32_t>> slots_;
};

/// Model-level collection entry: a property name or a function of the model.
template <class ModelT>
class ModelCollector {
 public:
  using SourceFn = std::function<Value(const ModelT&)>;

  static ModelCollector property(std::string name) {
    ModelCollector c;
    c.name_ = std::move(name);
    return c;
  }

  static ModelCollector function(std::string name, SourceFn fn) {
    ModelCollector c;
    c.name_ = std::move(name);
    c.fn_ = std::move(fn);
    return c;
  }

  [[nodiscard]] const std::string& column_name() const noexcept { return name_; }

  void resolve(const ModelT& model) const {
    if (!fn_ && !model.has_property(name_)) throw CollectorResolution("model has no property '" + name_ + "'");
  }

  [[nodiscard]] Value value(const ModelT& model) const { return fn_ ? fn_(model) : model.property(name_); }

 private:
  std::string name_;
  SourceFn fn_;
};

template <class ModelT>
using AgentData = std::vector<AgentCollector<ModelT>>;
template <class ModelT>
using ModelData = std::vector<ModelCollector<ModelT>>;

struct RunResult {
  DataTable agents;
  DataTable model;
};

/// Accumulates collection rows. Raw agent collectors give columns (step, id, sources...) with one
/// row per agent; aggregated ones give (step, columns...) with one row per step. Mixing both
/// kinds in one adata is rejected.
template <class ModelT>
class Recorder {
 public:
  Recorder(const ModelT& model, AgentData<ModelT> adata, ModelData<ModelT> mdata)
      : adata_(std::move(adata)), mdata_(std::move(mdata)) {
    std::size_t aggregated = 0;
    for (auto& c : adata_) {
      c.resolve(model);
      aggregated += c.is_aggregate() ? 1 : 0;
    }
    for (const auto& c : mdata_) c.resolve(model);
    if (aggregated != 0 && aggregated != adata_.size())
      throw CollectorResolution("agent collectors must be either all raw or all aggregated");
    raw_ = !adata_.empty() && aggregated == 0;
    if (!adata_.empty()) {
      std::vector<std::string> names{"step"};
      if (raw_) names.emplace_back("id");
      for (const auto& c : adata_) names.push_back(c.column_name());
      result_.agents = DataTable(std::move(names));
    }
    if (!mdata_.empty()) {
      std::vector<std::string> names{"step"};
      for (const auto& c : mdata_) names.push_back(c.column_name());
      result_.model = DataTable(std::move(names));
    }
  }

  void record(const ModelT& model, std::size_t step) {
    const Value s = static_cast<std::int64_t>(step);
    if (!adata_.empty()) {
      if (raw_) {
        for (const auto& [id, agent] : model.agents()) {
          std::vector<Value> row{s, id.value};
          for (const auto& c : adata_) row.push_back(c.value(agent, model).value_or(Missing{}));
          result_.agents.append_row(std::move(row));
        }
      } else {
        result_.agents.append_row(aggregate_row(model, s));
      }
    }
    if (!mdata_.empty()) {
      std::vector<Value> row{s};
      for (const auto& c : mdata_) row.push_back(c.value(model));
      result_.model.append_row(std::move(row));
    }
  }

  /// Aggregated values at the current state without recording them: (column, value) pairs.
  [[nodiscard]] std::vector<std::pair<std::string, Value>> sample(const ModelT& model) const {
    std::vector<std::pair<std::string, Value>> out;
    if (!raw_ && !adata_.empty()) {
      auto row = aggregate_row(model, Value{});
      for (std::size_t i = 0; i < adata_.size(); ++i) out.emplace_back(adata_[i].column_name(), row[i + 1]);
    }
    for (const auto& c : mdata_) out.emplace_back(c.column_name(), c.value(model));
    return out;
  }

  [[nodiscard]] const RunResult& result() const noexcept { return result_; }
  RunResult take() { return std::move(result_); }

 private:
  std::vector<Value> aggregate_row(const ModelT& model, Value s) const {
    std::vector<Value> row{std::move(s)};
    std::vector<Value> values;
    for (const auto& c : adata_) {
      values.clear();
      for (const auto& [id, agent] : model.agents()) {
        if (!c.keeps(agent, model)) continue;
        if (auto v = c.value(agent, model)) values.push_back(std::move(*v));
      }
      row.push_back(c.reduce(values));
    }
    return row;
  }

  AgentData<ModelT> adata_;
  ModelData<ModelT> mdata_;
  bool raw_ = false;
  RunResult result_;
};

/// Steps like step() while collecting: a snapshot at s = 0 (the state before stepping), then after
/// every step s with s % when == 0. The `step` column holds s. Collectors resolve before any step.
template <class ModelT>
RunResult run(ModelT& model, const StepFunctions<ModelT>& fns, const Until<ModelT>& until, AgentData<ModelT> adata,
              ModelData<ModelT> mdata = {}, std::size_t when = 1) {
  if (when == 0) throw ContractViolation("collection interval must be at least 1");
  Recorder<ModelT> recorder(model, std::move(adata), std::move(mdata));
  recorder.record(model, 0);
  std::size_t s = 0;
  while (!until(model, s)) {
    step_once(model, fns);
    ++s;
    if (s % when == 0) recorder.record(model, s);
  }
  return recorder.take();
}

template <class ModelT>
RunResult run(ModelT& model, const StepFunctions<ModelT>& fns, std::size_t n, AgentData<ModelT> adata,
              ModelData<ModelT> mdata = {}, std::size_t when = 1) {
  return run(model, fns, Until<ModelT>{[n](const ModelT&, std::size_t s) { return s >= n; }}, std::move(adata),
             std::move(mdata), when);
}

}  // namespace abm
