#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abm/collect.hpp"
#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/value.hpp"

namespace abm {

/// How one agent is drawn: position plus the server-side visual mapping.
struct AgentGlyph {
  std::int64_t id;
  double x;
  double y;
  std::string color;   // "#rrggbb"
  std::string marker;  // circle | rect | triangle
  double size;
};

/// Values over the grid cells, x varying fastest.
struct HeatGrid {
  int width;
  int height;
  std::vector<double> values;
};

struct Snapshot {
  std::size_t step;
  std::vector<AgentGlyph> agents;
  std::optional<HeatGrid> heat;
};

/// A live-tunable parameter: a list of allowed values, or a numeric interval with a slider step.
struct ParamRange {
  std::string name;
  std::vector<Value> values;
  double min = 0;
  double max = 0;
  double step = 0;

  [[nodiscard]] bool is_interval() const noexcept { return values.empty(); }
  [[nodiscard]] bool contains(const Value& v) const;
};

/// A named time series shown while exploring: a label and the collector that feeds it.
struct SeriesSpec {
  std::string label;
  std::string collector;
};

/// Type-erased running model used by the CLI and the server.
class Simulation {
 public:
  virtual ~Simulation() = default;

  [[nodiscard]] virtual const std::string& model_name() const = 0;
  [[nodiscard]] virtual std::size_t step_count() const = 0;
  [[nodiscard]] virtual std::size_t agent_count() const = 0;
  virtual void step(std::size_t n) = 0;
  /// Steps until finished() or n steps, whichever comes first; returns the steps taken.
  virtual std::size_t step_until_finished(std::size_t n) = 0;
  [[nodiscard]] virtual bool finished() const = 0;

  /// Collector names: agent fields or functions (raw), `<aggregator>_<source>[_<filter>]`
  /// (aggregated), model properties or functions (mdata). Unknown names throw CollectorResolution
  /// before any step is taken.
  virtual RunResult run(std::size_t n, const std::vector<std::string>& adata, const std::vector<std::string>& mdata,
                        std::size_t when = 1) = 0;
  /// Checks names without stepping.
  virtual void validate_collectors(const std::vector<std::string>& adata, const std::vector<std::string>& mdata) const = 0;
  /// Current value of each aggregated or model collector.
  [[nodiscard]] virtual std::vector<Value> sample(const std::vector<std::string>& names) const = 0;
  /// Names usable in adata and mdata, for error messages and discovery.
  [[nodiscard]] virtual std::vector<std::string> collector_names() const = 0;

  [[nodiscard]] virtual const Properties& properties() const = 0;
  /// Updates an existing model property; ints are accepted for reals and integral reals for ints.
  virtual void set_property(const std::string& name, const Value& v) = 0;

  [[nodiscard]] virtual std::string checkpoint() const = 0;
  [[nodiscard]] virtual Snapshot snapshot() const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;
  /// A fingerprint of the full state (the checkpoint text).
  [[nodiscard]] std::string state() const { return checkpoint(); }
};

struct ModelInfo {
  std::string name;
  std::string summary;
  Config defaults;
  std::vector<ParamRange> params;
  std::vector<SeriesSpec> series;
  std::vector<std::string> default_adata;
  std::vector<std::string> default_mdata;
  /// Model definition file relative to the source root.
  std::string source_file;
  std::function<std::unique_ptr<Simulation>(const Config&, std::uint64_t seed)> create;
  std::function<std::unique_ptr<Simulation>(std::string_view checkpoint)> restore;
};

const std::vector<ModelInfo>& catalog();
/// nullptr when unknown.
const ModelInfo* find_model(std::string_view name);
/// Comma-separated catalog names.
std::string model_names();
/// Restores any catalog model from checkpoint text, dispatching on its "model" field.
std::unique_ptr<Simulation> restore_simulation(std::string_view checkpoint);
/// `defaults` overridden by `overrides`; unknown keys throw ConfigError.
Config merged_config(const ModelInfo& info, const Config& overrides);

}  // namespace abm
