#pragma once

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "abm/registry.hpp"
#include "abm/rng.hpp"

namespace abm::serve {

using json = nlohmann::json;

json to_json(const Value& v);
/// JSON scalar to Value: integers stay integers, other numbers become reals.
Value from_json(const json& j);
json snapshot_json(const Snapshot& s);
json model_info_json(const ModelInfo& info);

struct SeriesPoint {
  std::string label;
  std::size_t step;
  Value value;
};

/// One exploration session: a live model, its tunable parameters and the collected series.
///
/// handle() takes one client message and returns the server messages it causes, in order.
/// Every client message gets exactly one ack, param_ack or error. The series clock counts every
/// model step taken in the session and keeps running across resets; snapshots carry the model's
/// own step count.
class Session {
 public:
  Session(std::string id, const ModelInfo& info, Config config, std::uint64_t seed);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const ModelInfo& info() const noexcept { return *info_; }
  [[nodiscard]] const Simulation& simulation() const noexcept { return *sim_; }
  [[nodiscard]] const Config& config() const noexcept { return config_; }
  [[nodiscard]] bool playing() const noexcept { return sps_ > 0; }
  [[nodiscard]] double steps_per_second() const noexcept { return sps_; }
  [[nodiscard]] std::size_t series_step() const noexcept { return series_step_; }
  [[nodiscard]] const std::vector<SeriesPoint>& series() const noexcept { return series_; }
  [[nodiscard]] const std::vector<std::size_t>& reset_steps() const noexcept { return resets_; }

  std::vector<json> handle(const json& message);
  /// One play-loop step: series points then a snapshot.
  std::vector<json> tick();
  [[nodiscard]] json snapshot() const;
  /// The session description sent first on every connection.
  [[nodiscard]] json hello() const;

 private:
  std::vector<json> dispatch(const std::string& type, const json& m);
  void advance(std::vector<json>& out);
  void record(std::vector<json>& out);
  void rebuild(std::uint64_t seed);

  std::string id_;
  const ModelInfo* info_;
  Config config_;
  Rng rng_;
  std::unique_ptr<Simulation> sim_;
  double sps_ = 0;
  std::size_t series_step_ = 0;
  std::vector<SeriesPoint> series_;
  std::vector<std::size_t> resets_;
};

/// Event script for the headless replay oracle.
struct ReplayEvent {
  enum class Kind { step, set_param, reset } kind;
  std::size_t n = 0;
  std::string name;
  Value value;
};

/// Recomputes the series a session produces for a script without the session machinery:
/// seeds, reset seeds and sampling are derived the same way from the documented rules.
std::vector<SeriesPoint> replay(const ModelInfo& info, const Config& config, std::uint64_t seed,
                                const std::vector<ReplayEvent>& script);

/// Seed of the k-th model built in a session (k = 0 at creation, then one per reset).
std::uint64_t session_model_seed(std::uint64_t session_seed, std::size_t k);

}  // namespace abm::serve
