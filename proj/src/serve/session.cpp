#include "abm/serve/session.hpp"

#include <cmath>

namespace abm::serve {

json to_json(const Value& v) {
  switch (type_of(v)) {
    case ValueType::missing: return nullptr;
    case ValueType::boolean: return std::get<bool>(v);
    case ValueType::integer: return std::get<std::int64_t>(v);
    case ValueType::real: {
      const double x = std::get<double>(v);
      return std::isfinite(x) ? json(x) : json(nullptr);
    }
    case ValueType::string: return std::get<std::string>(v);
  }
  return nullptr;
}

Value from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  return Missing{};
}

json snapshot_json(const Snapshot& s) {
  json agents = json::array();
  for (const auto& a : s.agents)
    agents.push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}, {"color", a.color}, {"marker", a.marker}, {"size", a.size}});
  json out{{"type", "snapshot"}, {"step", s.step}, {"agents", std::move(agents)}};
  if (s.heat) out["heat"] = {{"width", s.heat->width}, {"height", s.heat->height}, {"values", s.heat->values}};
  return out;
}

json model_info_json(const ModelInfo& info) {
  json config = json::object();
  for (const auto& [k, v] : info.defaults) config[k] = to_json(v);
  json params = json::array();
  for (const auto& p : info.params) {
    json entry{{"name", p.name}};
    if (p.is_interval()) {
      entry["min"] = p.min;
      entry["max"] = p.max;
      entry["step"] = p.step;
    } else {
      json values = json::array();
      for (const auto& v : p.values) values.push_back(to_json(v));
      entry["values"] = std::move(values);
    }
    params.push_back(std::move(entry));
  }
  json series = json::array();
  for (const auto& s : info.series) series.push_back(s.label);
  return {{"name", info.name}, {"summary", info.summary}, {"config", config}, {"params", params}, {"series", series}};
}

std::uint64_t session_model_seed(std::uint64_t session_seed, std::size_t k) {
  if (k == 0) return session_seed;
  Rng rng(splitmix64_once(session_seed));
  std::uint64_t seed = 0;
  for (std::size_t i = 0; i < k; ++i) seed = rng.next_u64() >> 1;
  return seed;
}

namespace {

json error(const std::string& code, const std::string& message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

json ack(const std::string& request) { return {{"type", "ack"}, {"request", request}}; }

const ParamRange* find_param(const ModelInfo& info, const std::string& name) {
  for (const auto& p : info.params)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> series_collectors(const ModelInfo& info) {
  std::vector<std::string> out;
  for (const auto& s : info.series) out.push_back(s.collector);
  return out;
}

}  // namespace

Session::Session(std::string id, const ModelInfo& info, Config config, std::uint64_t seed)
    : id_(std::move(id)), info_(&info), config_(merged_config(info, config)), rng_(splitmix64_once(seed)) {
  rebuild(seed);
  std::vector<json> ignored;
  record(ignored);
}

void Session::rebuild(std::uint64_t seed) { sim_ = info_->create(config_, seed); }

void Session::record(std::vector<json>& out) {
  const auto values = sim_->sample(series_collectors(*info_));
  for (std::size_t i = 0; i < values.size(); ++i) {
    series_.push_back({info_->series[i].label, series_step_, values[i]});
    out.push_back({{"type", "series"}, {"label", info_->series[i].label}, {"step", series_step_}, {"value", to_json(values[i])}});
  }
}

void Session::advance(std::vector<json>& out) {
  sim_->step(1);
  ++series_step_;
  record(out);
}

json Session::snapshot() const { return snapshot_json(sim_->snapshot()); }

json Session::hello() const {
  json config = json::object();
  for (const auto& [k, v] : config_) config[k] = to_json(v);
  return {{"type", "session"}, {"id", id_}, {"model", model_info_json(*info_)}, {"config", config},
          {"playing", playing()}, {"sps", sps_}, {"series_step", series_step_}};
}

std::vector<json> Session::tick() {
  std::vector<json> out;
  advance(out);
  out.push_back(snapshot());
  return out;
}

std::vector<json> Session::handle(const json& message) {
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string())
    return {error("bad_message", "messages are objects with a string 'type'")};
  const auto type = message["type"].get<std::string>();
  try {
    return dispatch(type, message);
  } catch (const ConfigError& e) {
    return {error("bad_config", e.what())};
  } catch (const Error& e) {
    return {error("model_error", e.what())};
  } catch (const json::exception& e) {
    return {error("bad_message", e.what())};
  }
}

std::vector<json> Session::dispatch(const std::string& type, const json& m) {
  std::vector<json> out;
  if (type == "create") {
    if (!m.contains("model") || !m["model"].is_string()) return {error("bad_message", "create needs a 'model' name")};
    const auto* info = find_model(m["model"].get<std::string>());
    if (!info) return {error("unknown_model", "unknown model '" + m["model"].get<std::string>() + "' (available: " + model_names() + ")")};
    Config overrides;
    if (m.contains("config")) {
      if (!m["config"].is_object()) return {error("bad_message", "'config' must be an object")};
      for (const auto& [k, v] : m["config"].items()) overrides[k] = from_json(v);
    }
    const std::uint64_t seed = m.value("seed", std::uint64_t{0});
    auto config = merged_config(*info, overrides);
    info_ = info;
    config_ = std::move(config);
    rng_ = Rng(splitmix64_once(seed));
    sps_ = 0;
    series_step_ = 0;
    series_.clear();
    resets_.clear();
    rebuild(seed);
    out.push_back(hello());
    record(out);
    out.push_back(snapshot());
    out.push_back(ack(type));
    return out;
  }
  if (type == "step") {
    const auto& n = m.contains("n") ? m["n"] : json(1);
    if (!n.is_number_integer() || n.get<std::int64_t>() < 0 || n.get<std::int64_t>() > 100000)
      return {error("bad_message", "step 'n' must be an integer in 0..100000")};
    for (std::int64_t i = 0; i < n.get<std::int64_t>(); ++i) advance(out);
    out.push_back(snapshot());
    out.push_back(ack(type));
    return out;
  }
  if (type == "play") {
    if (!m.contains("sps") || !m["sps"].is_number()) return {error("bad_message", "play needs a numeric 'sps'")};
    const double sps = m["sps"].get<double>();
    if (!(sps >= 0 && sps <= 1000)) return {error("bad_message", "'sps' must lie in [0, 1000]")};
    sps_ = sps;
    return {ack(type)};
  }
  if (type == "pause") {
    sps_ = 0;
    return {ack(type)};
  }
  if (type == "set_param") {
    if (!m.contains("name") || !m["name"].is_string() || !m.contains("value"))
      return {error("bad_message", "set_param needs 'name' and 'value'")};
    const auto name = m["name"].get<std::string>();
    const auto* range = find_param(*info_, name);
    if (!range) return {error("unknown_param", "model " + info_->name + " has no tunable parameter '" + name + "'")};
    const Value v = from_json(m["value"]);
    if (!range->contains(v)) return {error("param_out_of_range", "value " + m["value"].dump() + " is outside the range of '" + name + "'")};
    sim_->set_property(name, v);
    config_[name] = sim_->properties().at(name);
    return {{{"type", "param_ack"}, {"name", name}, {"value", to_json(config_[name])}}};
  }
  if (type == "reset") {
    resets_.push_back(series_step_);
    rebuild(rng_.next_u64() >> 1);
    out.push_back({{"type", "reset_marker"}, {"step", series_step_}});
    out.push_back(snapshot());
    out.push_back(ack(type));
    return out;
  }
  if (type == "subscribe") {
    out.push_back(hello());
    std::size_t next_reset = 0;
    for (const auto& p : series_) {
      while (next_reset < resets_.size() && resets_[next_reset] < p.step)
        out.push_back({{"type", "reset_marker"}, {"step", resets_[next_reset++]}});
      out.push_back({{"type", "series"}, {"label", p.label}, {"step", p.step}, {"value", to_json(p.value)}});
    }
    for (; next_reset < resets_.size(); ++next_reset) out.push_back({{"type", "reset_marker"}, {"step", resets_[next_reset]}});
    out.push_back(snapshot());
    out.push_back(ack(type));
    return out;
  }
  if (type == "clear_series") {
    series_.clear();
    resets_.clear();
    return {ack(type)};
  }
  return {error("unknown_type", "unknown message type '" + type + "'")};
}

std::vector<SeriesPoint> replay(const ModelInfo& info, const Config& config, std::uint64_t seed,
                                const std::vector<ReplayEvent>& script) {
  Config current = merged_config(info, config);
  std::vector<std::string> collectors;
  for (const auto& s : info.series) collectors.push_back(s.collector);
  std::vector<SeriesPoint> out;
  std::size_t clock = 0, builds = 0;
  auto sim = info.create(current, session_model_seed(seed, builds++));
  auto sample = [&] {
    const auto values = sim->sample(collectors);
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({info.series[i].label, clock, values[i]});
  };
  sample();
  for (const auto& e : script) {
    switch (e.kind) {
      case ReplayEvent::Kind::step:
        for (std::size_t i = 0; i < e.n; ++i) {
          sim->step(1);
          ++clock;
          sample();
        }
        break;
      case ReplayEvent::Kind::set_param:
        sim->set_property(e.name, e.value);
        current[e.name] = sim->properties().at(e.name);
        break;
      case ReplayEvent::Kind::reset:
        sim = info.create(current, session_model_seed(seed, builds++));
        break;
    }
  }
  return out;
}

}  // namespace abm::serve
