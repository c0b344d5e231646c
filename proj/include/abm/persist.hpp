#pragma once

// Checkpoints: the complete state of a model between steps, as a canonical JSON tree.
// Keys are sorted, agents ordered by id, reals printed shortest-round-trip, so saving a loaded
// checkpoint reproduces the original bytes. The schema is documented in docs/checkpoint.md.

#include <json.hpp>

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>

#include "abm/errors.hpp"
#include "abm/model.hpp"
#include "abm/space/continuous.hpp"
#include "abm/space/graph.hpp"
#include "abm/space/grid.hpp"
#include "abm/space/nospace.hpp"

namespace abm::persist {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kExtension = ".abmck";

/// Path-tracking view into a checkpoint tree; every failure names the offending field.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(&node), path_(std::move(path)) {}

  [[nodiscard]] Reader operator[](const char* key) const;
  [[nodiscard]] Reader operator[](std::size_t index) const;
  [[nodiscard]] bool has(const char* key) const { return node_->is_object() && node_->contains(key); }
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] const json& raw() const noexcept { return *node_; }
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

  [[nodiscard]] bool boolean() const;
  [[nodiscard]] std::int64_t integer() const;
  [[nodiscard]] std::uint64_t unsigned_integer() const;
  [[nodiscard]] double real() const;
  [[nodiscard]] const std::string& string() const;
  [[nodiscard]] Reader object() const;
  [[nodiscard]] Reader array() const;

  [[noreturn]] void fail(const std::string& what) const;

 private:
  const json* node_;
  std::string path_;
};

/// Tagged encoding: {"bool": b} | {"int": i} | {"real": x} | {"string": s} | {"missing": null}.
/// Non-finite reals are written as the strings "nan", "inf", "-inf".
json value_to_json(const Value& v);
Value value_from_json(const Reader& r);

json schema_to_json(const Schema& schema);
Schema schema_from_json(const Reader& r);

// --- spaces ---------------------------------------------------------------

template <std::size_t D>
json position_to_json(const std::array<int, D>& p) {
  return json(p);
}
template <int D>
json position_to_json(const Eigen::Matrix<double, D, 1>& p) {
  json out = json::array();
  for (int d = 0; d < D; ++d) out.push_back(p[d]);
  return out;
}
inline json position_to_json(NodeId p) { return p; }
inline json position_to_json(NoSpace::Position) { return nullptr; }

template <std::size_t D>
json space_to_json(const GridSpace<D>& s) {
  return {{"type", "grid"}, {"dims", s.dims()}, {"periodic", s.periodic()}, {"metric", metric_name(s.metric())}};
}
template <int D>
json space_to_json(const ContinuousSpace<D>& s) {
  return {{"type", "continuous"}, {"extent", position_to_json<D>(s.extent())}, {"periodic", s.periodic()}, {"spacing", s.spacing()}};
}
json space_to_json(const GraphSpace& s);
inline json space_to_json(const NoSpace&) { return {{"type", "none"}}; }

template <class Space>
struct SpaceCodec;

template <std::size_t D>
struct SpaceCodec<GridSpace<D>> {
  static GridSpace<D> load(const Reader& r) {
    if (r["type"].string() != "grid") r["type"].fail("expected a grid space");
    std::array<int, D> dims;
    const auto rd = r["dims"].array();
    if (rd.size() != D) rd.fail("expected " + std::to_string(D) + " dimensions");
    for (std::size_t d = 0; d < D; ++d) dims[d] = static_cast<int>(rd[d].integer());
    const auto& metric = r["metric"].string();
    if (metric != "chebyshev" && metric != "euclidean") r["metric"].fail("unknown metric '" + metric + "'");
    try {
      return GridSpace<D>(dims, r["periodic"].boolean(), metric == "chebyshev" ? Metric::chebyshev : Metric::euclidean);
    } catch (const ContractViolation& e) {
      rd.fail(e.what());
    }
  }
  static std::array<int, D> position(const Reader& r) {
    const auto ra = r.array();
    if (ra.size() != D) ra.fail("expected " + std::to_string(D) + " coordinates");
    std::array<int, D> p;
    for (std::size_t d = 0; d < D; ++d) p[d] = static_cast<int>(ra[d].integer());
    return p;
  }
};

template <int D>
struct SpaceCodec<ContinuousSpace<D>> {
  using Position = typename ContinuousSpace<D>::Position;
  static ContinuousSpace<D> load(const Reader& r) {
    if (r["type"].string() != "continuous") r["type"].fail("expected a continuous space");
    try {
      return ContinuousSpace<D>(position(r["extent"]), r["periodic"].boolean(), r["spacing"].real());
    } catch (const ContractViolation& e) {
      r.fail(e.what());
    }
  }
  static Position position(const Reader& r) {
    const auto ra = r.array();
    if (ra.size() != static_cast<std::size_t>(D)) ra.fail("expected " + std::to_string(D) + " coordinates");
    Position p;
    for (int d = 0; d < D; ++d) p[d] = ra[static_cast<std::size_t>(d)].real();
    return p;
  }
};

template <>
struct SpaceCodec<GraphSpace> {
  static GraphSpace load(const Reader& r);
  static NodeId position(const Reader& r) { return r.integer(); }
};

template <>
struct SpaceCodec<NoSpace> {
  static NoSpace load(const Reader& r) {
    if (r["type"].string() != "none") r["type"].fail("expected no space");
    return {};
  }
  static NoSpace::Position position(const Reader& r) {
    if (!r.raw().is_null()) r.fail("expected null position");
    return {};
  }
};

// --- models ---------------------------------------------------------------

template <class Space>
json encode(const Model<Space>& model) {
  json agents = json::array();
  for (const auto& [id, agent] : model.agents()) {
    const auto& kind = model.schema().kind(agent.kind());
    json props = json::object();
    for (std::size_t i = 0; i < kind.fields.size(); ++i) props[kind.fields[i].name] = value_to_json(agent.props[i]);
    agents.push_back({{"id", id.value}, {"kind", kind.name}, {"pos", position_to_json(agent.pos())}, {"props", props}});
  }
  json properties = json::object();
  for (const auto& [k, v] : model.properties()) properties[k] = value_to_json(v);
  json arrays = json::object();
  for (const auto& [k, v] : model.arrays()) arrays[k] = v;
  return {{"format_version", kFormatVersion},
          {"model", model.name()},
          {"step_count", model.step_count()},
          {"next_id", model.next_id()},
          {"model_step_first", model.model_step_first()},
          {"properties", properties},
          {"arrays", arrays},
          {"schema", schema_to_json(model.schema())},
          {"space", space_to_json(model.space())},
          {"agents", agents},
          {"rng", model.rng().state().s}};
}

/// Checks format_version: missing or malformed -> CorruptCheckpoint, other versions -> UnsupportedVersion.
void check_version(const json& root);

/// Rebuilds a model. The scheduler is behavior, not state, so the caller supplies it.
template <class Space>
Model<Space> decode(const json& root, typename Model<Space>::SchedulerType scheduler) {
  check_version(root);
  const Reader r(root, "");
  Schema schema = schema_from_json(r["schema"]);
  Properties properties;
  const auto rp = r["properties"].object();
  for (const auto& [k, v] : rp.raw().items()) properties[k] = value_from_json(rp[k.c_str()]);
  Model<Space> model(r["model"].string(), SpaceCodec<Space>::load(r["space"].object()), std::move(schema),
                     std::move(properties), std::move(scheduler), 0);
  const auto ra = r["arrays"].object();
  for (const auto& [k, v] : ra.raw().items()) {
    const auto rv = ra[k.c_str()].array();
    auto& arr = model.array(k);
    for (std::size_t i = 0; i < rv.size(); ++i) arr.push_back(rv[i].integer());
  }
  const auto agents = r["agents"].array();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto ra_i = agents[i].object();
    const auto kind_name = ra_i["kind"].string();
    const auto kind = model.schema().find_kind(kind_name);
    if (!kind) ra_i["kind"].fail("unknown agent kind '" + kind_name + "'");
    const auto& decl = model.schema().kind(*kind);
    const auto rprops = ra_i["props"].object();
    if (rprops.size() != decl.fields.size()) rprops.fail("field set does not match the schema");
    Props props;
    for (const auto& f : decl.fields) {
      if (!rprops.has(f.name.c_str())) rprops.fail("missing field '" + f.name + "'");
      props.push_back(value_from_json(rprops[f.name.c_str()]));
      if (props.back().index() != f.default_value.index()) rprops[f.name.c_str()].fail("type does not match the schema");
    }
    try {
      model.restore_agent(AgentId{ra_i["id"].integer()}, *kind, std::move(props), SpaceCodec<Space>::position(ra_i["pos"]));
    } catch (const ContractViolation& e) {
      ra_i.fail(e.what());
    }
  }
  const auto rr = r["rng"].array();
  if (rr.size() != 4) rr.fail("expected four state words");
  RngState state;
  for (std::size_t i = 0; i < 4; ++i) state.s[i] = rr[i].unsigned_integer();
  try {
    model.set_rng(Rng(state));
    model.restore_counters(static_cast<std::size_t>(r["step_count"].integer()), r["next_id"].integer());
  } catch (const ContractViolation& e) {
    r.fail(e.what());
  }
  model.set_model_step_first(r["model_step_first"].boolean());
  return model;
}

/// Canonical text: two-space indented, sorted keys, trailing newline.
std::string dump(const json& root);
/// Parses checkpoint text; malformed JSON is a CorruptCheckpoint.
json parse(std::string_view text);

template <class Space>
void save_checkpoint(const Model<Space>& model, std::ostream& out) {
  out << dump(encode(model));
  if (!out) throw Error("failed writing checkpoint");
}

template <class Space>
std::string save_checkpoint(const Model<Space>& model) {
  return dump(encode(model));
}

template <class Space>
Model<Space> load_checkpoint(std::string_view text, typename Model<Space>::SchedulerType scheduler) {
  return decode<Space>(parse(text), std::move(scheduler));
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace abm::persist
