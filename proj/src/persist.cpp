#include "abm/persist.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace abm::persist {

Reader Reader::operator[](const char* key) const {
  if (!node_->is_object()) fail("expected an object");
  auto it = node_->find(key);
  if (it == node_->end()) Reader(*node_, path_ + "/" + key).fail("missing field");
  return Reader(*it, path_ + "/" + key);
}

Reader Reader::operator[](std::size_t index) const {
  if (!node_->is_array()) fail("expected an array");
  if (index >= node_->size()) fail("index out of range");
  return Reader((*node_)[index], path_ + "/" + std::to_string(index));
}

std::size_t Reader::size() const { return node_->size(); }

void Reader::fail(const std::string& what) const {
  throw CorruptCheckpoint((path_.empty() ? std::string("/") : path_) + ": " + what);
}

bool Reader::boolean() const {
  if (!node_->is_boolean()) fail("expected a boolean");
  return node_->get<bool>();
}

std::int64_t Reader::integer() const {
  if (!node_->is_number_integer()) fail("expected an integer");
  if (node_->is_number_unsigned() && node_->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    fail("integer out of range");
  return node_->get<std::int64_t>();
}

std::uint64_t Reader::unsigned_integer() const {
  if (!node_->is_number_unsigned()) fail("expected an unsigned integer");
  return node_->get<std::uint64_t>();
}

double Reader::real() const {
  if (!node_->is_number()) fail("expected a number");
  return node_->get<double>();
}

const std::string& Reader::string() const {
  if (!node_->is_string()) fail("expected a string");
  return node_->get_ref<const std::string&>();
}

Reader Reader::object() const {
  if (!node_->is_object()) fail("expected an object");
  return *this;
}

Reader Reader::array() const {
  if (!node_->is_array()) fail("expected an array");
  return *this;
}

json value_to_json(const Value& v) {
  switch (type_of(v)) {
    case ValueType::missing: return {{"missing", nullptr}};
    case ValueType::boolean: return {{"bool", std::get<bool>(v)}};
    case ValueType::integer: return {{"int", std::get<std::int64_t>(v)}};
    case ValueType::real: {
      const double x = std::get<double>(v);
      if (std::isfinite(x)) return {{"real", x}};
      return {{"real", format_real(x)}};
    }
    case ValueType::string: return {{"string", std::get<std::string>(v)}};
  }
  return nullptr;
}

Value value_from_json(const Reader& r) {
  const auto obj = r.object();
  if (obj.size() != 1) obj.fail("expected exactly one type tag");
  const std::string tag = obj.raw().begin().key();
  const Reader inner = obj[tag.c_str()];
  if (tag == "bool") return inner.boolean();
  if (tag == "int") return inner.integer();
  if (tag == "string") return inner.string();
  if (tag == "missing") return Missing{};
  if (tag == "real") {
    if (inner.raw().is_string()) {
      const auto& s = inner.string();
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      inner.fail("unknown non-finite real '" + s + "'");
    }
    return inner.real();
  }
  obj.fail("unknown type tag '" + tag + "'");
}

json schema_to_json(const Schema& schema) {
  json kinds = json::array();
  for (const auto& k : schema.kinds()) {
    json fields = json::array();
    for (const auto& f : k.fields) fields.push_back({{"name", f.name}, {"default", value_to_json(f.default_value)}});
    kinds.push_back({{"name", k.name}, {"fields", fields}});
  }
  return kinds;
}

Schema schema_from_json(const Reader& r) {
  Schema schema;
  const auto kinds = r.array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    KindDecl kind{kinds[i]["name"].string(), {}};
    const auto fields = kinds[i]["fields"].array();
    for (std::size_t j = 0; j < fields.size(); ++j) {
      Value def = value_from_json(fields[j]["default"]);
      if (is_missing(def)) fields[j]["default"].fail("field defaults must carry a type");
      kind.fields.push_back({fields[j]["name"].string(), std::move(def)});
    }
    schema.add_kind(std::move(kind));
  }
  return schema;
}

json space_to_json(const GraphSpace& s) {
  json removed = json::array();
  json edges = json::array();
  for (std::size_t n = 0; n < s.node_slots(); ++n) {
    const auto node = static_cast<NodeId>(n);
    if (!s.has_node(node)) {
      removed.push_back(node);
      continue;
    }
    for (NodeId m : s.out_neighbors(node)) edges.push_back({node, m});
  }
  return {{"type", "graph"}, {"nodes", s.node_slots()}, {"removed", removed}, {"edges", edges}};
}

GraphSpace SpaceCodec<GraphSpace>::load(const Reader& r) {
  if (r["type"].string() != "graph") r["type"].fail("expected a graph space");
  const auto n = r["nodes"].integer();
  if (n < 0) r["nodes"].fail("negative node count");
  GraphSpace g(static_cast<std::size_t>(n));
  const auto edges = r["edges"].array();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto e = edges[i].array();
    if (e.size() != 2) e.fail("edges are [from, to] pairs");
    try {
      g.add_edge(e[std::size_t{0}].integer(), e[std::size_t{1}].integer());
    } catch (const ContractViolation& ex) {
      e.fail(ex.what());
    }
  }
  const auto removed = r["removed"].array();
  for (std::size_t i = 0; i < removed.size(); ++i) {
    try {
      g.remove_node(removed[i].integer());
    } catch (const Error& ex) {
      removed[i].fail(ex.what());
    }
  }
  return g;
}

void check_version(const json& root) {
  const Reader r(root, "");
  const auto v = r.object()["format_version"].integer();
  if (v != kFormatVersion)
    throw UnsupportedVersion("checkpoint format_version " + std::to_string(v) + " is not supported (expected " +
                             std::to_string(kFormatVersion) + ")");
}

std::string dump(const json& root) { return root.dump(2) + "\n"; }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw CorruptCheckpoint(std::string("/: invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace abm::persist
