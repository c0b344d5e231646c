#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abm/errors.hpp"
#include "abm/value.hpp"

namespace abm {

/// Agent identity. Issued from 1 upward by a model and never reused.
struct AgentId {
  std::int64_t value = 0;
  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

using KindId = std::uint16_t;

/// Typed handle to a declared agent field; resolved once through the schema.
template <class T>
struct Field {
  std::uint32_t index = 0;
};

struct FieldDecl {
  std::string name;
  Value default_value;  // also fixes the field's type
};

struct KindDecl {
  std::string name;
  std::vector<FieldDecl> fields;
};

using Props = std::vector<Value>;

/// The agent schema of a model: one kind per agent type, each with its declared fields.
class Schema {
 public:
  Schema() = default;
  Schema(std::initializer_list<KindDecl> kinds) : kinds_(kinds) {}

  KindId add_kind(KindDecl kind) {
    kinds_.push_back(std::move(kind));
    return static_cast<KindId>(kinds_.size() - 1);
  }

  [[nodiscard]] const std::vector<KindDecl>& kinds() const noexcept { return kinds_; }
  [[nodiscard]] const KindDecl& kind(KindId k) const { return kinds_.at(k); }

  [[nodiscard]] std::optional<KindId> find_kind(std::string_view name) const {
    for (std::size_t i = 0; i < kinds_.size(); ++i)
      if (kinds_[i].name == name) return static_cast<KindId>(i);
    return std::nullopt;
  }

  [[nodiscard]] KindId kind_id(std::string_view name) const {
    if (auto k = find_kind(name)) return *k;
    throw NotFound("unknown agent kind '" + std::string(name) + "'");
  }

  [[nodiscard]] std::optional<std::uint32_t> field_index(KindId k, std::string_view name) const {
    const auto& fields = kind(k).fields;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }

  /// Typed field handle; throws when the field is absent or declared with another type.
  template <class T>
  [[nodiscard]] Field<T> field(KindId k, std::string_view name) const {
    auto idx = field_index(k, name);
    if (!idx) throw NotFound("kind '" + kind(k).name + "' has no field '" + std::string(name) + "'");
    if (!std::holds_alternative<T>(kind(k).fields[*idx].default_value))
      throw ContractViolation("field '" + std::string(name) + "' accessed with the wrong type");
    return Field<T>{*idx};
  }

  /// True when at least one kind declares `name`.
  [[nodiscard]] bool declares(std::string_view name) const {
    for (KindId k = 0; k < kinds_.size(); ++k)
      if (field_index(k, name)) return true;
    return false;
  }

  /// Default props for kind `k`, overridden by `values` (validated by name and type).
  [[nodiscard]] Props make(KindId k, std::initializer_list<std::pair<std::string_view, Value>> values = {}) const {
    const auto& fields = kind(k).fields;
    Props props;
    props.reserve(fields.size());
    for (const auto& f : fields) props.push_back(f.default_value);
    for (const auto& [name, v] : values) {
      auto idx = field_index(k, name);
      if (!idx) throw NotFound("kind '" + kind(k).name + "' has no field '" + std::string(name) + "'");
      check_type(k, *idx, v);
      props[*idx] = v;
    }
    return props;
  }

  void check_type(KindId k, std::uint32_t idx, const Value& v) const {
    const auto& decl = kind(k).fields.at(idx);
    if (decl.default_value.index() != v.index())
      throw ContractViolation("field '" + decl.name + "' expects " +
                              std::string(type_name(type_of(decl.default_value))) + ", got " +
                              std::string(type_name(type_of(v))));
  }

  void validate(KindId k, const Props& props) const {
    if (props.size() != kind(k).fields.size())
      throw ContractViolation("props of kind '" + kind(k).name + "' have the wrong arity");
    for (std::uint32_t i = 0; i < props.size(); ++i) check_type(k, i, props[i]);
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<KindDecl> kinds_;
};

inline bool operator==(const FieldDecl& a, const FieldDecl& b) {
  return a.name == b.name && a.default_value == b.default_value;
}
inline bool operator==(const KindDecl& a, const KindDecl& b) { return a.name == b.name && a.fields == b.fields; }

template <class>
class Model;

/// An agent: identity, position, kind tag and the typed fields its kind declares.
/// Position and id are read-only outside the owning model so the space index stays consistent.
template <class Position>
class Agent {
 public:
  Agent(AgentId id, Position pos, KindId kind, Props props)
      : props(std::move(props)), id_(id), pos_(std::move(pos)), kind_(kind) {}

  [[nodiscard]] AgentId id() const noexcept { return id_; }
  [[nodiscard]] const Position& pos() const noexcept { return pos_; }
  [[nodiscard]] KindId kind() const noexcept { return kind_; }

  template <class T>
  T& operator[](Field<T> f) {
    return std::get<T>(props[f.index]);
  }
  template <class T>
  const T& operator[](Field<T> f) const {
    return std::get<T>(props[f.index]);
  }

  Props props;

 private:
  template <class>
  friend class Model;

  AgentId id_;
  Position pos_;
  KindId kind_;
};

}  // namespace abm

template <>
struct std::hash<abm::AgentId> {
  std::size_t operator()(const abm::AgentId& id) const noexcept { return std::hash<std::int64_t>{}(id.value); }
};
