#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace abm {

/// Missing cell marker (empty aggregates, absent fields).
using Missing = std::monostate;

/// The closed set of property values: agent fields, model properties and table cells.
using Value = std::variant<Missing, bool, std::int64_t, double, std::string>;

enum class ValueType { missing, boolean, integer, real, string };

inline ValueType type_of(const Value& v) { return static_cast<ValueType>(v.index()); }

std::string_view type_name(ValueType t);

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

/// Numeric view of a bool/int/real value. Throws ContractViolation for strings and missing.
double to_double(const Value& v);

/// Integer view of a bool/int value; reals are truncated toward zero.
std::int64_t to_int(const Value& v);

/// Human-readable rendering (reals shortest round-trip).
std::string to_string(const Value& v);

/// Shortest decimal that parses back to exactly `x`.
std::string format_real(double x);

/// Parses a key=value style literal: true/false, integers, reals, otherwise string.
Value parse_literal(std::string_view text);

/// Total order used by ByProperty scheduling: numeric kinds compare numerically.
bool value_less(const Value& a, const Value& b);

}  // namespace abm
