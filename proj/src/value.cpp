#include "abm/value.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "abm/errors.hpp"

namespace abm {

std::string_view type_name(ValueType t) {
  switch (t) {
    case ValueType::missing: return "missing";
    case ValueType::boolean: return "bool";
    case ValueType::integer: return "int";
    case ValueType::real: return "real";
    case ValueType::string: return "string";
  }
  return "?";
}

double to_double(const Value& v) {
  switch (type_of(v)) {
    case ValueType::boolean: return std::get<bool>(v) ? 1.0 : 0.0;
    case ValueType::integer: return static_cast<double>(std::get<std::int64_t>(v));
    case ValueType::real: return std::get<double>(v);
    default: throw ContractViolation("value of type " + std::string(type_name(type_of(v))) + " is not numeric");
  }
}

std::int64_t to_int(const Value& v) {
  switch (type_of(v)) {
    case ValueType::boolean: return std::get<bool>(v) ? 1 : 0;
    case ValueType::integer: return std::get<std::int64_t>(v);
    case ValueType::real: return static_cast<std::int64_t>(std::get<double>(v));
    default: throw ContractViolation("value of type " + std::string(type_name(type_of(v))) + " is not numeric");
  }
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string to_string(const Value& v) {
  switch (type_of(v)) {
    case ValueType::missing: return "";
    case ValueType::boolean: return std::get<bool>(v) ? "true" : "false";
    case ValueType::integer: return std::to_string(std::get<std::int64_t>(v));
    case ValueType::real: return format_real(std::get<double>(v));
    case ValueType::string: return std::get<std::string>(v);
  }
  return {};
}

Value parse_literal(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc{} && p == last) return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc{} && p == last) return d;
  return std::string(text);
}

bool value_less(const Value& a, const Value& b) {
  const bool an = type_of(a) == ValueType::boolean || type_of(a) == ValueType::integer || type_of(a) == ValueType::real;
  const bool bn = type_of(b) == ValueType::boolean || type_of(b) == ValueType::integer || type_of(b) == ValueType::real;
  if (an && bn) {
    if (type_of(a) != ValueType::real && type_of(b) != ValueType::real) return to_int(a) < to_int(b);
    return to_double(a) < to_double(b);
  }
  return a < b;
}

}  // namespace abm
