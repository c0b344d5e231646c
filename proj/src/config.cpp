#include "abm/config.hpp"

#include <algorithm>

namespace abm {

Config parse_assignments(const std::vector<std::string>& items) {
  Config out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_literal(std::string_view(item).substr(eq + 1));
  }
  return out;
}

namespace {

const Value* lookup(const Config& c, std::string_view key) {
  auto it = c.find(key);
  return it == c.end() ? nullptr : &it->second;
}

[[noreturn]] void mistyped(std::string_view key, const char* expected, const Value& v) {
  throw ConfigError("config '" + std::string(key) + "' must be " + expected + ", got " + to_string(v));
}

}  // namespace

std::int64_t config_int(const Config& c, std::string_view key, std::int64_t fallback) {
  const Value* v = lookup(c, key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  mistyped(key, "an integer", *v);
}

double config_real(const Config& c, std::string_view key, double fallback) {
  const Value* v = lookup(c, key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  if (const auto* x = std::get_if<double>(v)) return *x;
  mistyped(key, "a number", *v);
}

bool config_bool(const Config& c, std::string_view key, bool fallback) {
  const Value* v = lookup(c, key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  mistyped(key, "true or false", *v);
}

std::string config_string(const Config& c, std::string_view key, std::string fallback) {
  const Value* v = lookup(c, key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  mistyped(key, "a string", *v);
}

void require_known_keys(const Config& c, const std::vector<std::string>& known) {
  for (const auto& [k, v] : c)
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      std::string list;
      for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError("unknown config key '" + k + "' (known: " + list + ")");
    }
}

std::string format_config(const Config& c) {
  std::string out;
  for (const auto& [k, v] : c) {
    if (!out.empty()) out += ' ';
    out += k + "=" + to_string(v);
  }
  return out;
}

}  // namespace abm
