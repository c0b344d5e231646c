#include "abm/serve/schema.hpp"

#include <regex>

#include "abm/errors.hpp"
#include "abm/persist.hpp"

namespace abm::serve {

using nlohmann::json;

const json& SchemaValidator::resolve(std::string_view ref) const {
  if (ref.empty() || ref[0] != '#') throw ContractViolation("only local schema references are supported");
  const json* node = &root_;
  std::string_view rest = ref.substr(1);
  while (!rest.empty()) {
    rest.remove_prefix(1);
    const auto slash = rest.find('/');
    const std::string key(rest.substr(0, slash));
    if (!node->is_object() || !node->contains(key)) throw ContractViolation("unresolvable schema reference " + std::string(ref));
    node = &(*node)[key];
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  }
  return *node;
}

std::optional<std::string> SchemaValidator::check(const json& instance, std::string_view ref) const {
  return check(resolve(ref), instance, "");
}

namespace {

bool has_type(const json& x, const std::string& type) {
  if (type == "object") return x.is_object();
  if (type == "array") return x.is_array();
  if (type == "string") return x.is_string();
  if (type == "boolean") return x.is_boolean();
  if (type == "null") return x.is_null();
  if (type == "integer") return x.is_number_integer() || (x.is_number_float() && x.get<double>() == static_cast<double>(static_cast<long long>(x.get<double>())));
  if (type == "number") return x.is_number();
  return false;
}

std::string where(const std::string& path) { return path.empty() ? "/" : path; }

}  // namespace

std::optional<std::string> SchemaValidator::check(const json& s, const json& x, const std::string& path) const {
  if (s.is_boolean()) return s.get<bool>() ? std::nullopt : std::optional<std::string>(where(path) + ": not allowed");
  if (s.contains("$ref")) return check(resolve(s["$ref"].get<std::string>()), x, path);

  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_string()) ok = has_type(x, s["type"].get<std::string>());
    else
      for (const auto& t : s["type"]) ok = ok || has_type(x, t.get<std::string>());
    if (!ok) return where(path) + ": expected type " + s["type"].dump() + ", got " + x.dump();
  }
  if (s.contains("const") && x != s["const"]) return where(path) + ": expected " + s["const"].dump();
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == x;
    if (!found) return where(path) + ": " + x.dump() + " is not one of " + s["enum"].dump();
  }
  if (x.is_number()) {
    const double v = x.get<double>();
    if (s.contains("minimum") && v < s["minimum"].get<double>()) return where(path) + ": below minimum";
    if (s.contains("maximum") && v > s["maximum"].get<double>()) return where(path) + ": above maximum";
    if (s.contains("exclusiveMinimum") && v <= s["exclusiveMinimum"].get<double>()) return where(path) + ": not above exclusiveMinimum";
  }
  if (x.is_string()) {
    const auto& str = x.get_ref<const std::string&>();
    if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>()) return where(path) + ": string too short";
    if (s.contains("pattern") && !std::regex_search(str, std::regex(s["pattern"].get<std::string>())))
      return where(path) + ": '" + str + "' does not match " + s["pattern"].get<std::string>();
  }
  if (x.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!x.contains(r.get<std::string>())) return where(path) + ": missing required '" + r.get<std::string>() + "'";
    const json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [k, v] : x.items()) {
      const std::string sub = path + "/" + k;
      if (props && props->contains(k)) {
        if (auto e = check((*props)[k], v, sub)) return e;
      } else if (s.contains("additionalProperties")) {
        if (auto e = check(s["additionalProperties"], v, sub)) return e;
      }
    }
  }
  if (x.is_array()) {
    if (s.contains("minItems") && x.size() < s["minItems"].get<std::size_t>()) return where(path) + ": too few items";
    if (s.contains("items"))
      for (std::size_t i = 0; i < x.size(); ++i)
        if (auto e = check(s["items"], x[i], path + "/" + std::to_string(i))) return e;
  }
  if (s.contains("oneOf")) {
    std::size_t matches = 0;
    std::string last;
    for (const auto& option : s["oneOf"]) {
      if (auto e = check(option, x, path)) last = *e;
      else ++matches;
    }
    if (matches != 1)
      return where(path) + ": matches " + std::to_string(matches) + " alternatives of oneOf" + (matches == 0 ? " (" + last + ")" : "");
  }
  if (s.contains("anyOf")) {
    bool any = false;
    for (const auto& option : s["anyOf"]) any = any || !check(option, x, path);
    if (!any) return where(path) + ": matches no alternative of anyOf";
  }
  return std::nullopt;
}

const SchemaValidator& protocol_validator() {
  static const SchemaValidator validator(json::parse(persist::read_file(ABM_SOURCE_DIR "/schemas/protocol.schema.json")));
  return validator;
}

}  // namespace abm::serve
