#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "abm/errors.hpp"
#include "abm/value.hpp"

namespace abm {

/// Model configuration as key=value pairs.
using Config = std::map<std::string, Value, std::less<>>;

/// Parses "key=value" items; values go through parse_literal. Throws ConfigError on a missing '='.
Config parse_assignments(const std::vector<std::string>& items);

/// Typed lookups with a default. Integers are accepted where reals are expected.
std::int64_t config_int(const Config& c, std::string_view key, std::int64_t fallback);
double config_real(const Config& c, std::string_view key, double fallback);
bool config_bool(const Config& c, std::string_view key, bool fallback);
std::string config_string(const Config& c, std::string_view key, std::string fallback);

/// Throws ConfigError naming the first key of `c` not in `known`.
void require_known_keys(const Config& c, const std::vector<std::string>& known);

/// "k1=v1 k2=v2" in key order; used in provenance lines.
std::string format_config(const Config& c);

}  // namespace abm
