#include "abm/ensemble.hpp"

#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace abm {

std::vector<ScanSetting> expand(const ScanSpec& spec) {
  std::size_t total = 1;
  for (const auto& [name, values] : spec.parameters) {
    if (values.empty()) throw ContractViolation("scan parameter '" + name + "' has no values");
    total *= values.size();
  }
  std::vector<ScanSetting> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    ScanSetting s{i, {}};
    std::size_t rest = i;
    for (auto it = spec.parameters.rbegin(); it != spec.parameters.rend(); ++it) {
      s.values[it->first] = it->second[rest % it->second.size()];
      rest /= it->second.size();
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::optional<double> as_number(std::string_view text) {
  const Value v = parse_literal(text);
  if (std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v)) return to_double(v);
  return std::nullopt;
}

}  // namespace

std::vector<Value> parse_scan_values(std::string_view text) {
  std::vector<Value> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo_text = text.substr(0, dots);
    auto rest = text.substr(dots + 2);
    std::string_view step_text;
    if (const auto d2 = rest.find(".."); d2 != std::string_view::npos) {
      step_text = rest.substr(d2 + 2);
      rest = rest.substr(0, d2);
    }
    const Value lo = parse_literal(lo_text), hi = parse_literal(rest);
    const Value step = step_text.empty() ? Value{std::int64_t{1}} : parse_literal(step_text);
    const bool integral = std::holds_alternative<std::int64_t>(lo) && std::holds_alternative<std::int64_t>(hi) &&
                          std::holds_alternative<std::int64_t>(step);
    if (integral) {
      const auto a = std::get<std::int64_t>(lo), b = std::get<std::int64_t>(hi), s = std::get<std::int64_t>(step);
      if (s <= 0 || b < a) throw ConfigError("bad range '" + std::string(text) + "'");
      for (auto x = a; x <= b; x += s) out.emplace_back(x);
      return out;
    }
    const auto a = as_number(lo_text), b = as_number(rest), s = step_text.empty() ? std::optional<double>(1.0) : as_number(step_text);
    if (!a || !b || !s || !(*s > 0) || *b < *a) throw ConfigError("bad range '" + std::string(text) + "'");
    const auto count = static_cast<std::size_t>((*b - *a) / *s + 1e-9);
    for (std::size_t k = 0; k <= count; ++k) out.emplace_back(*a + static_cast<double>(k) * *s);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text.substr(start, comma - start);
    if (item.empty()) throw ConfigError("empty value in list '" + std::string(text) + "'");
    out.push_back(parse_literal(item));
    start = comma + 1;
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

DataTable tagged(const DataTable& t, const ScanSpec& spec, const ScanSetting& setting, std::size_t replicate,
                 std::uint64_t seed) {
  std::vector<std::string> names = t.names();
  for (const auto& [name, values] : spec.parameters) names.push_back(name);
  names.emplace_back("replicate");
  names.emplace_back("seed");
  DataTable out(std::move(names));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto row = t.row(r);
    for (const auto& [name, values] : spec.parameters) row.push_back(setting.values.at(name));
    row.emplace_back(static_cast<std::int64_t>(replicate));
    row.emplace_back(static_cast<std::int64_t>(seed));
    out.append_row(std::move(row));
  }
  return out;
}

void append(DataTable& into, const DataTable& part) {
  if (into.columns() == 0) {
    into = part;
    return;
  }
  if (into.names() != part.names()) throw ScanFailed("scan runs produced tables with different columns");
  for (std::size_t r = 0; r < part.rows(); ++r) into.append_row(part.row(r));
}

}  // namespace

RunResult paramscan(const ScanSpec& spec, const ScanRunner& runner, std::size_t workers) {
  if (spec.replicates == 0) throw ContractViolation("a scan needs at least one replicate");
  const auto settings = expand(spec);
  const std::size_t n = settings.size() * spec.replicates;
  std::vector<RunResult> results(n);
  parallel_for(n, workers, [&](std::size_t task) {
    const auto& setting = settings[task / spec.replicates];
    const std::size_t replicate = task % spec.replicates;
    const auto seed = run_seed(spec.base_seed, setting.index, replicate);
    try {
      const auto r = runner(setting.values, seed);
      if (r.agents.columns() != 0) results[task].agents = tagged(r.agents, spec, setting, replicate, seed);
      if (r.model.columns() != 0) results[task].model = tagged(r.model, spec, setting, replicate, seed);
    } catch (const std::exception& e) {
      throw ScanFailed("scan setting " + std::to_string(setting.index) + " (" + format_config(setting.values) +
                       ", replicate " + std::to_string(replicate) + ") failed: " + e.what());
    }
  });
  RunResult merged;
  for (const auto& r : results) {
    if (r.agents.columns() != 0) append(merged.agents, r.agents);
    if (r.model.columns() != 0) append(merged.model, r.model);
  }
  return merged;
}

}  // namespace abm
