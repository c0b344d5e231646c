#include "abm/collect.hpp"

#include <cmath>

namespace abm::aggregate {

namespace {

bool all_integral(const std::vector<Value>& values) {
  for (const auto& v : values)
    if (!std::holds_alternative<bool>(v) && !std::holds_alternative<std::int64_t>(v)) return false;
  return true;
}

template <class Better>
Value extreme(const std::vector<Value>& values, Better better) {
  if (values.empty()) return Missing{};
  const Value* best = &values.front();
  for (const auto& v : values)
    if (better(v, *best)) best = &v;
  return *best;
}

}  // namespace

Aggregator sum() {
  return {"sum", [](const std::vector<Value>& values) -> Value {
            if (all_integral(values)) {
              std::int64_t total = 0;
              for (const auto& v : values) total += to_int(v);
              return total;
            }
            double total = 0;
            for (const auto& v : values) total += to_double(v);
            return total;
          }};
}

Aggregator count() {
  return {"count", [](const std::vector<Value>& values) -> Value { return static_cast<std::int64_t>(values.size()); }};
}

Aggregator mean() {
  return {"mean", [](const std::vector<Value>& values) -> Value {
            if (values.empty()) return Missing{};
            double total = 0;
            for (const auto& v : values) total += to_double(v);
            return total / static_cast<double>(values.size());
          }};
}

Aggregator minimum() {
  return {"minimum", [](const std::vector<Value>& values) {
            return extreme(values, [](const Value& a, const Value& b) { return value_less(a, b); });
          }};
}

Aggregator maximum() {
  return {"maximum", [](const std::vector<Value>& values) {
            return extreme(values, [](const Value& a, const Value& b) { return value_less(b, a); });
          }};
}

Aggregator stddev() {
  return {"std", [](const std::vector<Value>& values) -> Value {
            if (values.size() < 2) return Missing{};
            double mean = 0;
            for (const auto& v : values) mean += to_double(v);
            mean /= static_cast<double>(values.size());
            double ss = 0;
            for (const auto& v : values) ss += (to_double(v) - mean) * (to_double(v) - mean);
            return std::sqrt(ss / static_cast<double>(values.size() - 1));
          }};
}

std::optional<Aggregator> by_name(std::string_view name) {
  if (name == "sum") return sum();
  if (name == "count") return count();
  if (name == "mean") return mean();
  if (name == "minimum") return minimum();
  if (name == "maximum") return maximum();
  if (name == "std") return stddev();
  return std::nullopt;
}

}  // namespace abm::aggregate
