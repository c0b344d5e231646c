#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "abm/collect.hpp"
#include "abm/config.hpp"
#include "abm/rng.hpp"
#include "abm/table.hpp"

namespace abm {

/// A parameter scan: the Cartesian product of the value lists, each setting run `replicates` times.
struct ScanSpec {
  std::vector<std::pair<std::string, std::vector<Value>>> parameters;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
};

struct ScanSetting {
  std::size_t index = 0;
  Config values;
};

/// Settings in canonical order: the first parameter varies slowest.
std::vector<ScanSetting> expand(const ScanSpec& spec);

/// splitmix64(splitmix64(base ^ setting) ^ replicate) with the top bit cleared, so seeds fit a signed column.
constexpr std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t setting, std::uint64_t replicate) noexcept {
  return splitmix64_once(splitmix64_once(base_seed ^ setting) ^ replicate) & 0x7FFFFFFFFFFFFFFFULL;
}

/// Parses a scan value list: "a..b" (inclusive integer range), "a..b..step" (numbers), or "v1,v2,...".
std::vector<Value> parse_scan_values(std::string_view text);

/// One run of a scan: builds a fresh model from the setting and seed, runs it, returns its tables.
using ScanRunner = std::function<RunResult(const Config& setting, std::uint64_t seed)>;

/// Runs every (setting, replicate) on `workers` threads and merges the tables in canonical
/// (setting-major, replicate-minor) order. Each row gains the columns
/// <parameters...>, replicate, seed after its own. The output does not depend on `workers`.
/// A failing run aborts the scan with ScanFailed naming the lowest failing setting.
RunResult paramscan(const ScanSpec& spec, const ScanRunner& runner, std::size_t workers = 1);

/// Runs task(i) for i in [0, n) on a pool of `workers` threads. Exceptions are rethrown after
/// all workers stop, lowest index first.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task);

/// Builds the ScanRunner for a model factory: each run constructs a model from the setting and
/// seed, steps it n times, and collects with fresh copies of adata/mdata.
template <class ModelT>
ScanRunner model_runner(std::function<ModelT(const Config&, std::uint64_t)> factory, StepFunctions<ModelT> fns,
                        std::size_t steps, AgentData<ModelT> adata, ModelData<ModelT> mdata = {}, std::size_t when = 1) {
  return [=](const Config& setting, std::uint64_t seed) {
    ModelT model = factory(setting, seed);
    return run(model, fns, steps, adata, mdata, when);
  };
}

}  // namespace abm
