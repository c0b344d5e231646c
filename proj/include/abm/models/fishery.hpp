#pragma once

#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/space/nospace.hpp"

namespace abm::fishery {

using Space = NoSpace;
using ModelT = Model<Space>;
using AgentT = ModelT::AgentType;

/// Logistic fish stock ds/dt = s (1 - s/K) - h, harvested by fishers. h is the summed competence
/// of the fishers out fishing, held constant over each unit of model time. Fishing is closed
/// while the stock is below `threshold`.
struct Config {
  std::int64_t n_fishers = 8;
  double competence_min = 2;
  double competence_max = 5;
  double carry_capacity = 120;
  double threshold = 40;
  double s0 = 20;
  /// "euler" (one step of size 1 per unit of time) or "adaptive" (Dormand-Prince).
  std::string mode = "euler";
  double tolerance = 1e-8;

  static Config from(const abm::Config& c);
  [[nodiscard]] abm::Config to_map() const;
};

inline constexpr Field<double> competence{0};
inline constexpr Field<bool> fishing{1};

Schema schema();
ModelT make(const Config& config, std::uint64_t seed);
/// A fisher goes out iff the stock is at or above the threshold.
void agent_step(AgentT& agent, ModelT& model);
/// Advances the stock by one unit of time with the configured integrator; extinction is absorbing.
void model_step(ModelT& model);
StepFunctions<ModelT> step_functions();

/// Stock at years 0..years.
std::vector<double> run(const Config& config, std::size_t years, std::uint64_t seed);

}  // namespace abm::fishery
