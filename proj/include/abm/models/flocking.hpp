#pragma once

#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/space/continuous.hpp"

namespace abm::flocking {

using Space = ContinuousSpace<2>;
using ModelT = Model<Space>;
using AgentT = ModelT::AgentType;

struct Config {
  std::int64_t n_birds = 300;
  double extent = 100;
  double speed = 1;
  double visual_distance = 5;
  double separation = 2;
  double cohere_factor = 0.03;
  double match_factor = 0.05;
  double separate_factor = 0.25;

  static Config from(const abm::Config& c);
  [[nodiscard]] abm::Config to_map() const;
};

inline constexpr Field<double> vel_x{0};
inline constexpr Field<double> vel_y{1};

Schema schema();
/// Birds at uniform random positions with uniform random headings, periodic square of side `extent`.
ModelT make(const Config& config, std::uint64_t seed);
/// Boids rules. With N neighbors within visual_distance:
///   cohere   = cohere_factor   * mean(offset to neighbor)
///   separate = separate_factor * -sum(offset to neighbors closer than separation) / N
///   match    = match_factor    * mean(neighbor velocity)
///   v' = (v + cohere + separate + match) / 2, rescaled to `speed`; pos' = pos + v'.
/// No neighbors, or a zero v', keeps the current heading.
void agent_step(AgentT& agent, ModelT& model);
StepFunctions<ModelT> step_functions();

}  // namespace abm::flocking
