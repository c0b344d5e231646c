#pragma once

#include "abm/collect.hpp"
#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/space/grid.hpp"

namespace abm::schelling {

using Space = GridSpace<2>;
using ModelT = Model<Space>;
using AgentT = ModelT::AgentType;

struct Config {
  int width = 20;
  int height = 20;
  double density = 0.8;
  std::int64_t min_to_be_happy = 3;

  static Config from(const abm::Config& c);
  [[nodiscard]] abm::Config to_map() const;
};

inline constexpr Field<bool> mood{0};
inline constexpr Field<std::int64_t> group{1};

Schema schema();
/// round(density * cells) agents with groups 1, 2, 1, 2, ... at random empty cells, all unhappy.
ModelT make(const Config& config, std::uint64_t seed);
void agent_step(AgentT& agent, ModelT& model);
StepFunctions<ModelT> step_functions();

}  // namespace abm::schelling
