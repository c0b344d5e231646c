#pragma once

#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/space/grid.hpp"

namespace abm::wolfsheep {

using Space = GridSpace<2>;
using ModelT = Model<Space>;
using AgentT = ModelT::AgentType;

struct Config {
  int width = 25;
  int height = 25;
  std::int64_t n_sheep = 100;
  std::int64_t n_wolves = 20;
  double sheep_reproduce = 0.3;
  double wolf_reproduce = 0.05;
  double sheep_gain = 5;
  double wolf_gain = 20;
  std::int64_t grass_regrowth_time = 30;

  static Config from(const abm::Config& c);
  [[nodiscard]] abm::Config to_map() const;
};

inline constexpr KindId sheep = 0;
inline constexpr KindId wolf = 1;
inline constexpr Field<double> energy{0};

Schema schema();
/// Grass lives in the arrays "fully_grown" (0/1) and "countdown", indexed by linear cell.
ModelT make(const Config& config, std::uint64_t seed);
/// Walk to a random neighboring cell, spend one unit of energy, eat (sheep: grown grass;
/// wolf: a random sheep on the cell), die at energy <= 0, else reproduce with the kind's probability.
void agent_step(AgentT& agent, ModelT& model);
/// Regrowth: a cell not grown with countdown <= 0 grows and resets to the regrowth time,
/// otherwise its countdown decreases.
void model_step(ModelT& model);
StepFunctions<ModelT> step_functions();

std::size_t count(const ModelT& model, KindId kind);
std::size_t grass(const ModelT& model);

}  // namespace abm::wolfsheep
