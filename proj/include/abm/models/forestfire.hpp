#pragma once

#include "abm/config.hpp"
#include "abm/model.hpp"
#include "abm/space/grid.hpp"

namespace abm::forestfire {

using Space = GridSpace<2>;
using ModelT = Model<Space>;

struct Config {
  int width = 100;
  int height = 100;
  double density = 0.7;
  /// "euclidean" spreads to the 4 edge neighbors, "chebyshev" to all 8.
  std::string metric = "euclidean";

  static Config from(const abm::Config& c);
  [[nodiscard]] abm::Config to_map() const;
};

enum Cell : std::int64_t { empty = 0, green = 1, burning = 2, burnt = 3 };

/// Each cell holds a tree with probability `density`; trees in column x = 0 start burning.
/// State lives in the array "trees" and the properties "burning", "burnt" and "trees_initial".
ModelT make(const Config& config, std::uint64_t seed);
/// Every cell burning at the start of the step ignites its green neighbors (radius 1) and burns out.
void model_step(ModelT& model);
StepFunctions<ModelT> step_functions();

[[nodiscard]] bool finished(const ModelT& model);
/// Burnt trees over initial trees (0 when the forest is empty).
[[nodiscard]] double burnt_fraction(const ModelT& model);

}  // namespace abm::forestfire
