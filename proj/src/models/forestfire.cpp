#include "abm/models/forestfire.hpp"

namespace abm::forestfire {

Config Config::from(const abm::Config& c) {
  require_known_keys(c, {"width", "height", "density", "metric"});
  Config o;
  o.width = static_cast<int>(config_int(c, "width", o.width));
  o.height = static_cast<int>(config_int(c, "height", o.height));
  o.density = config_real(c, "density", o.density);
  o.metric = config_string(c, "metric", o.metric);
  if (o.width < 1 || o.height < 1) throw ConfigError("forestfire: grid dimensions must be positive");
  if (!(o.density >= 0 && o.density <= 1)) throw ConfigError("forestfire: density must lie in [0, 1]");
  if (o.metric != "euclidean" && o.metric != "chebyshev") throw ConfigError("forestfire: metric must be euclidean or chebyshev");
  return o;
}

abm::Config Config::to_map() const {
  return {{"width", std::int64_t{width}}, {"height", std::int64_t{height}}, {"density", density}, {"metric", metric}};
}

ModelT make(const Config& config, std::uint64_t seed) {
  const auto metric = config.metric == "chebyshev" ? Metric::chebyshev : Metric::euclidean;
  ModelT model("forestfire", Space({config.width, config.height}, false, metric), Schema{},
               {{"density", config.density}}, ModelT::SchedulerType::fastest(), seed);
  const auto& space = model.space();
  auto& trees = model.array("trees");
  trees.assign(space.cell_count(), empty);
  std::int64_t total = 0, burning_now = 0;
  for (std::size_t c = 0; c < trees.size(); ++c) {
    if (!model.rng().bernoulli(config.density)) continue;
    const bool edge = space.from_linear(c)[0] == 0;
    trees[c] = edge ? burning : green;
    ++total;
    burning_now += edge;
  }
  model.set_property("trees_initial", total);
  model.set_property("burning", burning_now);
  model.set_property("burnt", std::int64_t{0});
  return model;
}

void model_step(ModelT& model) {
  const auto& space = model.space();
  auto& trees = model.array("trees");
  std::vector<std::size_t> fire;
  for (std::size_t c = 0; c < trees.size(); ++c)
    if (trees[c] == burning) fire.push_back(c);
  std::int64_t ignited = 0;
  for (std::size_t c : fire) {
    for (const auto& q : space.neighbor_positions(space.from_linear(c), 1)) {
      auto& t = trees[space.linear(q)];
      if (t == green) {
        t = burning;
        ++ignited;
      }
    }
    trees[c] = burnt;
  }
  model.set_property("burning", ignited);
  model.set_property("burnt", model.get<std::int64_t>("burnt") + static_cast<std::int64_t>(fire.size()));
}

StepFunctions<ModelT> step_functions() { return {{}, model_step}; }

bool finished(const ModelT& model) { return model.get<std::int64_t>("burning") == 0; }

double burnt_fraction(const ModelT& model) {
  const auto total = model.get<std::int64_t>("trees_initial");
  return total == 0 ? 0.0 : static_cast<double>(model.get<std::int64_t>("burnt")) / static_cast<double>(total);
}

}  // namespace abm::forestfire
