#include "abm/models/fishery.hpp"

#include <algorithm>

#include "abm/ode.hpp"

namespace abm::fishery {

Config Config::from(const abm::Config& c) {
  require_known_keys(c, {"n_fishers", "competence_min", "competence_max", "carry_capacity", "threshold", "s0", "mode",
                         "tolerance"});
  Config o;
  o.n_fishers = config_int(c, "n_fishers", o.n_fishers);
  o.competence_min = config_real(c, "competence_min", o.competence_min);
  o.competence_max = config_real(c, "competence_max", o.competence_max);
  o.carry_capacity = config_real(c, "carry_capacity", o.carry_capacity);
  o.threshold = config_real(c, "threshold", o.threshold);
  o.s0 = config_real(c, "s0", o.s0);
  o.mode = config_string(c, "mode", o.mode);
  o.tolerance = config_real(c, "tolerance", o.tolerance);
  if (o.n_fishers < 0) throw ConfigError("fishery: n_fishers must be non-negative");
  if (!(o.competence_min >= 0 && o.competence_min <= o.competence_max))
    throw ConfigError("fishery: competence range must satisfy 0 <= min <= max");
  if (!(o.carry_capacity > 0)) throw ConfigError("fishery: carry_capacity must be positive");
  if (!(o.s0 > 0 && o.s0 <= o.carry_capacity)) throw ConfigError("fishery: s0 must lie in (0, carry_capacity]");
  if (o.mode != "euler" && o.mode != "adaptive") throw ConfigError("fishery: mode must be euler or adaptive");
  if (!(o.tolerance > 0)) throw ConfigError("fishery: tolerance must be positive");
  return o;
}

abm::Config Config::to_map() const {
  return {{"n_fishers", n_fishers},   {"competence_min", competence_min}, {"competence_max", competence_max},
          {"carry_capacity", carry_capacity}, {"threshold", threshold}, {"s0", s0},
          {"mode", mode},             {"tolerance", tolerance}};
}

Schema schema() {
  Schema s;
  s.add_kind({"Fisher", {{"competence", 0.0}, {"fishing", false}}});
  return s;
}

ModelT make(const Config& config, std::uint64_t seed) {
  Properties props{{"carry_capacity", config.carry_capacity},
                   {"threshold", config.threshold},
                   {"mode", config.mode},
                   {"tolerance", config.tolerance},
                   {"stock", config.s0},
                   {"time", 0.0},
                   {"ode_step", 0.0},
                   {"harvest", 0.0}};
  ModelT model("fishery", NoSpace{}, schema(), std::move(props), ModelT::SchedulerType::fastest(), seed);
  for (std::int64_t i = 0; i < config.n_fishers; ++i)
    model.add_agent(0, {model.rng().uniform(config.competence_min, config.competence_max), false}, {});
  return model;
}

void agent_step(AgentT& agent, ModelT& model) { agent[fishing] = model.get<double>("stock") >= model.get<double>("threshold"); }

void model_step(ModelT& model) {
  double h = 0;
  for (const auto& [id, a] : model.agents())
    if (a[fishing]) h += a[competence];
  const double k = model.get<double>("carry_capacity");
  double s = model.get<double>("stock");
  const double t = model.get<double>("time");
  if (model.get<std::string>("mode") == "euler") {
    s += s * (1 - s / k) - h;
  } else {
    using Integrator = ode::AdaptiveIntegrator<double, 1>;
    auto rhs = [](double, const Integrator::State& y, const Integrator::Params& p) {
      return Integrator::State(y[0] * (1 - y[0] / p.at("K")) - p.at("h"));
    };
    ode::IntegratorConfig cfg;
    cfg.abs_tol = cfg.rel_tol = model.get<double>("tolerance");
    Integrator integrator(rhs, {{"K", k}, {"h", h}}, t, Integrator::State(s), cfg, model.get<double>("ode_step"));
    integrator.step_to(t + 1);
    s = integrator.state()[0];
    model.set_property("ode_step", integrator.proposed_step());
  }
  model.set_property("stock", std::max(s, 0.0));
  model.set_property("time", t + 1);
  model.set_property("harvest", h);
}

StepFunctions<ModelT> step_functions() { return {agent_step, model_step}; }

std::vector<double> run(const Config& config, std::size_t years, std::uint64_t seed) {
  auto model = make(config, seed);
  const auto fns = step_functions();
  std::vector<double> stock{model.get<double>("stock")};
  for (std::size_t y = 0; y < years; ++y) {
    step_once(model, fns);
    stock.push_back(model.get<double>("stock"));
  }
  return stock;
}

}  // namespace abm::fishery
