#include "abm/optimize.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "abm/errors.hpp"
#include "abm/rng.hpp"
#include "abm/table.hpp"

namespace abm {

CostFn weighted(MultiCostFn costs, Eigen::VectorXd weights) {
  return [costs = std::move(costs), weights = std::move(weights)](const Eigen::VectorXd& x, std::uint64_t seed) {
    const Eigen::VectorXd c = costs(x, seed);
    if (c.size() != weights.size()) throw ContractViolation("objective count does not match the weight count");
    return weights.dot(c);
  };
}

namespace {

void validate(const OptimizeSpec& s) {
  const auto d = s.lower.size();
  if (d == 0 || s.upper.size() != d) throw ContractViolation("bounds must be non-empty and of equal size");
  if (!s.names.empty() && static_cast<Eigen::Index>(s.names.size()) != d)
    throw ContractViolation("parameter names do not match the bounds");
  if (!(s.lower.array() < s.upper.array()).all()) throw ContractViolation("bounds must satisfy lower < upper");
  if (s.population < 4) throw ContractViolation("differential evolution needs a population of at least 4");
  if (s.budget < s.population) throw ContractViolation("budget must cover the initial population");
  if (!(s.F > 0 && s.F < 2)) throw ContractViolation("F must lie in (0, 2)");
  if (!(s.CR >= 0 && s.CR <= 1)) throw ContractViolation("CR must lie in [0, 1]");
  if (s.replicates == 0) throw ContractViolation("replicates must be at least 1");
  if (!s.cost) throw ContractViolation("a cost function is required");
}

}  // namespace

OptimizeResult optimize(const OptimizeSpec& spec) {
  validate(spec);
  const auto dim = spec.lower.size();
  const std::size_t np = spec.population;
  Rng rng(spec.seed);
  std::vector<std::uint64_t> replicate_seeds;
  for (std::size_t r = 0; r < spec.replicates; ++r) replicate_seeds.push_back(splitmix64_once(spec.seed ^ (r + 1)));

  OptimizeResult out;
  out.evaluations = 0;
  std::size_t generation = 0;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    double total = 0;
    for (auto seed : replicate_seeds) total += spec.cost(x, seed);
    double c = total / static_cast<double>(spec.replicates);
    if (!std::isfinite(c)) c = std::numeric_limits<double>::infinity();
    ++out.evaluations;
    out.evaluated.push_back({generation, x, c});
    return c;
  };

  std::vector<Eigen::VectorXd> pop(np, Eigen::VectorXd(dim));
  std::vector<double> cost(np);
  for (std::size_t i = 0; i < np; ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) pop[i][d] = rng.uniform(spec.lower[d], spec.upper[d]);
    cost[i] = evaluate(pop[i]);
  }
  std::size_t best = 0;
  auto record = [&] {
    for (std::size_t i = 0; i < np; ++i)
      if (cost[i] < cost[best]) best = i;
    out.generations.push_back({generation, out.evaluations, cost[best], pop[best]});
  };
  record();

  Eigen::VectorXd trial(dim);
  while (out.evaluations < spec.budget) {
    ++generation;
    for (std::size_t i = 0; i < np && out.evaluations < spec.budget; ++i) {
      std::size_t a, b, c;
      do a = rng.next_below(np); while (a == i);
      do b = rng.next_below(np); while (b == i || b == a);
      do c = rng.next_below(np); while (c == i || c == a || c == b);
      const auto forced = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(dim)));
      for (Eigen::Index d = 0; d < dim; ++d) {
        const bool take = d == forced || rng.next_float() < spec.CR;
        trial[d] = take ? pop[a][d] + spec.F * (pop[b][d] - pop[c][d]) : pop[i][d];
      }
      trial = trial.cwiseMax(spec.lower).cwiseMin(spec.upper);
      const double tc = evaluate(trial);
      if (tc <= cost[i]) {
        pop[i] = trial;
        cost[i] = tc;
      }
    }
    record();
  }
  out.best = pop[best];
  out.best_cost = cost[best];
  return out;
}

void write_generation_log(const OptimizeSpec& spec, const OptimizeResult& result, std::ostream& out) {
  std::vector<std::string> names{"generation", "evaluations", "best_cost"};
  for (Eigen::Index d = 0; d < spec.lower.size(); ++d)
    names.push_back(spec.names.empty() ? "x" + std::to_string(d) : spec.names[static_cast<std::size_t>(d)]);
  DataTable t(std::move(names));
  for (const auto& g : result.generations) {
    std::vector<Value> row{static_cast<std::int64_t>(g.generation), static_cast<std::int64_t>(g.evaluations), g.best_cost};
    for (Eigen::Index d = 0; d < g.best.size(); ++d) row.emplace_back(g.best[d]);
    t.append_row(std::move(row));
  }
  write_csv(t, out);
}

}  // namespace abm
