#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace abm {

/// Cost of a candidate for one replicate seed. Non-finite costs count as +infinity.
using CostFn = std::function<double(const Eigen::VectorXd& x, std::uint64_t seed)>;
using MultiCostFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, std::uint64_t seed)>;

/// Scalarizes a vector of objectives by a weighted sum.
CostFn weighted(MultiCostFn costs, Eigen::VectorXd weights);

/// Differential evolution, rand/1/bin, over the box [lower, upper].
struct OptimizeSpec {
  std::vector<std::string> names;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  CostFn cost;
  std::size_t population = 20;
  double F = 0.8;
  double CR = 0.9;
  std::size_t budget = 4000;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
};

struct GenerationRecord {
  std::size_t generation;
  std::size_t evaluations;
  double best_cost;
  Eigen::VectorXd best;
};

struct Evaluation {
  std::size_t generation;
  Eigen::VectorXd x;
  double cost;
};

struct OptimizeResult {
  Eigen::VectorXd best;
  double best_cost;
  std::size_t evaluations;
  std::vector<GenerationRecord> generations;
  std::vector<Evaluation> evaluated;
};

/// Generation 0 draws each coordinate uniformly in its bounds. Every later generation builds, for
/// each member i in order, v = a + F (b - c) with a, b, c distinct from each other and from i,
/// crosses it with member i coordinate-wise with rate CR (one random coordinate always from v),
/// clamps to the bounds, and keeps the trial when its cost is <= the member's.
/// One evaluation is one candidate; its cost is the mean over `replicates` seeds that are the same
/// for every candidate. Stops when the budget is spent, possibly mid-generation.
OptimizeResult optimize(const OptimizeSpec& spec);

/// Writes the generation log as CSV: generation, evaluations, best_cost, then one column per parameter.
void write_generation_log(const OptimizeSpec& spec, const OptimizeResult& result, std::ostream& out);

}  // namespace abm
