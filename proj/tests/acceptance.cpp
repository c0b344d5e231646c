// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any line fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "abm/ensemble.hpp"
#include "abm/models/fishery.hpp"
#include "abm/models/forestfire.hpp"
#include "abm/models/schelling.hpp"
#include "abm/ode.hpp"
#include "abm/optimize.hpp"
#include "abm/registry.hpp"
#include "ring_space.hpp"
#include "schelling_tuning.hpp"
#include "space_conformance.hpp"

using namespace abm;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  failures += !ok;
}

std::string fmt(double x, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

void schelling_monotone() {
  const auto t0 = Clock::now();
  const auto fns = schelling::step_functions();
  bool monotone = true;
  double worst = 1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto m = schelling::make({}, seed);
    std::size_t last = 0;
    for (int s = 0; s < 100; ++s) {
      step_once(m, fns);
      std::size_t happy = 0;
      for (const auto& [id, a] : m.agents()) happy += a[schelling::mood];
      monotone = monotone && happy >= last;
      last = happy;
    }
    worst = std::min(worst, double(last) / double(m.agent_count()));
  }
  const double t = seconds_since(t0);
  report("schelling monotone happiness", monotone && worst >= 0.95 && t < 5,
         std::string("non-decreasing=") + (monotone ? "yes" : "no") + ", lowest happy fraction at step 100 " + fmt(worst) +
             " (>= 0.95), " + fmt(t) + " s (< 5)");
}

void run_shape_fixture() {
  using M = schelling::ModelT;
  auto m = schelling::make({}, 42);
  const auto x = AgentCollector<M>::function("x", [](const M::AgentType& a, const M&) -> Value { return std::int64_t{a.pos()[0]}; });
  const auto r = run(m, schelling::step_functions(), 5,
                     {AgentCollector<M>::property("mood").aggregated(aggregate::sum()), x.aggregated(aggregate::maximum())});
  std::vector<std::int64_t> mood, maxx, steps;
  for (std::size_t i = 0; i < r.agents.rows(); ++i) {
    steps.push_back(std::get<std::int64_t>(r.agents.row(i)[0]));
    mood.push_back(std::get<std::int64_t>(r.agents.row(i)[1]));
    maxx.push_back(std::get<std::int64_t>(r.agents.row(i)[2]));
  }
  const bool ok = r.agents.names() == std::vector<std::string>{"step", "sum_mood", "maximum_x"} &&
                  steps == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5} &&
                  mood == std::vector<std::int64_t>{0, 211, 277, 294, 302, 307} &&
                  maxx == std::vector<std::int64_t>(6, 19);
  std::string values;
  for (auto v : mood) values += (values.empty() ? "" : ",") + std::to_string(v);
  report("run-shape fixture (seed 42)", ok, "columns step,sum_mood,maximum_x; steps 0-5; sum_mood " + values);
}

void forest_fire() {
  const auto t0 = Clock::now();
  const auto fns = forestfire::step_functions();
  auto mean_burnt = [&](double p) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto m = forestfire::make({100, 100, p, "euclidean"}, seed);
      step(m, fns, Until<forestfire::ModelT>{[](const auto& model, std::size_t) { return forestfire::finished(model); }});
      total += forestfire::burnt_fraction(m);
    }
    return total / 20;
  };
  const double low = mean_burnt(0.4), high = mean_burnt(0.8);
  const double t = seconds_since(t0);
  report("forest fire phase transition", low < 0.15 && high > 0.85 && t < 10,
         "mean burnt fraction " + fmt(low) + " at p=0.4 (< 0.15), " + fmt(high) + " at p=0.8 (> 0.85), " + fmt(t) + " s (< 10)");
}

void continuous_oracle() {
  const auto t0 = Clock::now();
  std::optional<std::string> failure;
  for (std::uint64_t seed = 0; seed < 1000 && !failure; ++seed) failure = conformance::continuous_trial(seed);
  const double t = seconds_since(t0);
  report("continuous neighbor oracle", !failure && t < 5,
         failure ? *failure : "1000 configurations equal brute force, " + fmt(t) + " s (< 5)");
}

void ode_accuracy() {
  using P1 = ode::Problem<double, 1>;
  P1 logistic;
  logistic.rhs = [](double, const P1::State& y, const P1::Params&) { return P1::State(y[0] * (1 - y[0] / 120)); };
  logistic.y0 = P1::State(10.0);
  logistic.t1 = 10;
  ode::IntegratorConfig tight;
  tight.abs_tol = tight.rel_tol = 1e-10;
  const double exact = 120 * 10 * std::exp(10.0) / (120 + 10 * (std::exp(10.0) - 1));
  const double err = std::abs(ode::integrate_adaptive(logistic, tight).back()[0] - exact);

  P1 growth;
  growth.rhs = [](double, const P1::State& y, const P1::Params&) { return y; };
  growth.y0 = P1::State(1.0);
  growth.t1 = 1;
  auto euler_err = [&](double dt) { return std::abs(ode::integrate_euler(growth, dt).back()[0] - std::exp(1.0)); };
  const double ratio = euler_err(0.01) / euler_err(0.005);

  ode::IntegratorConfig loose;
  loose.abs_tol = loose.rel_tol = 1e-5;
  const auto adaptive = ode::integrate_adaptive(growth, loose);
  const double target = std::abs(adaptive.back()[0] - std::exp(1.0));
  double dt = 0.1;
  while (euler_err(dt) > target && dt > 1e-7) dt /= 2;
  const auto euler_evals = ode::integrate_euler(growth, dt).rhs_evaluations;
  const bool fewer = euler_err(dt) <= target && adaptive.rhs_evaluations < euler_evals;

  fishery::Config adaptive_cfg;
  adaptive_cfg.mode = "adaptive";
  const auto a = fishery::run({}, 50, 42), b = fishery::run(adaptive_cfg, 50, 42);
  double gap = 0;
  for (std::size_t y = 1; y <= 50; ++y) gap += std::abs(a[y] - b[y]);
  gap /= 50;

  report("ode accuracy", err < 1e-6 && ratio >= 1.8 && ratio <= 2.2 && fewer && gap > 5,
         "logistic error " + fmt(err) + " (< 1e-6), euler ratio " + fmt(ratio) + " (in [1.8, 2.2]), rhs evaluations " +
             std::to_string(adaptive.rhs_evaluations) + " adaptive vs " + std::to_string(euler_evals) +
             " euler, fishery mean gap " + fmt(gap) + " (> 5)");
}

void checkpoint_identity() {
  std::string bad;
  for (const auto& info : catalog()) {
    auto original = info.create(info.defaults, 42);
    original->step(10);
    const auto saved = original->checkpoint();
    original->step(10);
    auto resumed = restore_simulation(saved);
    resumed->step(10);
    if (resumed->state() != original->state()) bad += " " + info.name;
  }
  report("checkpoint trajectory identity", bad.empty(),
         bad.empty() ? "5 models identical after save, load and 10 more steps" : "diverged:" + bad);
}

void ensemble_determinism() {
  const auto t0 = Clock::now();
  std::vector<Value> mins;
  for (std::int64_t k = 0; k <= 8; ++k) mins.emplace_back(k);
  const ScanSpec spec{{{"min_to_be_happy", mins}}, 5, 42};
  const auto runner = model_runner<schelling::ModelT>(
      [](const Config& c, std::uint64_t seed) { return schelling::make(schelling::Config::from(c), seed); },
      schelling::step_functions(), 20, {AgentCollector<schelling::ModelT>::property("mood").aggregated(aggregate::sum())});
  auto csv = [&](std::size_t workers) {
    std::ostringstream os;
    write_csv(paramscan(spec, runner, workers).agents, os);
    return os.str();
  };
  const auto one = csv(1), eight = csv(8);
  report("ensemble determinism", one == eight,
         "45 runs, workers 1 vs 8: " + std::string(one == eight ? "byte-identical" : "differ") + " (" +
             std::to_string(one.size()) + " bytes), " + fmt(seconds_since(t0)) + " s");
}

void optimizer() {
  int solved = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    OptimizeSpec s;
    s.lower = Eigen::VectorXd::Constant(3, -5);
    s.upper = Eigen::VectorXd::Constant(3, 5);
    s.cost = [](const Eigen::VectorXd& x, std::uint64_t) { return x.squaredNorm(); };
    s.budget = 4000;
    s.seed = seed;
    const auto r = optimize(s);
    worst = std::max(worst, r.best_cost);
    solved += r.best_cost < 1e-3 && r.evaluations <= 4000;
  }

  std::vector<double> scan;
  for (std::int64_t k = 0; k <= 8; ++k) scan.push_back(tuning::steps_to_settle(k));
  const double best = *std::min_element(scan.begin(), scan.end());
  std::string argmin;
  for (std::size_t k = 0; k < scan.size(); ++k)
    if (scan[k] == best) argmin += (argmin.empty() ? "" : ",") + std::to_string(k);
  OptimizeSpec t;
  t.lower = Eigen::VectorXd::Constant(1, -0.5);
  t.upper = Eigen::VectorXd::Constant(1, 8.5);
  t.cost = [](const Eigen::VectorXd& x, std::uint64_t) { return tuning::steps_to_settle(tuning::as_setting(x[0])); };
  t.population = 8;
  t.budget = 80;
  t.seed = 42;
  const auto r = optimize(t);
  const auto chosen = tuning::as_setting(r.best[0]);
  const bool match = scan[std::size_t(chosen)] == best;
  report("optimizer", solved == 10 && match,
         "sphere solved " + std::to_string(solved) + "/10 (worst " + fmt(worst) + "), schelling DE best min_to_be_happy=" +
             std::to_string(chosen) + " vs exhaustive argmin {" + argmin + "} at " + fmt(best) + " steps");
}

void performance() {
  const std::string cmd = std::string(ABM_CLI_PATH) + " bench --repeat 3 --enforce --slack 3 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  if (pipe) {
    char buf[4096];
    while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  }
  const int status = pipe ? ::pclose(pipe) : -1;
  const bool ok = status == 0;
  std::istringstream lines(out);
  std::string summary;
  for (std::string line; std::getline(lines, line);) summary += "\n    " + line;
  report("performance gates (3x slack)", ok, std::string(ok ? "all gates met" : "bench --enforce failed") + summary);
}

void space_contract() {
  std::vector<std::string> failed;
  for (bool periodic : {false, true})
    for (Metric metric : {Metric::chebyshev, Metric::euclidean}) {
      const std::array<int, 2> dims{9, 4};
      if (conformance::run(GridSpace<2>(dims, periodic, metric), conformance::grid_within<2>(dims, periodic, metric),
                           {300, 3, {0, 1, 1.5, 2, 3.7, 6}, 7}))
        failed.push_back("grid");
    }
  for (bool periodic : {false, true}) {
    const Eigen::Vector2d extent(10, 6);
    if (conformance::run(ContinuousSpace<2>(extent, periodic, 0.7), conformance::continuous_within<2>(extent, periodic),
                         {300, 3, {0, 0.5, 1.3, 2.9, 5, 20}, 9}))
      failed.push_back("continuous");
  }
  const GraphSpace g = conformance::random_graph(25, 0.08, 3);
  const auto d = conformance::hops(g);
  if (conformance::run(g, [&](NodeId a, NodeId q, double r) { return d[std::size_t(q)][std::size_t(a)] <= std::floor(r); },
                       {300, 3, {0, 1, 2, 3.5}, 11}))
    failed.push_back("graph");
  for (int n : {1, 2, 7, 10}) {
    const RingSpace ring(n);
    if (conformance::run(ring, [&](int a, int q, double r) { return ring.distance(a, q) <= std::floor(r); },
                         {200, 3, {0, 1, 2, 4, 9}, std::uint64_t(n)}))
      failed.push_back("ring");
  }
  std::ifstream ring_file(std::string(ABM_SOURCE_DIR) + "/tests/ring_space.hpp");
  std::size_t ring_lines = 0;
  for (std::string line; std::getline(ring_file, line);) ++ring_lines;
  std::string detail = "grid, continuous, graph and ring ";
  detail += failed.empty() ? "pass" : "failures:";
  for (const auto& f : failed) detail += " " + f;
  report("space contract pluggability", failed.empty() && ring_lines > 0 && ring_lines <= 100,
         detail + "; ring space is " + std::to_string(ring_lines) + " lines (<= 100)");
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{schelling_monotone, run_shape_fixture, forest_fire,  continuous_oracle,
                                         ode_accuracy,       checkpoint_identity, ensemble_determinism, optimizer,
                                         performance,        space_contract};
  for (auto criterion : criteria) {
    try {
      criterion();
    } catch (const std::exception& e) {
      report("criterion raised", false, e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
