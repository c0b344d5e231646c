#include <CLI11.hpp>
#include <boost/system/system_error.hpp>

#include <csignal>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "abm/ensemble.hpp"
#include "abm/optimize.hpp"
#include "abm/persist.hpp"
#include "abm/registry.hpp"
#include "abm/serve/server.hpp"
#include "abm/table.hpp"
#include "abm/version.hpp"

namespace {

using namespace abm;

enum Exit { ok = 0, gate_failed = 1, usage = 2, model_error = 3, io_error = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::vector<std::string> assignments;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> adata;
  std::vector<std::string> mdata;
  bool adata_set = false;
  bool mdata_set = false;
  std::size_t when = 1;
  std::string out;
};

std::size_t default_workers() {
  if (const char* env = std::getenv("ABM_WORKERS")) {
    try {
      const auto n = std::stoul(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("ABM_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

const ModelInfo& lookup(const std::string& name) {
  const auto* info = find_model(name);
  if (!info) throw UsageError("unknown model '" + name + "' (available: " + model_names() + ")");
  return *info;
}

std::string join(const std::vector<std::string>& items, char sep = ',') {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

void add_collection(CLI::App* app, Common& c) {
  app->add_option("--steps", c.steps, "Steps to run")->capture_default_str();
  app->add_option("--adata", c.adata, "Agent collectors, comma separated")->delimiter(',');
  app->add_option("--mdata", c.mdata, "Model collectors, comma separated")->delimiter(',');
  app->add_option("--when", c.when, "Collect every n steps")->capture_default_str();
  app->add_option("--out", c.out, "Write <out>_agents.csv and <out>_model.csv instead of stdout");
}

void resolve_collectors(Common& c, const ModelInfo& info, const CLI::App* app) {
  c.adata_set = app->count("--adata") > 0;
  c.mdata_set = app->count("--mdata") > 0;
  if (!c.adata_set && !c.mdata_set) {
    c.adata = info.default_adata;
    c.mdata = info.default_mdata;
  }
}

std::string collection_flags(const Common& c) {
  std::string out = " --steps " + std::to_string(c.steps);
  if (!c.adata.empty()) out += " --adata " + join(c.adata);
  if (!c.mdata.empty()) out += " --mdata " + join(c.mdata);
  if (c.when != 1) out += " --when " + std::to_string(c.when);
  return out;
}

std::string provenance(const std::string& command) { return std::string("abm ") + kVersion + ": abm " + command; }

void write_tables(const RunResult& r, const Common& c, const std::string& prov) {
  const std::vector<std::string> comments{prov};
  if (c.out.empty()) {
    bool first = true;
    if (!c.adata.empty()) {
      write_csv(r.agents, std::cout, comments);
      first = false;
    }
    if (!c.mdata.empty()) {
      if (!first) std::cout << '\n';
      write_csv(r.model, std::cout, comments);
    }
    return;
  }
  if (!c.adata.empty()) persist::write_file(c.out + "_agents.csv", to_csv(r.agents, comments));
  if (!c.mdata.empty()) persist::write_file(c.out + "_model.csv", to_csv(r.model, comments));
}

int cmd_run(const std::string& model, Common& c, const std::string& checkpoint, const CLI::App* app) {
  const auto& info = lookup(model);
  resolve_collectors(c, info, app);
  const Config config = merged_config(info, parse_assignments(c.assignments));
  auto sim = info.create(config, c.seed);
  sim->validate_collectors(c.adata, c.mdata);
  const auto result = sim->run(c.steps, c.adata, c.mdata, c.when);
  write_tables(result, c, provenance("run " + model + " " + format_config(config) + " --seed " + std::to_string(c.seed) +
                                     collection_flags(c)));
  if (!checkpoint.empty()) persist::write_file(checkpoint, sim->checkpoint());
  return ok;
}

int cmd_resume(const std::string& path, Common& c, const std::string& save, const CLI::App* app) {
  auto sim = restore_simulation(persist::read_file(path));
  const auto& info = lookup(sim->model_name());
  resolve_collectors(c, info, app);
  sim->validate_collectors(c.adata, c.mdata);
  const auto result = sim->run(c.steps, c.adata, c.mdata, c.when);
  write_tables(result, c, provenance("resume --checkpoint " + path + collection_flags(c)));
  if (!save.empty()) persist::write_file(save, sim->checkpoint());
  return ok;
}

int cmd_scan(const std::string& model, Common& c, std::size_t replicates, std::size_t workers, std::uint64_t base_seed,
             const CLI::App* app) {
  const auto& info = lookup(model);
  resolve_collectors(c, info, app);
  ScanSpec spec;
  spec.replicates = replicates;
  spec.base_seed = base_seed;
  Config fixed;
  for (const auto& item : c.assignments) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=values, got '" + item + "'");
    auto values = parse_scan_values(std::string_view(item).substr(eq + 1));
    if (values.size() == 1) fixed[item.substr(0, eq)] = values.front();
    else spec.parameters.emplace_back(item.substr(0, eq), std::move(values));
  }
  if (replicates == 0) throw UsageError("--replicates must be at least 1");
  if (workers == 0) throw UsageError("--workers must be at least 1");
  const auto settings = expand(spec);
  for (const auto& s : settings) {
    Config merged = fixed;
    for (const auto& [k, v] : s.values) merged[k] = v;
    (void)merged_config(info, merged);
  }
  info.create(merged_config(info, fixed), base_seed)->validate_collectors(c.adata, c.mdata);

  const auto runner = [&](const Config& setting, std::uint64_t seed) {
    Config merged = fixed;
    for (const auto& [k, v] : setting) merged[k] = v;
    return info.create(merged_config(info, merged), seed)->run(c.steps, c.adata, c.mdata, c.when);
  };
  const auto result = paramscan(spec, runner, workers);

  std::string command = "scan " + model;
  for (const auto& item : c.assignments) command += " " + item;
  command += " --replicates " + std::to_string(replicates) + " --base-seed " + std::to_string(base_seed) +
             collection_flags(c);
  write_tables(result, c, provenance(command));
  return ok;
}

/// Counts lines that are neither blank nor comment-only.
std::size_t count_loc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::size_t n = 0;
  bool block = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view s(line);
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    s.remove_prefix(first);
    if (block) {
      const auto end = s.find("*/");
      if (end == std::string_view::npos) continue;
      block = false;
      s.remove_prefix(end + 2);
      const auto rest = s.find_first_not_of(" \t\r");
      if (rest == std::string_view::npos) continue;
      s.remove_prefix(rest);
    }
    if (s.starts_with("//")) continue;
    if (s.starts_with("/*")) {
      const auto end = s.find("*/", 2);
      if (end == std::string_view::npos) {
        block = true;
        continue;
      }
      const auto rest = s.substr(end + 2).find_first_not_of(" \t\r");
      if (rest == std::string_view::npos) continue;
    }
    ++n;
  }
  return n;
}

struct BenchCase {
  std::string model;
  Config config;
  std::size_t steps;
  bool until_finished;
  double gate_ms;
};

int cmd_bench(std::size_t repeat, bool enforce, double slack, std::uint64_t seed, const std::string& out) {
  const std::vector<BenchCase> cases{
      {"schelling", {{"width", std::int64_t{20}}, {"height", std::int64_t{20}}}, 100, false, 50},
      {"flocking", {{"n_birds", std::int64_t{300}}}, 100, false, 200},
      {"wolfsheep", {{"width", std::int64_t{25}}, {"height", std::int64_t{25}}}, 500, false, 1000},
      {"forestfire", {{"width", std::int64_t{100}}, {"height", std::int64_t{100}}}, 100000, true, 100},
  };
  if (repeat == 0) throw UsageError("--repeat must be at least 1");
  DataTable table({"model", "steps", "time_ms", "steps_per_sec", "loc", "gate_ms", "pass"});
  bool all_pass = true;
  for (const auto& bc : cases) {
    const auto& info = lookup(bc.model);
    const Config config = merged_config(info, bc.config);
    double best = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    for (std::size_t r = 0; r < repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      auto sim = info.create(config, seed);
      if (bc.until_finished) {
        steps = sim->step_until_finished(bc.steps);
      } else {
        sim->step(bc.steps);
        steps = bc.steps;
      }
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    const std::string root = ABM_SOURCE_DIR;
    const std::size_t loc = count_loc(root + "/" + info.source_file) +
                            count_loc(root + "/include/abm/models/" + bc.model + ".hpp");
    const double gate = enforce ? bc.gate_ms * slack : bc.gate_ms;
    const bool pass = best < gate;
    all_pass = all_pass && pass;
    table.append_row({bc.model, std::int64_t(steps), best, best > 0 ? 1000.0 * double(steps) / best : 0.0,
                      std::int64_t(loc), gate, pass});
  }
  const std::vector<std::string> comments{provenance("bench --repeat " + std::to_string(repeat) + " --seed " +
                                                     std::to_string(seed) + (enforce ? " --enforce" : ""))};
  if (out.empty()) {
    std::cout << std::left << std::setw(12) << "model" << std::right << std::setw(8) << "steps" << std::setw(12)
              << "time_ms" << std::setw(14) << "steps/sec" << std::setw(6) << "LOC" << std::setw(10) << "gate_ms"
              << "  result\n";
    for (std::size_t i = 0; i < table.rows(); ++i) {
      const auto row = table.row(i);
      std::cout << std::left << std::setw(12) << to_string(row[0]) << std::right << std::setw(8) << to_int(row[1])
                << std::fixed << std::setprecision(2) << std::setw(12) << to_double(row[2]) << std::setprecision(0)
                << std::setw(14) << to_double(row[3]) << std::setw(6) << to_int(row[4]) << std::setw(10)
                << to_double(row[5]) << "  " << (std::get<bool>(row[6]) ? "ok" : "SLOW") << '\n';
    }
  } else {
    persist::write_file(out, to_csv(table, comments));
  }
  return enforce && !all_pass ? gate_failed : ok;
}

struct OptimizeArgs {
  std::vector<std::string> bounds;
  std::string objective;
  double reach = std::numeric_limits<double>::quiet_NaN();
  bool maximize = false;
  std::size_t population = 20;
  std::size_t budget = 400;
  std::size_t replicates = 1;
  double F = 0.8;
  double CR = 0.9;
  std::string log;
};

int cmd_optimize(const std::string& model, Common& c, OptimizeArgs& a) {
  const auto& info = lookup(model);
  Config fixed;
  OptimizeSpec spec;
  std::vector<double> lo, hi;
  std::vector<bool> integral;
  for (const auto& item : c.assignments) {
    const auto eq = item.find('=');
    const auto dots = item.find("..");
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value or key=lo..hi, got '" + item + "'");
    if (dots == std::string::npos) {
      fixed[item.substr(0, eq)] = parse_literal(std::string_view(item).substr(eq + 1));
      continue;
    }
    const Value l = parse_literal(item.substr(eq + 1, dots - eq - 1));
    const Value h = parse_literal(item.substr(dots + 2));
    const auto numeric = [](const Value& v) { return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v); };
    if (!numeric(l) || !numeric(h)) throw ConfigError("bounds of '" + item + "' must be numbers");
    spec.names.push_back(item.substr(0, eq));
    lo.push_back(to_double(l));
    hi.push_back(to_double(h));
    integral.push_back(std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(h));
  }
  if (spec.names.empty()) throw UsageError("optimize needs at least one key=lo..hi parameter");
  if (a.objective.empty()) throw UsageError("--objective is required");
  (void)merged_config(info, fixed);
  info.create(merged_config(info, fixed), c.seed)->validate_collectors({}, {a.objective});

  spec.lower = Eigen::Map<Eigen::VectorXd>(lo.data(), Eigen::Index(lo.size()));
  spec.upper = Eigen::Map<Eigen::VectorXd>(hi.data(), Eigen::Index(hi.size()));
  spec.population = a.population;
  spec.budget = a.budget;
  spec.replicates = a.replicates;
  spec.F = a.F;
  spec.CR = a.CR;
  spec.seed = c.seed;
  const auto setting = [&](const Eigen::VectorXd& x) {
    Config config = fixed;
    for (std::size_t i = 0; i < spec.names.size(); ++i) {
      if (integral[i]) config[spec.names[i]] = std::int64_t(std::llround(x[Eigen::Index(i)]));
      else config[spec.names[i]] = x[Eigen::Index(i)];
    }
    return merged_config(info, config);
  };
  const bool reach = !std::isnan(a.reach);
  spec.cost = [&](const Eigen::VectorXd& x, std::uint64_t seed) {
    auto sim = info.create(setting(x), seed & 0x7FFFFFFFFFFFFFFFULL);
    const std::vector<std::string> names{a.objective};
    if (reach) {
      for (std::size_t s = 0; s <= c.steps; ++s) {
        if (s > 0) sim->step(1);
        if (to_double(sim->sample(names).front()) >= a.reach) return double(s);
      }
      return double(c.steps + 1);
    }
    sim->step(c.steps);
    const double v = to_double(sim->sample(names).front());
    return a.maximize ? -v : v;
  };
  const auto result = optimize(spec);

  std::string command = "optimize " + model;
  for (const auto& item : c.assignments) command += " " + item;
  command += " --objective " + a.objective + " --steps " + std::to_string(c.steps) + " --seed " + std::to_string(c.seed) +
             " --population " + std::to_string(a.population) + " --budget " + std::to_string(a.budget) +
             " --replicates " + std::to_string(a.replicates) + " --F " + format_real(a.F) + " --CR " + format_real(a.CR);
  if (reach) command += " --reach " + format_real(a.reach);
  if (a.maximize) command += " --maximize";
  if (!a.log.empty()) {
    std::ostringstream os;
    os << "# " << provenance(command) << '\n';
    write_generation_log(spec, result, os);
    persist::write_file(a.log, os.str());
  }
  std::cout << "best " << format_config(setting(result.best)) << "\ncost " << format_real(result.best_cost)
            << "\nevaluations " << result.evaluations << '\n';
  return ok;
}

int cmd_serve(serve::ServerOptions options) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  serve::Server server(options);
  server.start();
  std::cout << "listening on http://" << options.address << ":" << server.port() << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based modelling engine"};
  app.set_version_flag("--version", std::string(abm::kVersion));
  app.require_subcommand(1);

  Common common;
  std::string model;
  std::string checkpoint;

  auto* run = app.add_subcommand("run", "Run a model and write its data tables");
  run->add_option("model", model, "Model name")->required();
  run->add_option("config", common.assignments, "Config overrides key=value");
  run->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  run->add_option("--checkpoint", checkpoint, "Save the final state to this file");
  add_collection(run, common);

  std::string save;
  auto* resume = app.add_subcommand("resume", "Continue a model from a checkpoint");
  resume->add_option("--checkpoint", checkpoint, "Checkpoint to load")->required();
  resume->add_option("--save", save, "Save the final state to this file");
  add_collection(resume, common);

  std::size_t replicates = 1;
  std::size_t workers = 0;
  std::uint64_t base_seed = 0;
  auto* scan = app.add_subcommand("scan", "Run a parameter scan: key=a..b, key=a..b..step or key=v1,v2");
  scan->add_option("model", model, "Model name")->required();
  scan->add_option("config", common.assignments, "Scanned or fixed parameters");
  scan->add_option("--replicates", replicates, "Runs per setting")->capture_default_str();
  scan->add_option("--workers", workers, "Worker threads (default: ABM_WORKERS or 1)");
  scan->add_option("--base-seed", base_seed, "Base seed for per-run seeds")->capture_default_str();
  add_collection(scan, common);

  std::size_t repeat = 3;
  bool enforce = false;
  double slack = 3.0;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time the benchmark models at their pinned configs");
  bench->add_option("--repeat", repeat, "Runs per model; the fastest counts")->capture_default_str();
  bench->add_flag("--enforce", enforce, "Exit 1 if any model misses its time gate times --slack");
  bench->add_option("--slack", slack, "Gate multiplier under --enforce")->capture_default_str();
  bench->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  bench->add_option("--out", bench_out, "Write the results as CSV");

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Tune model parameters with differential evolution");
  optimize->add_option("model", model, "Model name")->required();
  optimize->add_option("config", common.assignments, "Tuned parameters key=lo..hi, fixed ones key=value");
  optimize->add_option("--objective", opt.objective, "Model collector to minimize")->required();
  optimize->add_option("--reach", opt.reach, "Minimize the first step where the objective reaches this value");
  optimize->add_flag("--maximize", opt.maximize, "Maximize the final objective instead");
  optimize->add_option("--steps", common.steps, "Steps per evaluation")->capture_default_str();
  optimize->add_option("--seed", common.seed, "Optimizer seed")->capture_default_str();
  optimize->add_option("--population", opt.population)->capture_default_str();
  optimize->add_option("--budget", opt.budget, "Maximum evaluations")->capture_default_str();
  optimize->add_option("--replicates", opt.replicates, "Seeds averaged per evaluation")->capture_default_str();
  optimize->add_option("--F", opt.F, "Differential weight")->capture_default_str();
  optimize->add_option("--CR", opt.CR, "Crossover rate")->capture_default_str();
  optimize->add_option("--log", opt.log, "Write the generation log as CSV");

  abm::serve::ServerOptions server;
  std::size_t grace_ms = 30000;
  auto* serve = app.add_subcommand("serve", "Start the exploration server");
  serve->add_option("--port", server.port, "Port, 0 for any free one")->capture_default_str();
  serve->add_option("--address", server.address)->capture_default_str();
  serve->add_option("--static", server.static_dir, "Directory with the browser UI");
  serve->add_option("--grace-ms", grace_ms, "Session lifetime after its last connection")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*run) return cmd_run(model, common, checkpoint, run);
    if (*resume) return cmd_resume(checkpoint, common, save, resume);
    if (*scan) return cmd_scan(model, common, replicates, workers ? workers : default_workers(), base_seed, scan);
    if (*bench) return cmd_bench(repeat, enforce, slack, common.seed, bench_out);
    if (*optimize) return cmd_optimize(model, common, opt);
    if (*serve) {
      server.grace = std::chrono::milliseconds(grace_ms);
      return cmd_serve(server);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const abm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_error;
  } catch (const abm::CorruptCheckpoint& e) {
    std::cerr << "error: corrupt checkpoint: " << e.what() << '\n';
    return io_error;
  } catch (const abm::UnsupportedVersion& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_error;
  } catch (const boost::system::system_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return model_error;
  }
  return usage;
}
