#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("abm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome abm(const std::string& args, const std::string& env = "") {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + ABM_CLI_PATH + std::string(" ") + args + " 2>" + err.string();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("run prints the step-0 snapshot and one row per step") {
  const auto r = abm("run schelling --steps 5 --seed 42 --adata sum_mood");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 8);
  CHECK(ls[0].rfind("# abm ", 0) == 0);
  CHECK(ls[1] == "step,sum_mood");
  const std::vector<std::string> rows(ls.begin() + 2, ls.begin() + 8);
  CHECK(rows == std::vector<std::string>{"0,0", "1,211", "2,277", "3,294", "4,302", "5,307"});
}

TEST_CASE("unknown models are usage errors naming the alternatives") {
  const auto r = abm("run nosuchmodel");
  CHECK(r.code == 2);
  for (const char* name : {"schelling", "flocking", "wolfsheep", "forestfire", "fishery"}) CHECK(r.err.find(name) != std::string::npos);
  CHECK(abm("frobnicate").code == 2);
  CHECK(abm("run schelling --steps minus").code == 2);
  CHECK(abm("--help").code == 0);
  CHECK(abm("scan schelling min_to_be_happy=0..2", "ABM_WORKERS=zero").code == 2);
}

TEST_CASE("the provenance line reproduces the output") {
  const auto first = (scratch() / "first").string();
  REQUIRE(abm("run wolfsheep n_wolves=10 --steps 30 --seed 5 --when 3 --out " + first).code == 0);
  const auto agents = slurp(first + "_agents.csv");
  const auto model = slurp(first + "_model.csv");
  const auto header = lines(model).at(0);
  const std::string prefix = "# abm 0.1.0: abm ";
  REQUIRE(header.rfind(prefix, 0) == 0);
  CHECK(header.find("n_wolves=10") != std::string::npos);
  const auto second = (scratch() / "second").string();
  REQUIRE(abm(header.substr(prefix.size()) + " --out " + second).code == 0);
  CHECK(slurp(second + "_model.csv") == model);
  CHECK(slurp(second + "_agents.csv") == agents);
  CHECK(lines(model).size() == 2 + 11);
}

TEST_CASE("scan output does not depend on the worker count") {
  const std::string args = "scan schelling min_to_be_happy=0..8 --replicates 5 --steps 20 --adata sum_mood";
  const auto serial = abm(args + " --workers 1");
  const auto parallel = abm(args + " --workers 4");
  REQUIRE(serial.code == 0);
  CHECK(parallel.code == 0);
  CHECK(serial.out == parallel.out);
  CHECK(abm(args, "ABM_WORKERS=3").out == serial.out);
  CHECK(lines(serial.out).size() == 2 + 9 * 5 * 21);
  const auto bad = abm("scan schelling min_to_be_happy=0..12 --steps 3 --adata sum_mood");
  CHECK(bad.code == 3);
  CHECK(bad.err.find("min_to_be_happy=9") != std::string::npos);
}

TEST_CASE("checkpoint and resume continue the run") {
  const auto ck = (scratch() / "w.abmck").string();
  REQUIRE(abm("run fishery --steps 10 --seed 3 --checkpoint " + ck).code == 0);
  const auto resumed = abm("resume --checkpoint " + ck + " --steps 10 --mdata stock");
  REQUIRE(resumed.code == 0);
  const auto whole = abm("run fishery --steps 20 --seed 3 --mdata stock");
  const auto a = lines(resumed.out), b = lines(whole.out);
  REQUIRE(a.size() >= 2);
  const auto value = [](const std::string& row) { return row.substr(row.find(',')); };
  CHECK(value(a.back()) == value(b.back()));
  const auto saved = (scratch() / "again.abmck").string();
  CHECK(abm("resume --checkpoint " + ck + " --steps 0 --save " + saved).code == 0);
  CHECK(slurp(saved) == slurp(ck));
}

TEST_CASE("model and io errors have their own exit codes") {
  const auto collector = abm("run schelling --adata bogus");
  CHECK(collector.code == 3);
  CHECK(collector.err.find("bogus") != std::string::npos);
  CHECK(abm("run schelling density=3").code == 3);
  CHECK(abm("run schelling colour=1").code == 3);
  CHECK(abm("resume --checkpoint " + (scratch() / "missing.abmck").string()).code == 4);
  const auto junk = scratch() / "junk.abmck";
  std::ofstream(junk) << "{\"format_version\": 1";
  CHECK(abm("resume --checkpoint " + junk.string()).code == 4);
  CHECK(abm("run schelling --out " + (scratch() / "no" / "dir" / "x").string()).code == 4);
}

TEST_CASE("bench and optimize") {
  const auto bench = abm("bench --repeat 1");
  REQUIRE(bench.code == 0);
  for (const char* name : {"schelling", "flocking", "wolfsheep", "forestfire"}) CHECK(bench.out.find(name) != std::string::npos);
  const auto opt = abm("optimize schelling min_to_be_happy=0..8 --objective happy_fraction --maximize --budget 20 "
                       "--population 5 --steps 5");
  REQUIRE(opt.code == 0);
  CHECK(opt.out.find("best ") != std::string::npos);
  CHECK(opt.out.find("evaluations 20") != std::string::npos);
  CHECK(abm("optimize schelling min_to_be_happy=0..8 --objective nothing --budget 20 --population 5").code == 3);
  fs::remove_all(scratch());
}
