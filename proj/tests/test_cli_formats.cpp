#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "migrationlab/instance.hpp"

namespace fs = std::filesystem;
using namespace migrationlab;

namespace {

const std::string kCli = std::string(MIGRATIONLAB_BINARY_DIR) + "/tools/migrationlab";

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + kCli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[512];
  CommandResult result;
  while (fgets(buffer, sizeof buffer, pipe) != nullptr) result.output += buffer;
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path(MIGRATIONLAB_BINARY_DIR) / "cli_out" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("constants subcommand prints the table") {
  CommandResult r = run("constants");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("c0") != std::string::npos);
  CHECK(r.output.find("4.08613") != std::string::npos);
  CHECK(r.output.find("1.84139") != std::string::npos);
}

TEST_CASE("simulate writes reports and is byte-deterministic") {
  fs::path dir1 = fresh_dir("sim1");
  fs::path dir2 = fresh_dir("sim2");
  const std::string base = "simulate --alg dlm --gen random --n 5 --D 8 --T 180 --seed 1";
  CommandResult r1 = run(base + " --out " + dir1.string());
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("ratio") != std::string::npos);
  for (const char* name : {"instance.json", "run.json", "steps.csv", "report.json", "ledger.csv"}) {
    CHECK(fs::exists(dir1 / name));
  }
  CommandResult r2 = run(base + " --out " + dir2.string());
  CHECK(r2.exit_code == 0);
  for (const char* name : {"instance.json", "run.json", "steps.csv", "report.json", "ledger.csv"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
  CHECK(slurp(dir1 / "run.json").find("\"version\": \"0.1.0\"") != std::string::npos);
}

TEST_CASE("simulate on an all-at-start instance costs nothing") {
  fs::path dir = fresh_dir("still");
  Instance inst = bipartite_instance(3, 1.0, 2.0, 8);
  inst.requests.assign(inst.requests.size(), inst.start);
  const fs::path file = dir / "still.json";
  std::ofstream out(file);
  save_instance_json(inst, out);
  out.close();
  CommandResult r = run("simulate --alg mtlm --instance " + file.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("cost 0") != std::string::npos);
}

TEST_CASE("simulate rejects an invalid instance file") {
  fs::path dir = fresh_dir("invalid");
  const fs::path file = dir / "bad.json";
  std::ofstream(file) << R"({"D": 2, "dist": [[0,1,5],[1,0,1],[5,1,0]],
                             "start": 0, "requests": [1]})";
  CommandResult r = run("simulate --alg mtm --instance " + file.string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("lp subcommand solves and exports") {
  fs::path dir = fresh_dir("lp");
  CommandResult r = run("lp --lp mtlm --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("4.08613") != std::string::npos);
  CHECK(fs::exists(dir / "mtlm.lp"));
  CHECK(fs::exists(dir / "solution.json"));

  CommandResult dlm = run("lp --lp dlm");
  CHECK(dlm.exit_code == 0);
  CHECK(dlm.output.find("objective 4") != std::string::npos);

  CommandResult no_short = run("lp --lp dlm-no-short");
  CHECK(no_short.exit_code == 0);
  CHECK(no_short.output.find("unbounded") != std::string::npos);
}

TEST_CASE("lowerbound subcommand plays and verifies") {
  CommandResult r = run("lowerbound --policy mtlm --L 6 --k 50 --D 150 --epochs 2 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("realized ratio") != std::string::npos);
  CHECK(r.output.find("epsilon") != std::string::npos);

  CommandResult stay = run("lowerbound --policy stay --L 4 --k 10 --D 64 --epochs 1");
  CHECK(stay.exit_code == 3);
  CHECK(stay.output.find("non-competitive") != std::string::npos);

  CommandResult graph = run("lowerbound --verify-state-graph --L 12");
  CHECK(graph.exit_code == 0);
  CHECK(graph.output.find("0.7689") != std::string::npos);
}

TEST_CASE("tolerance env var overrides the comparison tolerance") {
  CommandResult ok = run("simulate --alg dlm --gen random --n 4 --D 8 --T 72 --seed 3");
  CHECK(ok.exit_code == 0);

  CommandResult loose = run("simulate --alg dlm --gen random --n 4 --D 8 --T 72 --seed 3",
                            "MIGRATIONLAB_TOL=1e-6 ");
  CHECK(loose.exit_code == 0);
  CHECK(loose.output.find("ratio") != std::string::npos);

  CommandResult bad = run("constants", "MIGRATIONLAB_TOL=not-a-number ");
  CHECK(bad.exit_code == 0);  // constants ignores the tolerance
  CommandResult bad_sim = run("simulate --alg stay --gen linear --c 2 --D 4",
                              "MIGRATIONLAB_TOL=not-a-number ");
  CHECK(bad_sim.exit_code == 1);
}
