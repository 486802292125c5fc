// End-to-end checks of the command-line surface: exit codes, file outputs,
// determinism.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CONSENSUS_LAB_BINARY) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr)
    res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "consensus_lab_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario list and dump") {
  const auto list = run("scenario list");
  CHECK(list.exit_code == 0);
  for (const char* name :
       {"building_block", "non_consensus_chain", "six_particle_periodic", "sparse_three_agent",
        "unbounded_three_agent", "cut_balance_counterexample", "slow_pair", "complete_uniform"})
    CHECK(list.output.find(name) != std::string::npos);

  const auto dump = run("scenario dump slow_pair --no-meta");
  CHECK(dump.exit_code == 0);
  CHECK(dump.output.find("hyperbolic") != std::string::npos);
  const Json j = Json::parse(dump.output);
  CHECK(j.at("schedule").at("n_agents") == 3);

  CHECK(run("scenario dump does_not_exist").exit_code == 2);
}

TEST_CASE("simulate writes trajectories and diagnostics") {
  const fs::path dir = fresh_dir("simulate_complete");
  const auto res = run("simulate complete_uniform --n 4 --horizon 10 --out " + dir.string() +
                       " --no-meta");
  CHECK(res.exit_code == 0);
  const Json diag = Json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag.at("final_diameter").get<double>() < 1e-6);
  CHECK(diag.at("verdict").at("kind") == "reached");
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "diameter.csv"));

  const fs::path dir2 = fresh_dir("simulate_chain");
  const auto chain = run("simulate non_consensus_chain --blocks 15 --max-step 0.25 --out " +
                         dir2.string() + " --no-meta");
  CHECK(chain.exit_code == 0);
  const Json cd = Json::parse(slurp(dir2 / "diagnostics.json"));
  CHECK(cd.at("verdict").at("kind") == "not-reached");
  CHECK(cd.at("final_diameter").get<double>() >= 2.0 * std::exp(-M_PI * M_PI / 6.0) - 1e-12);
  // Last diameter row stays above the analytic floor.
  const std::string csv = slurp(dir2 / "diameter.csv");
  const auto last_line = csv.substr(csv.find_last_of('\n', csv.size() - 2) + 1);
  const double last_diam = std::stod(last_line.substr(last_line.find(',') + 1));
  CHECK(last_diam >= 0.38599);
}

TEST_CASE("simulate the periodic six-agent scenario") {
  const fs::path dir = fresh_dir("simulate_six");
  const auto res =
      run("simulate six_particle_periodic --horizon 13.86 --out " + dir.string() + " --no-meta");
  CHECK(res.exit_code == 0);
  const Json diag = Json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag.at("final_diameter").get<double>() == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(diag.at("monotonicity_violations").empty());
}

TEST_CASE("simulate json format with the step log") {
  const fs::path dir = fresh_dir("simulate_json");
  const auto res = run("simulate complete_uniform --n 2 --horizon 1 --format json --steps"
                       " --out " + dir.string() + " --no-meta");
  CHECK(res.exit_code == 0);
  const Json tj = Json::parse(slurp(dir / "trajectory.json"));
  CHECK(tj.at("n_agents") == 2);
  REQUIRE(tj.contains("steps"));
  const Json& step = tj.at("steps").at(0);
  // Each step carries the integrated generator and its row-stochastic flow.
  const double p00 = step.at("propagator").at(0).at(0).get<double>();
  const double p01 = step.at("propagator").at(0).at(1).get<double>();
  CHECK(p00 + p01 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(step.at("generator").at(0).at(0).get<double>() < 0.0);
}

TEST_CASE("check exit codes: hold, fail, inconclusive") {
  const fs::path dir = fresh_dir("check_codes");

  CHECK(run("check slow_pair --cut-balance --k 1 --horizon 80 --out " + dir.string() +
            " --no-meta")
            .exit_code == 0);

  const auto moreau = run("check slow_pair --moreau --horizon 80 --out " + dir.string() +
                          " --no-meta");
  CHECK(moreau.exit_code == 1);
  CHECK(moreau.output.find("\"verdict\": \"fails\"") != std::string::npos);

  // Limit sampling along a slowly decaying link at a tight delta cannot
  // stabilize: inconclusive.
  const auto inc = run("check cut_balance_counterexample --limit-reachable --horizon 100"
                       " --tn linear:4:4.8:20 --delta 1e-9 --out " +
                       dir.string() + " --no-meta");
  CHECK(inc.exit_code == 5);

  // The same sampling at a realistic delta certifies with nodes {3,4}.
  const auto okres = run("check cut_balance_counterexample --limit-reachable --horizon 100"
                         " --tn linear:4:4.8:20 --delta 0.05 --eps 0.1 --out " +
                         dir.string() + " --no-meta");
  CHECK(okres.exit_code == 0);
  const Json rep = Json::parse(slurp(dir / "check.json"));
  CHECK(rep.at("reports").at(0).at("reachable_nodes") == Json::array({3, 4}));

  CHECK(run("check does_not_exist --moreau").exit_code == 2);
  CHECK(run("check slow_pair --horizon 80").exit_code == 64);  // nothing selected
}

TEST_CASE("check the chain's limit graph through the CLI") {
  const fs::path dir = fresh_dir("check_chain");
  const auto res = run("check non_consensus_chain --blocks 12 --limit-reachable"
                       " --tn block-boundaries --limit-window 3 --out " +
                       dir.string() + " --no-meta");
  CHECK(res.exit_code == 1);
  const Json rep = Json::parse(slurp(dir / "check.json"));
  const Json arrows = rep.at("reports").at(0).at("graph").at("arrows");
  CHECK(arrows == Json::array({Json::array({2, 1}), Json::array({3, 4})}));
  CHECK(slurp(dir / "limit_graph_reachable_graph.txt") == "2 -> 1\n3 -> 4\n");
}

TEST_CASE("certify aggregates through the CLI") {
  const fs::path dir = fresh_dir("certify_full");
  const auto res = run("certify complete_uniform --n 4 --horizon 30 --t-window 1 --mu 0.5"
                       " --out " + dir.string() + " --no-meta");
  CHECK(res.exit_code == 0);
  const Json rep = Json::parse(slurp(dir / "certify.json"));
  CHECK(rep.at("certified_by").size() == 6);
  CHECK(res.output.find("moreau") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs with --no-meta") {
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  const std::string args = "check slow_pair --cut-balance --moreau --horizon 60 --no-meta --out ";
  CHECK(run(args + dir1.string()).exit_code == 1);
  CHECK(run(args + dir2.string()).exit_code == 1);
  CHECK(slurp(dir1 / "check.json") == slurp(dir2 / "check.json"));

  // With the meta block the report carries a timestamp but stays valid JSON.
  const auto meta = run("check slow_pair --cut-balance --horizon 60 --out " + dir1.string());
  CHECK(meta.exit_code == 0);
  CHECK(Json::parse(slurp(dir1 / "check.json")).contains("meta"));
}

TEST_CASE("schedule files round through the CLI") {
  const fs::path dir = fresh_dir("schedule_file");
  const auto dump = run("scenario dump complete_uniform --n 3 --no-meta");
  REQUIRE(dump.exit_code == 0);
  const Json scen = Json::parse(dump.output);
  {
    std::ofstream out(dir / "sched.json");
    out << scen.at("schedule").dump(2);
  }
  const auto res = run("simulate --schedule " + (dir / "sched.json").string() +
                       " --x0 -1,0,1 --horizon 8 --out " + dir.string() + " --no-meta");
  CHECK(res.exit_code == 0);
  const Json diag = Json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag.at("final_diameter").get<double>() < 1e-6);

  CHECK(run("simulate --schedule " + (dir / "missing.json").string() + " --x0 0,1 --horizon 2")
            .exit_code == 3);
}
