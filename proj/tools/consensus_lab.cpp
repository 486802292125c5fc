// Command-line driver: scenario registry, simulation, condition checking and
// report emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "consensus/analysis.hpp"
#include "consensus/conditions.hpp"
#include "consensus/scenarios.hpp"
#include "consensus/serialize.hpp"

namespace {

using namespace consensus;
namespace fs = std::filesystem;

constexpr int kExitHold = 0;
constexpr int kExitFail = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitInconclusive = 5;
constexpr int kExitUsage = 64;

struct CommonOptions {
  std::string scenario;
  std::string schedule_file;
  std::vector<double> x0;
  double horizon = 0.0;  // 0: use the scenario hint
  double max_step = 0.05;
  double t_window = 1.0;
  double mu = 0.1;
  double eps = 1e-9;
  double delta = 1e-9;
  double tol = 1e-6;
  double mu_slack = 1e-9;
  double k_ratio = 1.0;
  double m_bound = 0.0;
  double limit_window = 3.0;
  double limit_stride = 0.25;
  double tail_margin = 1.0;
  std::string tn_spec;
  std::string partition_spec = "unit";
  std::string out_dir = "out";
  std::string format = "csv";
  bool no_meta = false;
  bool dump_steps = false;
  int blocks = 50;
  int n_agents = 4;
};

void add_common_flags(CLI::App* cmd, CommonOptions& o, bool needs_source) {
  if (needs_source) {
    cmd->add_option("scenario", o.scenario, "built-in scenario name");
    cmd->add_option("--schedule", o.schedule_file, "schedule JSON file instead of a scenario");
    cmd->add_option("--x0", o.x0, "initial state (required with --schedule)")->delimiter(',');
  }
  cmd->add_option("--horizon", o.horizon, "simulation / verification horizon");
  cmd->add_option("--max-step", o.max_step, "maximum propagator step");
  cmd->add_option("--t-window", o.t_window, "window length T");
  cmd->add_option("--mu", o.mu, "window mass threshold");
  cmd->add_option("--eps", o.eps, "limit-positivity threshold");
  cmd->add_option("--delta", o.delta, "limit-convergence tolerance");
  cmd->add_option("--tol", o.tol, "consensus tolerance");
  cmd->add_option("--mu-slack", o.mu_slack, "absolute slack when comparing masses to mu");
  cmd->add_option("--k", o.k_ratio, "cut-balance ratio bound K");
  cmd->add_option("--m-bound", o.m_bound, "cut-balance mass bound M (0 = auto)");
  cmd->add_option("--limit-window", o.limit_window, "limit-table window W");
  cmd->add_option("--limit-stride", o.limit_stride, "limit-table cell width");
  cmd->add_option("--tail-margin", o.tail_margin, "tail margin for limit positivity");
  cmd->add_option("--tn", o.tn_spec,
                  "sampling times: comma list, linear:<start>:<stride>:<count>, or "
                  "block-boundaries");
  cmd->add_option("--partition", o.partition_spec,
                  "cut-balance partition: unit or a comma list");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--steps", o.dump_steps, "include the per-step generator/propagator log (json)");
  cmd->add_flag("--no-meta", o.no_meta, "omit the meta block (byte-stable reports)");
  cmd->add_option("--blocks", o.blocks, "blocks for non_consensus_chain");
  cmd->add_option("--n", o.n_agents, "agents for complete_uniform");
}

std::vector<double> parse_number_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<double> parse_tn(const std::string& spec, const Scenario* scen) {
  if (spec == "block-boundaries") {
    if (!scen || scen->suggested_tn.empty())
      throw std::domain_error("this source has no natural sampling times");
    return scen->suggested_tn;
  }
  if (spec.rfind("linear:", 0) == 0) {
    std::vector<double> parts = parse_number_list(spec.substr(7));
    std::stringstream ss(spec.substr(7));
    std::string item;
    parts.clear();
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3) throw std::domain_error("linear spec needs start:stride:count");
    std::vector<double> out;
    for (int i = 0; i < static_cast<int>(parts[2]); ++i) out.push_back(parts[0] + i * parts[1]);
    return out;
  }
  return parse_number_list(spec);
}

struct Source {
  Scenario scenario;  // schedule + x0 either way
  bool from_file = false;
};

Source load_source(const CommonOptions& o) {
  if (!o.scenario.empty() == !o.schedule_file.empty())
    throw CLI::ValidationError("give exactly one of a scenario name or --schedule");
  Source src;
  if (!o.scenario.empty()) {
    ScenarioOptions opt;
    opt.n_blocks = o.blocks;
    opt.n_agents = o.n_agents;
    if (o.horizon > 0.0) opt.horizon = o.horizon;
    src.scenario = make_scenario(o.scenario, opt);
    return src;
  }
  std::ifstream in(o.schedule_file);
  if (!in) throw std::ios_base::failure("cannot open " + o.schedule_file);
  Json j = Json::parse(in);
  src.from_file = true;
  src.scenario.name = fs::path(o.schedule_file).stem().string();
  src.scenario.schedule = schedule_from_json(j);
  if (o.x0.empty()) throw CLI::ValidationError("--schedule requires --x0");
  Vector x0(static_cast<int>(o.x0.size()));
  for (int i = 0; i < x0.size(); ++i) x0(i) = o.x0[static_cast<std::size_t>(i)];
  src.scenario.x0 = AgentState::scalar(0.0, x0);
  src.scenario.horizon_hint = o.horizon > 0.0 ? o.horizon : 10.0;
  return src;
}

void attach_meta(Json& j, const CommonOptions& o) {
  if (o.no_meta) return;
  Json meta;
  meta["tool"] = "consensus_lab";
  meta["version"] = "0.1.0";
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  meta["generated_at"] = buf;
  j["meta"] = meta;
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  out << contents;
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

int cmd_scenario_list() {
  for (const std::string& name : scenario_names()) {
    const Scenario s = make_scenario(name, {});
    std::cout << name << "  -  " << s.description << "\n";
  }
  return kExitHold;
}

int cmd_scenario_dump(const std::string& name, const CommonOptions& o) {
  ScenarioOptions opt;
  opt.n_blocks = o.blocks;
  opt.n_agents = o.n_agents;
  Json j = scenario_to_json(make_scenario(name, opt));
  attach_meta(j, o);
  std::cout << j.dump(2) << "\n";
  return kExitHold;
}

int cmd_simulate(const CommonOptions& o) {
  const Source src = load_source(o);
  const Scenario& scen = src.scenario;
  const double t_end = o.horizon > 0.0 ? o.horizon : scen.horizon_hint;

  SimConfig cfg;
  cfg.max_step = o.max_step;
  Trajectory traj = simulate(scen.schedule, scen.x0, t_end, cfg);
  DiagnosticsReport rep = diagnose(traj, o.tol, scen.diameter_lower_bound);

  const fs::path out_dir(o.out_dir);
  if (o.format == "csv") {
    if (traj.dim == 1) {
      write_file(out_dir / "trajectory.csv", trajectory_to_csv(traj, 0));
    } else {
      for (int a = 0; a < traj.dim; ++a)
        write_file(out_dir / ("trajectory_axis" + std::to_string(a + 1) + ".csv"),
                   trajectory_to_csv(traj, a));
    }
    write_file(out_dir / "diameter.csv", diagnostics_to_csv(rep));
  } else {
    Json tj = trajectory_to_json(traj, o.dump_steps);
    attach_meta(tj, o);
    write_file(out_dir / "trajectory.json", tj.dump(2) + "\n");
  }
  Json dj = diagnostics_to_json(rep);
  attach_meta(dj, o);
  write_file(out_dir / "diagnostics.json", dj.dump(2) + "\n");

  std::cout << "simulated " << scen.name << " to t=" << t_end << ", final diameter "
            << rep.final_diameter << ", verdict "
            << diagnostics_to_json(rep)["verdict"]["kind"].get<std::string>() << "\n";
  return kExitHold;
}

struct CheckSelection {
  bool moreau = false;
  bool pe = false;
  bool isc = false;
  bool cut_balance = false;
  bool limit_reachable = false;
  bool limit_coverage = false;
  bool all = false;
};

int cmd_check(const CommonOptions& o, const CheckSelection& sel_in) {
  const Source src = load_source(o);
  const Scenario& scen = src.scenario;
  const double horizon = o.horizon > 0.0 ? o.horizon : scen.horizon_hint;

  CheckSelection sel = sel_in;
  if (sel.all) sel.moreau = sel.pe = sel.isc = sel.cut_balance = sel.limit_reachable =
                   sel.limit_coverage = true;
  if (!(sel.moreau || sel.pe || sel.isc || sel.cut_balance || sel.limit_reachable ||
        sel.limit_coverage))
    throw CLI::ValidationError("select at least one condition to check");

  ConditionParams wp;
  wp.T = o.t_window;
  wp.mu = o.mu;
  wp.horizon = horizon;
  wp.mu_slack = o.mu_slack;

  std::vector<ConditionReport> reports;
  if (sel.moreau || sel.pe) {
    const WindowedGraphResult mg = build_moreau_graph(scen.schedule, wp);
    if (sel.moreau) reports.push_back(mg.reachable);
    if (sel.pe) reports.push_back(mg.complete);
  }
  if (sel.isc) reports.push_back(check_isc(scen.schedule, wp).report);
  if (sel.cut_balance) {
    CutBalanceParams cb;
    cb.K = o.k_ratio;
    cb.M = o.m_bound;
    cb.partition = o.partition_spec == "unit" ? CutBalanceParams::unit_partition(horizon)
                                              : parse_number_list(o.partition_spec);
    reports.push_back(check_cut_balance(scen.schedule, cb));
  }
  if (sel.limit_reachable || sel.limit_coverage) {
    std::vector<double> tn;
    if (!o.tn_spec.empty()) {
      tn = parse_tn(o.tn_spec, &scen);
      // Natural boundaries include the end of the support; keep sampling
      // windows inside it.
      while (!tn.empty() && tn.back() + o.limit_window > scen.schedule.support_end())
        tn.pop_back();
    } else {
      const double hi = horizon - o.limit_window;
      for (int i = 0; i < 12; ++i) tn.push_back(hi * i / 11.0);
    }
    const LimitTable table =
        estimate_limits(scen.schedule, tn, o.limit_window, o.limit_stride, o.delta);
    if (sel.limit_reachable)
      reports.push_back(build_limit_reachable_graph(table, o.eps, o.tail_margin).report);
    if (sel.limit_coverage) reports.push_back(build_limit_coverage_graph(table, o.eps).report);
  }

  Json out;
  Json arr = Json::array();
  for (const ConditionReport& r : reports) {
    arr.push_back(report_to_json(r));
    if (r.graph)
      write_file(fs::path(o.out_dir) / (r.condition + "_graph.txt"), graph_to_text(*r.graph));
  }
  out["source"] = scen.name;
  out["reports"] = arr;
  attach_meta(out, o);
  const std::string text = out.dump(2) + "\n";
  write_file(fs::path(o.out_dir) / "check.json", text);
  std::cout << text;

  bool any_fail = false, any_inconclusive = false;
  for (const ConditionReport& r : reports) {
    if (r.verdict == Verdict::Fails) any_fail = true;
    if (r.verdict == Verdict::Inconclusive) any_inconclusive = true;
  }
  if (any_fail) return kExitFail;
  if (any_inconclusive) return kExitInconclusive;
  return kExitHold;
}

int cmd_certify(const CommonOptions& o) {
  const Source src = load_source(o);
  const Scenario& scen = src.scenario;

  CertifyParams cp;
  cp.window.T = o.t_window;
  cp.window.mu = o.mu;
  cp.window.horizon = o.horizon > 0.0 ? o.horizon : scen.horizon_hint;
  cp.window.mu_slack = o.mu_slack;
  cp.cut_balance.K = o.k_ratio;
  cp.cut_balance.M = o.m_bound;
  if (o.partition_spec != "unit") cp.cut_balance.partition = parse_number_list(o.partition_spec);
  cp.limit_window = o.limit_window;
  cp.limit_stride = o.limit_stride;
  cp.limit_delta = o.delta;
  cp.limit_eps = o.eps;
  cp.tail_margin = o.tail_margin;
  if (!o.tn_spec.empty()) {
    cp.t_seq = parse_tn(o.tn_spec, &scen);
    while (!cp.t_seq.empty() &&
           cp.t_seq.back() + o.limit_window > scen.schedule.support_end())
      cp.t_seq.pop_back();
  }

  const CertifyReport rep = certify(scen.schedule, cp);
  Json out = certify_to_json(rep);
  out["source"] = scen.name;
  attach_meta(out, o);
  const std::string text = out.dump(2) + "\n";
  write_file(fs::path(o.out_dir) / "certify.json", text);
  std::cout << "consensus certified by: ";
  if (rep.certified_by.empty()) {
    std::cout << "(none)";
  } else {
    for (std::size_t i = 0; i < rep.certified_by.size(); ++i)
      std::cout << (i ? ", " : "") << rep.certified_by[i];
  }
  std::cout << "\n";
  return kExitHold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and condition checker for time-varying consensus networks"};
  app.require_subcommand(1);

  CommonOptions opt;

  CLI::App* scen_cmd = app.add_subcommand("scenario", "list or dump built-in scenarios");
  scen_cmd->require_subcommand(1);
  CLI::App* list_cmd = scen_cmd->add_subcommand("list", "list scenario names");
  CLI::App* dump_cmd = scen_cmd->add_subcommand("dump", "dump one scenario as JSON");
  std::string dump_name;
  dump_cmd->add_option("name", dump_name)->required();
  dump_cmd->add_option("--blocks", opt.blocks);
  dump_cmd->add_option("--n", opt.n_agents);
  dump_cmd->add_flag("--no-meta", opt.no_meta);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "simulate and write trajectory files");
  add_common_flags(sim_cmd, opt, true);

  CLI::App* check_cmd = app.add_subcommand("check", "run condition checkers");
  add_common_flags(check_cmd, opt, true);
  CheckSelection sel;
  check_cmd->add_flag("--moreau", sel.moreau, "windowed-mass graph needs a reachable node");
  check_cmd->add_flag("--pe", sel.pe, "windowed-mass graph must be complete");
  check_cmd->add_flag("--isc", sel.isc, "common-target condition");
  check_cmd->add_flag("--cut-balance", sel.cut_balance, "subset reciprocity bounds");
  check_cmd->add_flag("--limit-reachable", sel.limit_reachable,
                      "tail-positive limit graph needs a reachable node");
  check_cmd->add_flag("--limit-coverage", sel.limit_coverage,
                      "limit graph must cover every pair");
  check_cmd->add_flag("--all", sel.all, "run every checker");

  CLI::App* cert_cmd = app.add_subcommand("certify", "run every checker and aggregate");
  add_common_flags(cert_cmd, opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (list_cmd->parsed()) return cmd_scenario_list();
    if (dump_cmd->parsed()) return cmd_scenario_dump(dump_name, opt);
    if (sim_cmd->parsed()) return cmd_simulate(opt);
    if (check_cmd->parsed()) return cmd_check(opt, sel);
    if (cert_cmd->parsed()) return cmd_certify(opt);
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotFound;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
