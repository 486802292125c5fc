#include "consensus/scenarios.hpp"

#include <cmath>

#include "consensus/analysis.hpp"
#include "consensus/conditions.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace consensus;

namespace {

const double kLog2 = std::log(2.0);
const double kLogSqrt2 = 0.5 * std::log(2.0);

// Runs the scenario to its horizon and checks every golden fact.
void verify_golden(const Scenario& scen, double max_step = 0.02, double tol_override = 0.0) {
  SimConfig cfg;
  cfg.max_step = max_step;
  cfg.keep_step_log = false;
  const Trajectory traj = simulate(scen.schedule, scen.x0, scen.horizon_hint, cfg);
  for (const GoldenFact& fact : scen.golden) {
    const Matrix at = traj.state_at(fact.t);
    switch (fact.kind) {
      case GoldenFact::Kind::StateEquals: {
        const double tol = tol_override > 0.0 ? tol_override : fact.tol;
        CHECK((at.col(0) - fact.state).lpNorm<Eigen::Infinity>() <= tol);
        break;
      }
      case GoldenFact::Kind::DiameterAtLeast:
        CHECK(at.col(0).maxCoeff() - at.col(0).minCoeff() >= fact.value - 1e-12);
        break;
      case GoldenFact::Kind::DiameterBelow:
        CHECK(at.col(0).maxCoeff() - at.col(0).minCoeff() < fact.value);
        break;
    }
  }
}

}  // namespace

TEST_CASE("building block golden states") {
  for (double eta : {0.1, 0.5, 0.9}) {
    const Scenario scen = building_block(1.0, eta);
    verify_golden(scen);

    // Strict contraction of the spread by exactly 1 - eta/2.
    SimConfig cfg;
    cfg.max_step = 0.05;
    const Trajectory traj = simulate(scen.schedule, scen.x0, scen.horizon_hint, cfg);
    const double end_diam =
        traj.final_state().col(0).maxCoeff() - traj.final_state().col(0).minCoeff();
    CHECK(end_diam == doctest::Approx((2.0 - eta) * 1.0).epsilon(1e-9));
    CHECK(end_diam < 2.0);
  }
  CHECK_THROWS_AS(building_block(1.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(building_block(-1.0, 0.5), std::domain_error);
}

TEST_CASE("building block translated to a later block matches the first-block pattern") {
  const Scenario chain = non_consensus_chain(6);
  const auto bounds = chain_boundaries(6);
  // Entry (2,1): active on the first and third segments of every block.
  const auto shifted = chain.schedule.entry(1, 0).translated(bounds[3]);
  CHECK(shifted.integral(0.0, kLogSqrt2) == doctest::Approx(kLogSqrt2).epsilon(1e-9));
  CHECK(shifted.integral(kLogSqrt2, kLog2) == doctest::Approx(0.0));
  const double seg_c = std::log(2.0 / chain_eta(4));
  CHECK(shifted.integral(kLog2, seg_c) == doctest::Approx(seg_c - kLog2).epsilon(1e-9));
}

TEST_CASE("chain block boundaries, masses and gaps") {
  CHECK(chain_m(1) == doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  for (int n = 0; n <= 200; ++n)
    CHECK(chain_m(n) >= std::exp(-M_PI * M_PI / 6.0));

  const auto bounds = chain_boundaries(45);
  // Boundary gaps grow like 2 log n.
  const double gap40 = bounds[41] - bounds[40];
  CHECK(gap40 / (2.0 * std::log(40.0)) == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t i = 2; i < bounds.size(); ++i)
    CHECK(bounds[i] - bounds[i - 1] > bounds[i - 1] - bounds[i - 2]);
}

TEST_CASE("chain window masses: the outer link dies, the inner links pass") {
  const Scenario scen = non_consensus_chain(10);
  ConditionParams p;
  p.T = 2.0;
  p.mu = kLogSqrt2;
  p.horizon = scen.horizon_hint;

  // Entry (1,4): only active during the short final segment of each block.
  const auto r = check_property_b(scen.schedule, 0, 3, p);
  CHECK(r.verdict == Verdict::Fails);

  // The all-t graph keeps at most the symmetric-chain arrows; the persistent
  // ones are the anchor pulls (2,1) and (3,4).
  const auto mg = build_moreau_graph(scen.schedule, p);
  const std::set<std::pair<int, int>> chain_arrows{{0, 1}, {1, 0}, {1, 2},
                                                   {2, 1}, {2, 3}, {3, 2}};
  for (const auto& a : mg.graph.arrows) CHECK(chain_arrows.count(a) == 1);
  CHECK(mg.graph.has_arrow(1, 0));
  CHECK(mg.graph.has_arrow(2, 3));
  CHECK(!mg.graph.has_arrow(0, 3));

  // No common target ever serves the outer pair: the scrambling check fails.
  CHECK(check_isc(scen.schedule, p).report.verdict == Verdict::Fails);
}

TEST_CASE("chain limit masses match the closed-form pattern") {
  const Scenario scen = non_consensus_chain(30);
  std::vector<double> tn = scen.suggested_tn;
  tn.pop_back();
  const auto table = estimate_limits(scen.schedule, tn, 3.0, 0.25, 1e-9);
  REQUIRE(table.all_converged());

  // Limit of entry (2,1): unit rate on [0, log sqrt 2] and again from log 2 on.
  auto expected_21 = [](double a, double b) {
    const double first = std::max(0.0, std::min(b, kLogSqrt2) - a);
    const double second = std::max(0.0, b - std::max(a, kLog2));
    return first + second;
  };
  const auto& edges = table.cell_edges;
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double want = expected_21(edges[c], edges[c + 1]);
    CHECK(table.pair(1, 0).limit_cells[c] == doctest::Approx(want).epsilon(1e-9));
    CHECK(table.pair(0, 3).limit_cells[c] == doctest::Approx(0.0));  // outer link vanishes
  }
  // Limit of entry (1,2): unit rate exactly on [log sqrt 2, log 2].
  CHECK(table.limit_total(0, 1) == doctest::Approx(kLogSqrt2).epsilon(1e-9));
  CHECK(table.limit_total(1, 2) == doctest::Approx(kLog2 - kLogSqrt2).epsilon(1e-9));
}

TEST_CASE("non-consensus chain keeps its spread") {
  const int blocks = 12;
  const Scenario scen = non_consensus_chain(blocks);
  SimConfig cfg;
  cfg.max_step = 0.05;
  cfg.keep_step_log = false;
  const Trajectory traj = simulate(scen.schedule, scen.x0, scen.horizon_hint, cfg);
  const auto bounds = chain_boundaries(blocks);
  for (int n = 0; n <= blocks; ++n) {
    const Matrix at = traj.state_at(bounds[static_cast<std::size_t>(n)]);
    const double diam = at.col(0).maxCoeff() - at.col(0).minCoeff();
    CHECK(diam == doctest::Approx(2.0 * chain_m(n)).epsilon(1e-9));
    CHECK(diam >= *scen.diameter_lower_bound - 1e-12);
  }

  const DiagnosticsReport rep = diagnose(traj, 1e-6, scen.diameter_lower_bound);
  CHECK(rep.verdict.kind == ConsensusVerdict::Kind::NotReached);
  CHECK(rep.violations.empty());
}

TEST_CASE("six-particle scenario is periodic at integer times") {
  const Scenario scen = six_particle_periodic(20);
  verify_golden(scen, 0.02);

  SimConfig cfg;
  cfg.max_step = 0.05;
  cfg.keep_step_log = false;
  const Trajectory traj = simulate(scen.schedule, scen.x0, 20.0, cfg);
  for (int n = 0; n < 20; ++n) {
    const Matrix at = traj.state_at(static_cast<double>(n));
    CHECK((at.col(0) - scen.x0.positions.col(0)).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
  // The spread never changes: the outer agents never move.
  const DiagnosticsReport rep = diagnose(traj, 1e-6);
  for (double d : rep.diameter) CHECK(d == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("sparse three-agent scenario certifies via limit coverage") {
  std::vector<double> tn;
  for (int n = 0; n < 40; ++n) tn.push_back(6.0 * n);
  const Scenario scen = sparse_three_agent(tn);

  // Sample short of the end so every window stays inside the built support.
  std::vector<double> sample(tn.begin(), tn.end() - 1);
  const auto table = estimate_limits(scen.schedule, sample, 6.0, 0.5, 1e-9);
  REQUIRE(table.all_converged());
  const auto cover = build_limit_coverage_graph(table, 0.1);
  CHECK(cover.report.holds());
  CHECK(cover.graph.arrows == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  // Bounded gaps: the tail-positive proxy certifies too, provided the window
  // reaches past one full burst period so every tail sees the next burst.
  std::vector<double> wide_sample(tn.begin(), tn.end() - 2);
  const auto wide = estimate_limits(scen.schedule, wide_sample, 12.0, 0.5, 1e-9);
  const auto reach = build_limit_reachable_graph(wide, 0.1, 6.0);
  CHECK(reach.report.holds());
  CHECK(reach.report.reachable_nodes == std::vector<int>{2});
}

TEST_CASE("sparse scenario accepts bounded fillers for the unspecified pairs") {
  std::vector<double> tn;
  for (int n = 0; n < 25; ++n) tn.push_back(6.0 * n);
  std::map<std::pair<int, int>, PiecewiseFunction> fillers;
  fillers[{2, 0}] = PiecewiseFunction::from_pieces(
      {{0.0, 3.0, SegmentPrimitive::constant(0.4)}}, 6.0);
  const Scenario scen = sparse_three_agent(tn, fillers);
  CHECK(scen.schedule.window_mass(2, 0, 0.0, 6.0) == doctest::Approx(1.2));

  // Extra arrows only help coverage.
  std::vector<double> sample(tn.begin(), tn.end() - 1);
  const auto table = estimate_limits(scen.schedule, sample, 6.0, 0.5, 1e-9);
  CHECK(build_limit_coverage_graph(table, 0.1).report.holds());

  std::map<std::pair<int, int>, PiecewiseFunction> clash;
  clash[{0, 1}] = PiecewiseFunction::constant_on(0.0, 1.0, 1.0);
  CHECK_THROWS_AS((void)sparse_three_agent(tn, clash), std::domain_error);
}

TEST_CASE("sparse scenario with doubly-exponential bursts loses the tail proxy") {
  // Bursts racing to infinity: translated masses vanish on every fixed window.
  std::vector<double> tn;
  for (int n = 0; n < 8; ++n) tn.push_back(std::exp(std::exp(static_cast<double>(n) / 2.0)) - 1.0);
  const Scenario scen = sparse_three_agent(tn);
  // Sample midway between bursts: every window is eventually empty.
  std::vector<double> mid;
  for (std::size_t i = 0; i + 1 < tn.size(); ++i) mid.push_back(0.5 * (tn[i] + tn[i + 1]));
  const auto table = estimate_limits(scen.schedule, mid, 3.0, 0.5, 1e-3);
  const auto reach = build_limit_reachable_graph(table, 0.1, 1.0);
  if (table.all_converged()) {
    CHECK(reach.graph.arrows.empty());
    CHECK(reach.report.verdict == Verdict::Fails);
  } else {
    CHECK(reach.report.verdict == Verdict::Inconclusive);
  }
}

TEST_CASE("unbounded three-agent scenario: singular masses and coverage") {
  std::vector<double> tn;
  for (int n = 0; n < 40; ++n) tn.push_back(6.0 * n);
  const Scenario scen = unbounded_three_agent(tn);

  for (double t : {0.0, 6.0, 12.0}) {
    CHECK(scen.schedule.window_mass(0, 1, t, t + 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scen.schedule.window_mass(1, 2, t + 4.0, t + 5.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(oracles::quadrature_mass(scen.schedule.entry(0, 1), 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(oracles::quadrature_mass(scen.schedule.entry(1, 2), 4.0, 5.0) ==
        doctest::Approx(0.5).epsilon(1e-6));

  std::vector<double> sample(tn.begin(), tn.end() - 1);
  const auto table = estimate_limits(scen.schedule, sample, 6.0, 0.5, 1e-9);
  REQUIRE(table.all_converged());
  CHECK(build_limit_coverage_graph(table, 0.1).report.holds());
}

TEST_CASE("cut-balance counterexample: fails the balance, converges anyway") {
  const Scenario scen = cut_balance_counterexample();

  CutBalanceParams p;
  p.partition = CutBalanceParams::unit_partition(100.0);
  p.K = 10.0;
  p.M = 100.0;
  const auto r = check_cut_balance(scen.schedule, p);
  CHECK(r.verdict == Verdict::Fails);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness->subset == std::vector<int>{0, 1});

  SimConfig cfg;
  cfg.max_step = 0.05;
  cfg.keep_step_log = false;
  const Trajectory traj = simulate(scen.schedule, scen.x0, 60.0, cfg);
  const DiagnosticsReport rep = diagnose(traj, 1e-6);
  CHECK(rep.verdict.kind == ConsensusVerdict::Kind::Reached);
  CHECK(rep.final_diameter < 1e-6);
}

TEST_CASE("slow pair: windowed checks lose the slow link, symmetry keeps cut balance") {
  const Scenario scen = slow_pair();

  ConditionParams p;
  p.T = 1.0;
  p.mu = 0.1;
  p.horizon = 80.0;
  const auto mg = build_moreau_graph(scen.schedule, p);
  CHECK(mg.graph.arrows == std::set<std::pair<int, int>>{{0, 1}, {1, 0}});
  CHECK(mg.reachable.verdict == Verdict::Fails);

  CutBalanceParams cb;
  cb.partition = CutBalanceParams::unit_partition(80.0);
  cb.K = 1.0;
  CHECK(check_cut_balance(scen.schedule, cb).holds());

  // The slow link flattens to a unit rate under the exponential time map.
  const auto flat = time_rescale(scen.schedule.entry(1, 2), TimeMap::exp_minus_one());
  CHECK(*flat.value_at(1.0) == doctest::Approx(1.0));
  CHECK(*flat.value_at(3.0) == doctest::Approx(1.0));
}

TEST_CASE("complete uniform baseline") {
  Vector x0(4);
  x0 << -1.0, -1.0, 1.0, 1.0;
  const Scenario scen = complete_uniform(4, x0);

  SimConfig cfg;
  cfg.max_step = 0.05;
  cfg.keep_step_log = false;
  const Trajectory traj = simulate(scen.schedule, scen.x0, 10.0, cfg);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double diam = traj.states[i].col(0).maxCoeff() - traj.states[i].col(0).minCoeff();
    const double expect = 2.0 * std::exp(-4.0 * traj.times[i]);
    if (expect > 1e-280) CHECK(diam == doctest::Approx(expect).epsilon(1e-6));
  }
  // Mean is conserved under symmetric schedules; consensus value is the mean.
  CHECK(traj.final_state().col(0).mean() == doctest::Approx(x0.mean()).epsilon(1e-12));
  CHECK((traj.final_state().col(0).array() - x0.mean()).abs().maxCoeff() < 1e-9);

  // N = 2 gap closed form.
  Vector y0(2);
  y0 << 0.0, 2.0;
  const Scenario two = complete_uniform(2, y0);
  const Trajectory t2 = simulate(two.schedule, two.x0, 3.0, cfg);
  const Matrix at = t2.state_at(1.5);
  CHECK(at(1, 0) - at(0, 0) == doctest::Approx(2.0 * std::exp(-3.0)).epsilon(1e-9));
}

TEST_CASE("certify aggregates: full connectivity passes everything") {
  Vector x0(4);
  x0 << -1.0, -1.0, 1.0, 1.0;
  const Scenario scen = complete_uniform(4, x0);
  CertifyParams cp;
  cp.window.T = 1.0;
  cp.window.mu = 0.5;
  cp.window.horizon = 30.0;
  const CertifyReport rep = certify(scen.schedule, cp);
  CHECK(rep.certified_by == std::vector<std::string>{"moreau", "persistent_excitation",
                                                     "integral_scrambling", "cut_balance",
                                                     "limit_graph_reachable",
                                                     "limit_graph_coverage"});
}

TEST_CASE("certify aggregates: the chain certifies nothing") {
  const Scenario scen = non_consensus_chain(20);
  CertifyParams cp;
  cp.window.T = 2.0;
  cp.window.mu = kLogSqrt2;
  cp.window.horizon = scen.horizon_hint;
  cp.t_seq = scen.suggested_tn;
  cp.t_seq.pop_back();  // keep sampling windows inside the support
  const CertifyReport rep = certify(scen.schedule, cp);
  CHECK(rep.certified_by.empty());
}

TEST_CASE("certify aggregates: slow pair is cut-balance only") {
  const Scenario scen = slow_pair();
  CertifyParams cp;
  cp.window.T = 1.0;
  cp.window.mu = 0.1;
  cp.window.horizon = 80.0;
  cp.limit_delta = 0.05;  // the 1/(t+1) masses drift below this by t ~ 50
  cp.limit_eps = 0.1;
  const CertifyReport rep = certify(scen.schedule, cp);
  CHECK(rep.certified_by == std::vector<std::string>{"cut_balance"});
}

TEST_CASE("every registered scenario reproduces its golden facts") {
  ScenarioOptions opt;
  opt.n_blocks = 10;
  opt.n_periods = 5;
  opt.n_bursts = 24;
  opt.horizon = 100.0;
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const Scenario scen = make_scenario(name, opt);
    SimConfig cfg;
    cfg.max_step = 0.05;
    cfg.keep_step_log = false;
    const Trajectory traj = simulate(scen.schedule, scen.x0, scen.horizon_hint, cfg);
    for (const GoldenFact& fact : scen.golden) {
      const Matrix at = traj.state_at(fact.t);
      switch (fact.kind) {
        case GoldenFact::Kind::StateEquals:
          CHECK((at.col(0) - fact.state).lpNorm<Eigen::Infinity>() <= fact.tol);
          break;
        case GoldenFact::Kind::DiameterAtLeast:
          CHECK(at.col(0).maxCoeff() - at.col(0).minCoeff() >= fact.value - 1e-12);
          break;
        case GoldenFact::Kind::DiameterBelow:
          CHECK(at.col(0).maxCoeff() - at.col(0).minCoeff() < fact.value);
          break;
      }
    }
    // Post-processing never flags a propagated flow.
    CHECK(diagnose(traj, 1e-6).violations.empty());
  }
}

TEST_CASE("scenario registry") {
  const auto names = scenario_names();
  CHECK(names.size() == 8);
  for (const auto& name : names) {
    ScenarioOptions opt;
    opt.n_blocks = 3;
    opt.n_periods = 2;
    opt.n_bursts = 4;
    const Scenario s = make_scenario(name, opt);
    CHECK(s.name == name);
    CHECK(s.schedule.n_agents() >= 1);
  }
  CHECK_THROWS_AS((void)make_scenario("nope", {}), std::out_of_range);
}
