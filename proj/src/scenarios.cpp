#include "consensus/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace consensus {

namespace {

const Scalar kLog2 = std::log(2.0);
const Scalar kLogSqrt2 = 0.5 * std::log(2.0);

Piece unit_piece(Scalar t0, Scalar t1) { return {t0, t1, SegmentPrimitive::constant(1.0)}; }

Vector vec4(Scalar a, Scalar b, Scalar c, Scalar d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

GoldenFact state_fact(Scalar t, const Vector& x, Scalar tol, std::string note) {
  GoldenFact f;
  f.kind = GoldenFact::Kind::StateEquals;
  f.t = t;
  f.state = x;
  f.tol = tol;
  f.note = std::move(note);
  return f;
}

GoldenFact diameter_below_fact(Scalar t, Scalar value, std::string note) {
  GoldenFact f;
  f.kind = GoldenFact::Kind::DiameterBelow;
  f.t = t;
  f.value = value;
  f.note = std::move(note);
  return f;
}

// Appends the four activity segments of one contraction block starting at
// `start`, for the given eta, into per-entry piece lists. Entries are keyed
// (j, k) 0-based.
void append_block_pieces(std::map<std::pair<int, int>, std::vector<Piece>>& pieces, Scalar start,
                         Scalar eta) {
  const Scalar a_end = start + kLogSqrt2;
  const Scalar b_end = start + kLog2;
  const Scalar c_end = start + std::log(2.0 / eta);
  const Scalar d_end = start + building_block_duration(eta);
  auto add = [&](int j, int k, Scalar t0, Scalar t1) {
    pieces[{j, k}].push_back(unit_piece(t0, t1));
  };
  add(0, 1, start, a_end);
  add(1, 0, start, a_end);
  add(2, 3, start, a_end);
  add(3, 2, start, a_end);
  add(1, 2, a_end, b_end);
  add(2, 1, a_end, b_end);
  add(1, 0, b_end, c_end);
  add(2, 3, b_end, c_end);
  add(0, 3, c_end, d_end);
  add(3, 0, c_end, d_end);
}

ConnectionSchedule schedule_from_piece_map(
    int n, const std::map<std::pair<int, int>, std::vector<Piece>>& pieces) {
  ConnectionSchedule s(n);
  for (const auto& [jk, ps] : pieces)
    s.set_entry(jk.first, jk.second, PiecewiseFunction::from_pieces(ps));
  return s;
}

}  // namespace

Scalar building_block_duration(Scalar eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("eta must lie in (0, 1)");
  // The final re-balancing segment runs for half of log(2/(2-eta)): the
  // outer pair approaches symmetrically, so its gap needs only half the
  // one-sided pull that produced the inner gap.
  return std::log(2.0 / eta) + 0.5 * std::log(2.0 / (2.0 - eta));
}

Scenario building_block(Scalar m, Scalar eta) {
  if (!(m > 0.0)) throw std::domain_error("m must be positive");
  const Scalar duration = building_block_duration(eta);

  std::map<std::pair<int, int>, std::vector<Piece>> pieces;
  append_block_pieces(pieces, 0.0, eta);

  Scenario s;
  s.name = "building_block";
  s.description =
      "four-agent contraction block: shrinks (-m,-m,m,m) by 1 - eta/2 while keeping its shape";
  s.schedule = schedule_from_piece_map(4, pieces);
  s.x0 = AgentState::scalar(0.0, vec4(-m, -m, m, m));
  s.horizon_hint = duration;
  const Scalar mf = (1.0 - eta / 2.0) * m;
  s.golden.push_back(
      state_fact(kLog2, vec4(-m, -m / 2.0, m / 2.0, m), 1e-9, "inner pair met halfway"));
  s.golden.push_back(state_fact(duration, vec4(-mf, -mf, mf, mf), 1e-9, "contracted end state"));
  s.suggested_tn = {0.0, duration};
  return s;
}

Scalar chain_eta(int n) {
  if (n < 1) throw std::domain_error("block index starts at 1");
  const Scalar d = static_cast<Scalar>(n + 1);
  return 2.0 * (1.0 - std::exp(-1.0 / (d * d)));
}

Scalar chain_m(int n) {
  if (n < 0) throw std::domain_error("negative block count");
  Scalar log_m = 0.0;
  for (int j = 1; j <= n; ++j) {
    const Scalar d = static_cast<Scalar>(j + 1);
    log_m -= 1.0 / (d * d);
  }
  return std::exp(log_m);
}

std::vector<Scalar> chain_boundaries(int n_blocks) {
  std::vector<Scalar> b{0.0};
  for (int j = 1; j <= n_blocks; ++j) b.push_back(b.back() + building_block_duration(chain_eta(j)));
  return b;
}

Scenario non_consensus_chain(int n_blocks) {
  if (n_blocks < 1) throw std::domain_error("need at least one block");
  const std::vector<Scalar> bounds = chain_boundaries(n_blocks);

  std::map<std::pair<int, int>, std::vector<Piece>> pieces;
  for (int j = 1; j <= n_blocks; ++j)
    append_block_pieces(pieces, bounds[static_cast<std::size_t>(j) - 1], chain_eta(j));

  Scenario s;
  s.name = "non_consensus_chain";
  s.description =
      "contraction blocks with eta_n -> 0: every windowed-mass check passes along the block "
      "boundaries, the boundary gaps grow like 2 log n, and the spread never drops below "
      "2 exp(-pi^2/6)";
  s.schedule = schedule_from_piece_map(4, pieces);
  s.x0 = AgentState::scalar(0.0, vec4(-1.0, -1.0, 1.0, 1.0));
  s.horizon_hint = bounds.back();
  s.suggested_tn = bounds;
  s.diameter_lower_bound = 2.0 * std::exp(-M_PI * M_PI / 6.0);
  for (int n = 0; n <= n_blocks; ++n) {
    const Scalar mn = chain_m(n);
    s.golden.push_back(state_fact(bounds[static_cast<std::size_t>(n)],
                                  vec4(-mn, -mn, mn, mn), 1e-9, "state at block boundary"));
  }
  return s;
}

Scenario six_particle_periodic(int n_periods) {
  if (n_periods < 1) throw std::domain_error("need at least one period");
  // Pattern on [0, 1): the middle pair (agents 3,4; 0-based 2,3) contracts
  // for log sqrt(2), then each middle agent is pinned back toward its outer
  // anchor. The pull-back needs integrated rate log 2 inside an interval of
  // length log sqrt(2), hence rate 2.
  std::vector<Piece> contract{unit_piece(0.0, kLogSqrt2)};
  std::vector<Piece> pin{{kLogSqrt2, kLog2, SegmentPrimitive::constant(2.0)}};

  ConnectionSchedule sched(6);
  sched.set_entry(2, 3, PiecewiseFunction::from_pieces(contract, 1.0));
  sched.set_entry(3, 2, PiecewiseFunction::from_pieces(contract, 1.0));
  sched.set_entry(2, 0, PiecewiseFunction::from_pieces(pin, 1.0));
  sched.set_entry(3, 5, PiecewiseFunction::from_pieces(pin, 1.0));

  Scenario s;
  s.name = "six_particle_periodic";
  s.description =
      "six agents whose middle pair contracts and is re-pinned every period; the state at "
      "integer times is exactly periodic and consensus never happens";
  s.schedule = sched;
  Vector x0(6);
  x0 << -3, -2, -2, 2, 2, 3;
  s.x0 = AgentState::scalar(0.0, x0);
  s.horizon_hint = static_cast<Scalar>(n_periods);
  Vector mid(6), back(6);
  mid << -3, -2, -1, 1, 2, 3;
  back << -3, -2, -2, 2, 2, 3;
  for (int n = 0; n < n_periods; ++n) {
    const Scalar base = static_cast<Scalar>(n);
    s.golden.push_back(state_fact(base + kLogSqrt2, mid, 1e-9, "middle pair met"));
    s.golden.push_back(state_fact(base + kLog2, back, 1e-9, "middle pair re-pinned"));
    s.suggested_tn.push_back(base);
  }
  return s;
}

Scenario sparse_three_agent(const std::vector<Scalar>& t_seq,
                            const std::map<std::pair<int, int>, PiecewiseFunction>& fillers) {
  if (t_seq.empty()) throw std::domain_error("need at least one burst time");
  std::map<std::pair<int, int>, std::vector<Piece>> pieces;
  for (Scalar tn : t_seq) {
    pieces[{0, 1}].push_back(unit_piece(tn, tn + 1.0));
    pieces[{0, 2}].push_back(unit_piece(tn + 2.0, tn + 3.0));
    pieces[{1, 2}].push_back(unit_piece(tn + 4.0, tn + 5.0));
  }

  Scenario s;
  s.name = "sparse_three_agent";
  s.description =
      "three agents with unit activity bursts at times t_n: pairwise coverage of the limit "
      "graph certifies consensus however sparse the bursts are";
  s.schedule = schedule_from_piece_map(3, pieces);
  for (const auto& [jk, f] : fillers) {
    if (!pieces.count(jk))
      s.schedule.set_entry(jk.first, jk.second, f);
    else
      throw std::domain_error("filler would overwrite a prescribed entry");
  }
  Vector x0(3);
  x0 << -1, 0, 1;
  s.x0 = AgentState::scalar(0.0, x0);
  s.horizon_hint = t_seq.back() + 6.0;
  s.suggested_tn = t_seq;
  // Each burst triple contracts the spread by at least e^{-1/2}.
  if (t_seq.size() >= 20)
    s.golden.push_back(
        diameter_below_fact(s.horizon_hint, 1e-3, "spread collapses well within the horizon"));
  return s;
}

Scenario unbounded_three_agent(const std::vector<Scalar>& t_seq) {
  if (t_seq.empty()) throw std::domain_error("need at least one burst time");
  std::map<std::pair<int, int>, std::vector<Piece>> pieces;
  for (Scalar tn : t_seq) {
    pieces[{0, 1}].push_back({tn, tn + 1.0, SegmentPrimitive::inv_sqrt_left(tn)});
    pieces[{0, 2}].push_back(unit_piece(tn + 2.0, tn + 3.0));
    pieces[{1, 2}].push_back({tn + 4.0, tn + 5.0, SegmentPrimitive::inv_cbrt_right(tn + 5.0)});
  }

  Scenario s;
  s.name = "unbounded_three_agent";
  s.description =
      "burst pattern with integrable singular rates: unbounded values are harmless because "
      "only window masses enter the dynamics and the checks";
  s.schedule = schedule_from_piece_map(3, pieces);
  Vector x0(3);
  x0 << -1, 0, 1;
  s.x0 = AgentState::scalar(0.0, x0);
  s.horizon_hint = t_seq.back() + 6.0;
  s.suggested_tn = t_seq;
  if (t_seq.size() >= 20)
    s.golden.push_back(
        diameter_below_fact(s.horizon_hint, 1e-3, "spread collapses well within the horizon"));
  return s;
}

Scenario cut_balance_counterexample(std::optional<PiecewiseFunction> a32, Scalar horizon_hint) {
  PiecewiseFunction decaying =
      a32 ? *a32
          : PiecewiseFunction::single(0.0, kTimeInfinity,
                                      SegmentPrimitive::hyperbolic(1.0, 0.0, 1.0));

  ConnectionSchedule sched(4);
  const PiecewiseFunction ones =
      PiecewiseFunction::single(0.0, kTimeInfinity, SegmentPrimitive::constant(1.0));
  sched.set_entry(0, 1, ones);
  sched.set_entry(1, 0, ones);
  sched.set_entry(2, 3, ones);
  sched.set_entry(3, 2, ones);
  sched.set_entry(1, 2, ones);
  sched.set_entry(2, 1, decaying);

  Scenario s;
  s.name = "cut_balance_counterexample";
  s.description =
      "reciprocity across the cut {1,2}|{3,4} decays, so cut-balance fails for any fixed K; "
      "the tail-positive limit graph still funnels everyone toward agents 3-4 and the system "
      "reaches consensus";
  s.schedule = sched;
  s.x0 = AgentState::scalar(0.0, vec4(-1.0, -1.0, 1.0, 1.0));
  s.horizon_hint = horizon_hint;
  s.golden.push_back(diameter_below_fact(60.0, 1e-6, "consensus well before t = 60"));
  return s;
}

Scenario slow_pair(Scalar horizon_hint) {
  ConnectionSchedule sched(3);
  const PiecewiseFunction ones =
      PiecewiseFunction::single(0.0, kTimeInfinity, SegmentPrimitive::constant(1.0));
  const PiecewiseFunction slow = PiecewiseFunction::single(
      0.0, kTimeInfinity, SegmentPrimitive::hyperbolic(1.0, 0.0, 1.0));
  sched.set_entry(0, 1, ones);
  sched.set_entry(1, 0, ones);
  sched.set_entry(1, 2, slow);
  sched.set_entry(2, 1, slow);

  Scenario s;
  s.name = "slow_pair";
  s.description =
      "fast symmetric pair plus a 1/(t+1) link: every windowed-mass condition loses the slow "
      "link, but exact symmetry keeps cut-balance with K = 1";
  s.schedule = sched;
  Vector x0(3);
  x0 << -1, 0, 1;
  s.x0 = AgentState::scalar(0.0, x0);
  s.horizon_hint = horizon_hint;
  return s;
}

Scenario complete_uniform(int n_agents, const Vector& x0) {
  if (n_agents < 1) throw std::domain_error("need at least one agent");
  if (x0.size() != n_agents) throw std::domain_error("initial state size mismatch");
  ConnectionSchedule sched(n_agents);
  const PiecewiseFunction ones =
      PiecewiseFunction::single(0.0, kTimeInfinity, SegmentPrimitive::constant(1.0));
  for (int j = 0; j < n_agents; ++j)
    for (int k = 0; k < n_agents; ++k)
      if (j != k) sched.set_entry(j, k, ones);

  Scenario s;
  s.name = "complete_uniform";
  s.description = "all rates identically one: every gap decays like exp(-N t)";
  s.schedule = sched;
  s.x0 = AgentState::scalar(0.0, x0);
  s.horizon_hint = 10.0;
  s.golden.push_back(diameter_below_fact(10.0, 1e-6, "baseline exponential decay"));
  return s;
}

std::vector<std::string> scenario_names() {
  return {"building_block",    "non_consensus_chain",       "six_particle_periodic",
          "sparse_three_agent", "unbounded_three_agent",    "cut_balance_counterexample",
          "slow_pair",          "complete_uniform"};
}

Scenario make_scenario(const std::string& name, const ScenarioOptions& opt) {
  if (name == "building_block") return building_block(1.0, 0.5);
  if (name == "non_consensus_chain") return non_consensus_chain(opt.n_blocks);
  if (name == "six_particle_periodic") return six_particle_periodic(opt.n_periods);
  if (name == "sparse_three_agent" || name == "unbounded_three_agent") {
    std::vector<Scalar> t_seq;
    for (int i = 0; i < opt.n_bursts; ++i) t_seq.push_back(opt.burst_gap * i);
    return name == "sparse_three_agent" ? sparse_three_agent(t_seq)
                                        : unbounded_three_agent(t_seq);
  }
  if (name == "cut_balance_counterexample")
    return cut_balance_counterexample(std::nullopt, opt.horizon);
  if (name == "slow_pair") return slow_pair(opt.horizon);
  if (name == "complete_uniform") {
    Vector x0(opt.n_agents);
    for (int i = 0; i < opt.n_agents; ++i)
      x0(i) = (i < opt.n_agents / 2) ? -1.0 : 1.0;
    return complete_uniform(opt.n_agents, x0);
  }
  throw std::out_of_range("unknown scenario: " + name);
}

}  // namespace consensus
