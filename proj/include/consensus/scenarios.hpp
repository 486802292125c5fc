#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consensus/dynamics.hpp"
#include "consensus/schedule.hpp"
#include "consensus/types.hpp"

namespace consensus {

// A closed-form fact a trajectory must reproduce, used as a golden check.
struct GoldenFact {
  enum class Kind { StateEquals, DiameterAtLeast, DiameterBelow };
  Kind kind = Kind::StateEquals;
  Scalar t = 0.0;
  Vector state;       // StateEquals
  Scalar value = 0.0; // diameter bounds
  Scalar tol = 1e-9;
  std::string note;
};

struct Scenario {
  std::string name;
  std::string description;
  ConnectionSchedule schedule{1};
  AgentState x0;
  Scalar horizon_hint = 10.0;
  std::vector<GoldenFact> golden;
  // Natural sampling times (block boundaries, period starts), when any.
  std::vector<Scalar> suggested_tn;
  // Analytic lower bound on the diameter for all time, when one exists;
  // simulation alone can never certify non-consensus.
  std::optional<Scalar> diameter_lower_bound;
};

// Four agents starting at (-m,-m,m,m). The outer pairs idle while the inner
// pair meets halfway, each inner agent is then pulled back to its outer
// anchor until the gap is eta/2 of the spread, and finally the anchors are
// re-balanced. Net effect: the configuration contracts by exactly 1 - eta/2
// and keeps its shape, in total time block_duration(eta).
Scalar building_block_duration(Scalar eta);
Scenario building_block(Scalar m, Scalar eta);

// Blocks concatenated with eta_n = 2(1 - exp(-1/(n+1)^2)), n = 1..n_blocks.
// The spread after n blocks is 2 m_n with m_n = prod exp(-1/(j+1)^2), which
// stays above 2 exp(-pi^2/6): the diameter never vanishes even though every
// window-mass condition is met along the (ever sparser) block boundaries.
Scalar chain_eta(int n);                       // eta_n, n >= 1
Scalar chain_m(int n);                         // m_n, n >= 0
std::vector<Scalar> chain_boundaries(int n_blocks);  // Theta'_0 .. Theta'_n
Scenario non_consensus_chain(int n_blocks);

// Six agents; a middle pair contracts then gets re-pinned to the outer
// anchors every unit of time, so the state at integer times is periodic and
// the spread never shrinks. A strongly connected subgraph (the middle pair)
// does not imply consensus for that pair.
Scenario six_particle_periodic(int n_periods = 20);

// Three agents with short activity bursts at times t_n (gaps >= 6 expected):
// agent 1 listens to 2, then 1 listens to 3, then 2 listens to 3. Extra
// bounded filler connections may be injected for the unspecified pairs.
Scenario sparse_three_agent(const std::vector<Scalar>& t_seq,
                            const std::map<std::pair<int, int>, PiecewiseFunction>& fillers = {});

// Same burst pattern with integrable singular rates on the first and third
// bursts.
Scenario unbounded_three_agent(const std::vector<Scalar>& t_seq);

// Four agents, five unit connections plus a caller-chosen rate for entry
// (3,2) (default 1/(1+t)): reciprocity across the cut {1,2}|{3,4} decays, so
// cut-balance fails, yet the limit graph still funnels everyone to the right
// pair.
Scenario cut_balance_counterexample(
    std::optional<PiecewiseFunction> a32 = std::nullopt, Scalar horizon_hint = 100.0);

// Three agents: a fast symmetric pair (1,2) and a slow symmetric link (2,3)
// with rate 1/(t+1). Every windowed-mass condition loses the slow link, but
// exact symmetry keeps cut-balance with K = 1.
Scenario slow_pair(Scalar horizon_hint = 100.0);

// All off-diagonal rates identically 1; the baseline fully-connected case.
Scenario complete_uniform(int n_agents, const Vector& x0);

struct ScenarioOptions {
  int n_blocks = 50;        // non_consensus_chain
  int n_periods = 20;       // six_particle_periodic
  int n_agents = 4;         // complete_uniform
  Scalar burst_gap = 6.0;   // sparse / unbounded: t_n = gap * n
  int n_bursts = 100;
  Scalar horizon = 100.0;
};

std::vector<std::string> scenario_names();
// Throws std::out_of_range for unknown names.
Scenario make_scenario(const std::string& name, const ScenarioOptions& opt = {});

}  // namespace consensus
