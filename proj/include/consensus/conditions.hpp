#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consensus/graphs.hpp"
#include "consensus/schedule.hpp"
#include "consensus/types.hpp"

namespace consensus {

// Every verdict is a statement about a finite horizon or window; the report
// always carries it so nothing overclaims. "Fails" means the sufficient
// condition could not be verified, never that consensus is impossible.
enum class Verdict { HoldsUpToHorizon, Fails, Inconclusive };

const char* verdict_name(Verdict v);

struct Witness {
  std::optional<std::pair<int, int>> pair_jk;
  std::optional<Scalar> t;
  std::optional<std::vector<int>> subset;
  std::optional<int> cell_index;
  std::optional<Scalar> lhs;
  std::optional<Scalar> rhs;
  std::string note;
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::Inconclusive;
  Scalar horizon = 0.0;
  std::map<std::string, Scalar> params;   // echoed inputs
  std::map<std::string, Scalar> metrics;  // derived numbers (masses, gaps, ...)
  std::vector<std::string> notes;
  std::optional<Witness> witness;
  std::optional<DirectedGraph> graph;
  std::vector<int> reachable_nodes;

  bool holds() const { return verdict == Verdict::HoldsUpToHorizon; }
};

struct ConditionParams {
  Scalar T = 1.0;          // window length
  Scalar mu = 0.1;         // mass threshold
  Scalar horizon = 50.0;   // verification horizon
  Scalar stride = 0.0;     // grid stride; 0 means T/8
  Scalar mu_slack = 1e-9;  // absolute slack when comparing masses against mu

  Scalar grid_stride() const { return stride > 0.0 ? stride : T / 8.0; }
  void validate() const;
};

// Grid for scanning t -> mass(t, t+T): uniform stride plus every breakpoint
// of the entry (and each breakpoint minus T), clipped to [0, horizon - T].
// Piecewise-constant entries are thereby checked exactly.
std::vector<Scalar> window_scan_grid(const PiecewiseFunction& entry, const ConditionParams& p);

// Uniform lower bound on every length-T window mass of entry (j,k) over
// [0, horizon - T].
ConditionReport check_property_b(const ConnectionSchedule& schedule, int j, int k,
                                 const ConditionParams& p);

// Numeric stand-in for limsup_T liminf_t of the window mass: for each T in
// t_windows, the minimum window mass with t >= t0 (per t0 in t_starts); the
// estimate is the best such bound at the largest t0.
struct PropertyAEstimate {
  Scalar ell_hat = 0.0;
  Scalar best_T = 0.0;
  std::vector<Scalar> per_t0;  // aligned with t_starts
  bool stable = false;         // nondecreasing across t_starts
  ConditionReport report;
};
PropertyAEstimate estimate_property_a(const ConnectionSchedule& schedule, int j, int k,
                                      const std::vector<Scalar>& t_windows,
                                      const std::vector<Scalar>& t_starts, Scalar horizon,
                                      Scalar stride = 0.0);

// Window masses sampled along an explicit sequence t_n, plus gap accounting.
// gap_bound == 0 means "no bound declared": masses alone cannot close the
// argument when gaps trend upward, so the verdict degrades to inconclusive.
ConditionReport check_property_c(const ConnectionSchedule& schedule, int j, int k,
                                 const std::vector<Scalar>& t_seq, Scalar T, Scalar mu,
                                 Scalar gap_bound = 0.0, Scalar mu_slack = 1e-9);

// Graph with arrow j->k iff property (B) holds for entry (j,k); the first
// verdict asks for a globally reachable node, the second for completeness.
struct WindowedGraphResult {
  DirectedGraph graph;
  ConditionReport reachable;  // condition "moreau"
  ConditionReport complete;   // condition "persistent_excitation"
};
WindowedGraphResult build_moreau_graph(const ConnectionSchedule& schedule,
                                       const ConditionParams& p);

// Same construction sampled only at the given t_n (property (C) per pair,
// without a declared gap bound). Carries an unbounded-gap warning when the
// gaps trend upward.
struct SampledGraphResult {
  DirectedGraph graph;
  ConditionReport report;  // condition "windowed_graph_on_sequence"
  bool gap_warning = false;
};
SampledGraphResult build_windowed_graph(const ConnectionSchedule& schedule,
                                        const std::vector<Scalar>& t_seq, Scalar T, Scalar mu,
                                        Scalar mu_slack = 1e-9);

// Common-target condition: for every grid time and every pair (i,j) some k
// receives window mass >= mu from both. Selectors are recomputed per grid
// point; each one is reduced to a single node as a consistency probe.
struct IscResult {
  ConditionReport report;  // condition "integral_scrambling"
  std::vector<Scalar> grid;
  std::vector<SelectorOracle> selectors;  // aligned with grid, present when holds
  std::vector<int> reduced_nodes;
};
IscResult check_isc(const ConnectionSchedule& schedule, const ConditionParams& p);

struct CutBalanceParams {
  std::vector<Scalar> partition;  // strictly increasing cell boundaries
  Scalar K = 1.0;
  Scalar M = 0.0;  // 0 means auto: K * max cell total mass + 1e-12

  static std::vector<Scalar> unit_partition(Scalar horizon);
  void validate() const;
};

// For every cell and every proper nonempty subset S: outward mass <= K *
// inward mass <= M. Enumerates all 2^N - 2 subsets; N <= 32.
ConditionReport check_cut_balance(const ConnectionSchedule& schedule, const CutBalanceParams& p);

// Window masses of every entry translated to each t_n, on a cell grid over
// [0, window]; the limit estimate is the last row, flagged converged when the
// final `lookback` rows agree within delta.
struct LimitTable {
  int n_agents = 0;
  Scalar window = 0.0;
  Scalar delta = 0.0;
  int lookback = 4;
  std::vector<Scalar> t_seq;
  std::vector<Scalar> cell_edges;  // 0 = e_0 < ... < e_M = window

  struct PairEstimate {
    std::vector<std::vector<Scalar>> cell_masses;  // [seq index][cell]
    std::vector<Scalar> limit_cells;
    bool converged = true;
    Scalar max_deviation = 0.0;
  };
  std::vector<PairEstimate> pairs;  // row-major j*n+k; diagonal unused

  const PairEstimate& pair(int j, int k) const;
  // Limit mass over [cell_edges[a], cell_edges[b]].
  Scalar limit_mass(int j, int k, int edge_a, int edge_b) const;
  Scalar limit_total(int j, int k) const;
  bool all_converged() const;
};

LimitTable estimate_limits(const ConnectionSchedule& schedule, const std::vector<Scalar>& t_seq,
                           Scalar window, Scalar stride, Scalar delta, int lookback = 4);

// Arrow j->k iff the limit keeps positive mass on every tail [t, window] for
// grid t in [0, window - tail_margin]; asks for a globally reachable node.
// A finite-horizon proxy: positivity is verified on [t, window], not [t, inf).
struct LimitGraphResult {
  DirectedGraph graph;
  ConditionReport report;
};
LimitGraphResult build_limit_reachable_graph(const LimitTable& table, Scalar eps,
                                             Scalar tail_margin);

// Arrow j->k iff the limit has positive total mass on [0, window]; asks for
// pairwise coverage (arrow direction plays no role).
LimitGraphResult build_limit_coverage_graph(const LimitTable& table, Scalar eps);

struct CertifyParams {
  ConditionParams window;             // Moreau / PE / ISC
  CutBalanceParams cut_balance;       // partition defaults to unit cells
  std::vector<Scalar> t_seq;          // limit-graph sampling times
  Scalar limit_window = 3.0;          // W
  Scalar limit_stride = 0.25;
  Scalar limit_delta = 1e-9;
  Scalar limit_eps = 1e-9;            // tail-positivity threshold
  Scalar tail_margin = 1.0;
};

struct CertifyReport {
  std::vector<ConditionReport> conditions;
  std::vector<std::string> certified_by;
  bool any_certified() const { return !certified_by.empty(); }
};

// Runs every checker and lists the ones whose sufficient condition holds.
// The conditions are sufficient only, so the aggregate never claims
// non-consensus.
CertifyReport certify(const ConnectionSchedule& schedule, const CertifyParams& p);

}  // namespace consensus
