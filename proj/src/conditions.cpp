#include "consensus/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace consensus {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

void append_sorted_unique(std::vector<Scalar>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](Scalar a, Scalar b) { return std::abs(a - b) < 1e-12; }),
          v.end());
}

void check_t_seq(const std::vector<Scalar>& t_seq) {
  require(!t_seq.empty(), "empty time sequence");
  require(t_seq.front() >= 0.0, "time sequence must be nonnegative");
  for (std::size_t i = 1; i < t_seq.size(); ++i)
    require(t_seq[i] > t_seq[i - 1], "time sequence must be strictly increasing");
}

struct GapStats {
  Scalar max_gap = 0.0;
  Scalar min_gap = 0.0;
  bool trend_upward = false;
};

GapStats gap_stats(const std::vector<Scalar>& t_seq) {
  GapStats g;
  if (t_seq.size() < 2) return g;
  g.min_gap = std::numeric_limits<Scalar>::infinity();
  bool nondecreasing = true;
  Scalar prev = t_seq[1] - t_seq[0];
  for (std::size_t i = 1; i < t_seq.size(); ++i) {
    const Scalar gap = t_seq[i] - t_seq[i - 1];
    g.max_gap = std::max(g.max_gap, gap);
    g.min_gap = std::min(g.min_gap, gap);
    if (gap < prev - 1e-12) nondecreasing = false;
    prev = gap;
  }
  const Scalar first = t_seq[1] - t_seq[0];
  const Scalar last = t_seq.back() - t_seq[t_seq.size() - 2];
  g.trend_upward = nondecreasing && last > first + 1e-9;
  return g;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::HoldsUpToHorizon:
      return "holds-up-to-horizon";
    case Verdict::Fails:
      return "fails";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

void ConditionParams::validate() const {
  require(T > 0.0 && std::isfinite(T), "window length T must be positive");
  require(mu > 0.0 && std::isfinite(mu), "mass threshold mu must be positive");
  require(horizon > T, "horizon must exceed the window length");
  require(mu_slack >= 0.0, "mu_slack must be nonnegative");
}

std::vector<Scalar> window_scan_grid(const PiecewiseFunction& entry, const ConditionParams& p) {
  const Scalar hi = p.horizon - p.T;
  std::vector<Scalar> grid;
  const Scalar stride = p.grid_stride();
  for (Scalar t = 0.0; t <= hi + 1e-12; t += stride) grid.push_back(std::min(t, hi));
  grid.push_back(hi);
  for (Scalar b : entry.breakpoints_in(0.0, p.horizon)) {
    if (b <= hi) grid.push_back(b);
    const Scalar shifted = b - p.T;
    if (shifted >= 0.0 && shifted <= hi) grid.push_back(shifted);
  }
  append_sorted_unique(grid);
  return grid;
}

ConditionReport check_property_b(const ConnectionSchedule& schedule, int j, int k,
                                 const ConditionParams& p) {
  p.validate();
  ConditionReport r;
  r.condition = "property_b";
  r.horizon = p.horizon;
  r.params = {{"T", p.T}, {"mu", p.mu}, {"stride", p.grid_stride()}};
  r.params["j"] = j + 1;
  r.params["k"] = k + 1;

  const PiecewiseFunction& entry = schedule.entry(j, k);
  Scalar min_mass = std::numeric_limits<Scalar>::infinity();
  for (Scalar t : window_scan_grid(entry, p)) {
    const Scalar mass = entry.integral(t, t + p.T);
    if (mass < min_mass) min_mass = mass;
    if (mass < p.mu - p.mu_slack) {
      r.verdict = Verdict::Fails;
      Witness w;
      w.pair_jk = {j, k};
      w.t = t;
      w.lhs = mass;
      w.rhs = p.mu;
      w.note = "window mass below mu";
      r.witness = w;
      r.metrics["min_mass"] = min_mass;
      return r;
    }
  }
  r.verdict = Verdict::HoldsUpToHorizon;
  r.metrics["min_mass"] = min_mass;
  return r;
}

PropertyAEstimate estimate_property_a(const ConnectionSchedule& schedule, int j, int k,
                                      const std::vector<Scalar>& t_windows,
                                      const std::vector<Scalar>& t_starts, Scalar horizon,
                                      Scalar stride) {
  check_t_seq(t_windows);
  check_t_seq(t_starts);
  require(horizon > t_starts.back() + t_windows.back(), "horizon too small");

  const PiecewiseFunction& entry = schedule.entry(j, k);
  PropertyAEstimate est;
  for (Scalar t0 : t_starts) {
    Scalar best = 0.0;
    Scalar best_T = t_windows.front();
    for (Scalar T : t_windows) {
      ConditionParams p;
      p.T = T;
      p.mu = 1.0;  // unused here
      p.horizon = horizon;
      p.stride = stride;
      Scalar min_mass = std::numeric_limits<Scalar>::infinity();
      for (Scalar t : window_scan_grid(entry, p)) {
        if (t < t0) continue;
        min_mass = std::min(min_mass, entry.integral(t, t + T));
      }
      if (std::isfinite(min_mass) && min_mass > best) {
        best = min_mass;
        best_T = T;
      }
    }
    est.per_t0.push_back(best);
    if (t0 == t_starts.back()) est.best_T = best_T;
  }
  est.ell_hat = est.per_t0.back();
  est.stable = std::is_sorted(est.per_t0.begin(), est.per_t0.end(),
                              [](Scalar a, Scalar b) { return a < b - 1e-12; });

  est.report.condition = "property_a";
  est.report.horizon = horizon;
  est.report.params = {{"T_max", t_windows.back()},
                       {"t0_max", t_starts.back()},
                       {"j", static_cast<Scalar>(j + 1)},
                       {"k", static_cast<Scalar>(k + 1)}};
  est.report.metrics = {{"ell_hat", est.ell_hat},
                        {"best_T", est.best_T},
                        {"stable", est.stable ? 1.0 : 0.0}};
  if (est.ell_hat > 0.0) {
    est.report.verdict = Verdict::HoldsUpToHorizon;
    if (!est.stable) {
      est.report.verdict = Verdict::Inconclusive;
      est.report.notes.push_back("bound not stable across t0 list");
    }
  } else {
    est.report.verdict = Verdict::Fails;
    Witness w;
    w.pair_jk = {j, k};
    w.lhs = est.ell_hat;
    w.note = "no positive lower bound found on any window";
    est.report.witness = w;
  }
  return est;
}

ConditionReport check_property_c(const ConnectionSchedule& schedule, int j, int k,
                                 const std::vector<Scalar>& t_seq, Scalar T, Scalar mu,
                                 Scalar gap_bound, Scalar mu_slack) {
  check_t_seq(t_seq);
  require(T > 0.0 && mu > 0.0, "T and mu must be positive");

  ConditionReport r;
  r.condition = "property_c";
  r.horizon = t_seq.back() + T;
  r.params = {{"T", T}, {"mu", mu}, {"n_samples", static_cast<Scalar>(t_seq.size())},
              {"j", static_cast<Scalar>(j + 1)}, {"k", static_cast<Scalar>(k + 1)}};
  if (gap_bound > 0.0) r.params["gap_bound"] = gap_bound;

  const PiecewiseFunction& entry = schedule.entry(j, k);
  Scalar min_mass = std::numeric_limits<Scalar>::infinity();
  for (std::size_t n = 0; n < t_seq.size(); ++n) {
    const Scalar mass = entry.integral(t_seq[n], t_seq[n] + T);
    min_mass = std::min(min_mass, mass);
    if (mass < mu - mu_slack) {
      r.verdict = Verdict::Fails;
      Witness w;
      w.pair_jk = {j, k};
      w.t = t_seq[n];
      w.lhs = mass;
      w.rhs = mu;
      w.note = "window mass below mu at t_n";
      r.witness = w;
      r.metrics["min_mass"] = min_mass;
      return r;
    }
  }

  const GapStats gaps = gap_stats(t_seq);
  r.metrics = {{"min_mass", min_mass},
               {"max_gap", gaps.max_gap},
               {"gap_trend_upward", gaps.trend_upward ? 1.0 : 0.0}};
  if (gap_bound > 0.0) {
    if (gaps.max_gap <= gap_bound + 1e-12) {
      r.verdict = Verdict::HoldsUpToHorizon;
    } else {
      r.verdict = Verdict::Fails;
      Witness w;
      w.pair_jk = {j, k};
      w.lhs = gaps.max_gap;
      w.rhs = gap_bound;
      w.note = "gap exceeds the declared bound";
      r.witness = w;
    }
  } else if (gaps.trend_upward) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("unbounded-gap warning: sample gaps trend upward");
  } else {
    r.verdict = Verdict::HoldsUpToHorizon;
  }
  return r;
}

WindowedGraphResult build_moreau_graph(const ConnectionSchedule& schedule,
                                       const ConditionParams& p) {
  p.validate();
  const int n = schedule.n_agents();
  WindowedGraphResult out;
  out.graph = DirectedGraph(n);
  std::optional<std::pair<int, int>> first_missing;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      if (check_property_b(schedule, j, k, p).holds()) {
        out.graph.add_arrow(j, k);
      } else if (!first_missing) {
        first_missing = {j, k};
      }
    }
  }

  out.reachable.condition = "moreau";
  out.reachable.horizon = p.horizon;
  out.reachable.params = {{"T", p.T}, {"mu", p.mu}};
  out.reachable.graph = out.graph;
  out.reachable.reachable_nodes = globally_reachable_nodes(out.graph);
  if (!out.reachable.reachable_nodes.empty()) {
    out.reachable.verdict = Verdict::HoldsUpToHorizon;
  } else {
    out.reachable.verdict = Verdict::Fails;
    Witness w;
    if (first_missing) w.pair_jk = *first_missing;
    w.note = "windowed-mass graph has no globally reachable node";
    out.reachable.witness = w;
  }

  out.complete.condition = "persistent_excitation";
  out.complete.horizon = p.horizon;
  out.complete.params = out.reachable.params;
  out.complete.graph = out.graph;
  if (out.graph.is_complete()) {
    out.complete.verdict = Verdict::HoldsUpToHorizon;
  } else {
    out.complete.verdict = Verdict::Fails;
    Witness w;
    if (first_missing) w.pair_jk = *first_missing;
    w.note = "windowed-mass graph is not complete";
    out.complete.witness = w;
  }
  return out;
}

SampledGraphResult build_windowed_graph(const ConnectionSchedule& schedule,
                                        const std::vector<Scalar>& t_seq, Scalar T, Scalar mu,
                                        Scalar mu_slack) {
  check_t_seq(t_seq);
  const int n = schedule.n_agents();
  SampledGraphResult out;
  out.graph = DirectedGraph(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      bool all_pass = true;
      for (Scalar t : t_seq) {
        if (schedule.window_mass(j, k, t, t + T) < mu - mu_slack) {
          all_pass = false;
          break;
        }
      }
      if (all_pass) out.graph.add_arrow(j, k);
    }
  }

  const GapStats gaps = gap_stats(t_seq);
  out.gap_warning = gaps.trend_upward;

  out.report.condition = "windowed_graph_on_sequence";
  out.report.horizon = t_seq.back() + T;
  out.report.params = {{"T", T}, {"mu", mu}, {"n_samples", static_cast<Scalar>(t_seq.size())}};
  out.report.metrics = {{"max_gap", gaps.max_gap},
                        {"gap_trend_upward", gaps.trend_upward ? 1.0 : 0.0}};
  out.report.graph = out.graph;
  out.report.reachable_nodes = globally_reachable_nodes(out.graph);
  if (out.report.reachable_nodes.empty()) {
    out.report.verdict = Verdict::Fails;
    Witness w;
    w.note = "sampled windowed-mass graph has no globally reachable node";
    out.report.witness = w;
  } else if (out.gap_warning) {
    out.report.verdict = Verdict::Inconclusive;
    out.report.notes.push_back("unbounded-gap warning: sample gaps trend upward");
  } else {
    out.report.verdict = Verdict::HoldsUpToHorizon;
  }
  return out;
}

IscResult check_isc(const ConnectionSchedule& schedule, const ConditionParams& p) {
  p.validate();
  const int n = schedule.n_agents();

  // Shared grid: uniform stride plus every entry breakpoint (also shifted by
  // -T), so piecewise-constant schedules are sampled at every mass kink.
  std::vector<Scalar> grid;
  const Scalar hi = p.horizon - p.T;
  for (Scalar t = 0.0; t <= hi + 1e-12; t += p.grid_stride()) grid.push_back(std::min(t, hi));
  grid.push_back(hi);
  for (Scalar b : schedule.breakpoints_in(0.0, p.horizon)) {
    if (b <= hi) grid.push_back(b);
    if (b - p.T >= 0.0 && b - p.T <= hi) grid.push_back(b - p.T);
  }
  append_sorted_unique(grid);

  IscResult out;
  out.grid = grid;
  out.report.condition = "integral_scrambling";
  out.report.horizon = p.horizon;
  out.report.params = {{"T", p.T}, {"mu", p.mu}};

  for (Scalar t : grid) {
    // Single-window graph at time t.
    DirectedGraph g(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (j != k && schedule.window_mass(j, k, t, t + p.T) >= p.mu - p.mu_slack)
          g.add_arrow(j, k);

    SelectorOracle sel;
    sel.n_nodes = n;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        int found = -1;
        for (int k = 0; k < n; ++k) {
          if (g.has_arrow(i, k) && g.has_arrow(j, k)) {
            found = k;
            break;
          }
        }
        if (found < 0) {
          out.report.verdict = Verdict::Fails;
          Witness w;
          w.pair_jk = {i, j};
          w.t = t;
          w.note = "no common target receives enough window mass from both agents";
          out.report.witness = w;
          return out;
        }
        sel.set(i, j, found);
      }
    }
    out.selectors.push_back(sel);
    out.reduced_nodes.push_back(n == 1 ? 0 : gamma_reduce(n, sel).node);
  }
  out.report.verdict = Verdict::HoldsUpToHorizon;
  out.report.metrics["n_grid"] = static_cast<Scalar>(grid.size());
  std::set<int> landed(out.reduced_nodes.begin(), out.reduced_nodes.end());
  std::string note = "selector reduction lands on node(s)";
  for (int v : landed) note += " " + std::to_string(v + 1);
  out.report.notes.push_back(note);
  return out;
}

std::vector<Scalar> CutBalanceParams::unit_partition(Scalar horizon) {
  std::vector<Scalar> cells;
  for (Scalar t = 0.0; t <= horizon + 1e-12; t += 1.0) cells.push_back(t);
  if (cells.size() < 2) cells = {0.0, horizon};
  return cells;
}

void CutBalanceParams::validate() const {
  require(partition.size() >= 2, "partition needs at least two boundaries");
  require(partition.front() >= 0.0, "partition must start at a nonnegative time");
  for (std::size_t i = 1; i < partition.size(); ++i)
    require(partition[i] > partition[i - 1], "partition must be strictly increasing");
  require(K > 0.0, "ratio bound K must be positive");
  require(M >= 0.0, "mass bound M must be nonnegative");
}

ConditionReport check_cut_balance(const ConnectionSchedule& schedule, const CutBalanceParams& p) {
  p.validate();
  const int n = schedule.n_agents();
  if (n > 32) throw std::length_error("cut-balance enumeration supports at most 32 agents");

  ConditionReport r;
  r.condition = "cut_balance";
  r.horizon = p.partition.back();
  r.params = {{"K", p.K}, {"n_cells", static_cast<Scalar>(p.partition.size() - 1)}};

  const std::size_t n_cells = p.partition.size() - 1;
  std::vector<Matrix> cell_mass(n_cells);
  Scalar max_cell_total = 0.0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    Matrix m = Matrix::Zero(n, n);
    Scalar total = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (j == k) continue;
        m(j, k) = schedule.window_mass(j, k, p.partition[c], p.partition[c + 1]);
        total += m(j, k);
      }
    }
    cell_mass[c] = std::move(m);
    max_cell_total = std::max(max_cell_total, total);
  }
  const Scalar M = p.M > 0.0 ? p.M : p.K * max_cell_total + 1e-12;
  r.params["M"] = M;

  const std::uint64_t n_subsets = (n >= 1 && n < 64) ? ((std::uint64_t{1} << n) - 1) : 0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    const Matrix& m = cell_mass[c];
    for (std::uint64_t mask = 1; mask < n_subsets; ++mask) {
      Scalar out = 0.0, in = 0.0;
      for (int j = 0; j < n; ++j) {
        if (!((mask >> j) & 1)) continue;
        for (int k = 0; k < n; ++k) {
          if ((mask >> k) & 1) continue;
          out += m(j, k);
          in += m(k, j);
        }
      }
      const bool ratio_ok = out <= p.K * in + 1e-12;
      const bool bound_ok = p.K * in <= M + 1e-12;
      if (!ratio_ok || !bound_ok) {
        r.verdict = Verdict::Fails;
        Witness w;
        w.cell_index = static_cast<int>(c);
        std::vector<int> subset;
        for (int j = 0; j < n; ++j)
          if ((mask >> j) & 1) subset.push_back(j);
        w.subset = subset;
        w.lhs = ratio_ok ? p.K * in : out;
        w.rhs = ratio_ok ? M : p.K * in;
        w.t = p.partition[c];
        w.note = ratio_ok ? "K * inward mass exceeds M" : "outward mass exceeds K * inward mass";
        r.witness = w;
        r.metrics["max_cell_total_mass"] = max_cell_total;
        return r;
      }
    }
  }
  r.verdict = Verdict::HoldsUpToHorizon;
  r.metrics["max_cell_total_mass"] = max_cell_total;
  return r;
}

const LimitTable::PairEstimate& LimitTable::pair(int j, int k) const {
  return pairs[static_cast<std::size_t>(j) * n_agents + k];
}

Scalar LimitTable::limit_mass(int j, int k, int edge_a, int edge_b) const {
  const PairEstimate& pe = pair(j, k);
  Scalar total = 0.0;
  for (int c = edge_a; c < edge_b; ++c) total += pe.limit_cells[static_cast<std::size_t>(c)];
  return total;
}

Scalar LimitTable::limit_total(int j, int k) const {
  return limit_mass(j, k, 0, static_cast<int>(cell_edges.size()) - 1);
}

bool LimitTable::all_converged() const {
  for (int j = 0; j < n_agents; ++j)
    for (int k = 0; k < n_agents; ++k)
      if (j != k && !pair(j, k).converged) return false;
  return true;
}

LimitTable estimate_limits(const ConnectionSchedule& schedule, const std::vector<Scalar>& t_seq,
                           Scalar window, Scalar stride, Scalar delta, int lookback) {
  check_t_seq(t_seq);
  require(window > 0.0 && stride > 0.0 && stride <= window, "bad window grid");
  require(delta > 0.0, "delta must be positive");
  require(lookback >= 2, "lookback must be at least 2");
  require(static_cast<int>(t_seq.size()) >= lookback + 2, "need at least lookback + 2 samples");
  require(t_seq.back() + window <= schedule.support_end(),
          "sampling window runs past the schedule support");

  LimitTable table;
  table.n_agents = schedule.n_agents();
  table.window = window;
  table.delta = delta;
  table.lookback = lookback;
  table.t_seq = t_seq;

  const int n_cells = static_cast<int>(std::ceil(window / stride - 1e-9));
  for (int i = 0; i <= n_cells; ++i)
    table.cell_edges.push_back(std::min(window, static_cast<Scalar>(i) * stride));
  table.cell_edges.back() = window;

  const int n = table.n_agents;
  table.pairs.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      auto& pe = table.pairs[static_cast<std::size_t>(j) * n + k];
      const PiecewiseFunction& entry = schedule.entry(j, k);
      for (Scalar tn : t_seq) {
        std::vector<Scalar> row;
        row.reserve(static_cast<std::size_t>(n_cells));
        for (int c = 0; c < n_cells; ++c)
          row.push_back(entry.integral(tn + table.cell_edges[static_cast<std::size_t>(c)],
                                       tn + table.cell_edges[static_cast<std::size_t>(c) + 1]));
        pe.cell_masses.push_back(std::move(row));
      }
      pe.limit_cells = pe.cell_masses.back();
      pe.max_deviation = 0.0;
      const std::size_t rows = pe.cell_masses.size();
      for (std::size_t a = rows - static_cast<std::size_t>(lookback); a < rows; ++a)
        for (std::size_t b = a + 1; b < rows; ++b)
          for (int c = 0; c < n_cells; ++c)
            pe.max_deviation =
                std::max(pe.max_deviation,
                         std::abs(pe.cell_masses[a][static_cast<std::size_t>(c)] -
                                  pe.cell_masses[b][static_cast<std::size_t>(c)]));
      pe.converged = pe.max_deviation <= delta;
    }
  }
  return table;
}

namespace {

ConditionReport limit_graph_report(const LimitTable& table, const DirectedGraph& graph,
                                   const char* condition, Scalar eps, bool holds_rule,
                                   const char* fail_note) {
  ConditionReport r;
  r.condition = condition;
  r.horizon = table.t_seq.back() + table.window;
  r.params = {{"eps", eps},
              {"window", table.window},
              {"delta", table.delta},
              {"n_samples", static_cast<Scalar>(table.t_seq.size())}};
  r.graph = graph;
  r.reachable_nodes = globally_reachable_nodes(graph);
  if (!table.all_converged()) {
    r.verdict = Verdict::Inconclusive;
    r.notes.push_back("limit table not converged for all pairs");
    return r;
  }
  if (holds_rule) {
    r.verdict = Verdict::HoldsUpToHorizon;
  } else {
    r.verdict = Verdict::Fails;
    Witness w;
    w.note = fail_note;
    r.witness = w;
  }
  return r;
}

}  // namespace

LimitGraphResult build_limit_reachable_graph(const LimitTable& table, Scalar eps,
                                             Scalar tail_margin) {
  require(eps >= 0.0 && tail_margin >= 0.0, "eps and tail_margin must be nonnegative");
  const int n = table.n_agents;
  const int last_edge = static_cast<int>(table.cell_edges.size()) - 1;

  LimitGraphResult out;
  out.graph = DirectedGraph(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      bool tail_positive = true;
      for (int e = 0; e <= last_edge; ++e) {
        if (table.cell_edges[static_cast<std::size_t>(e)] > table.window - tail_margin + 1e-12)
          break;
        if (table.limit_mass(j, k, e, last_edge) <= eps) {
          tail_positive = false;
          break;
        }
      }
      if (tail_positive) out.graph.add_arrow(j, k);
    }
  }
  out.report = limit_graph_report(table, out.graph, "limit_graph_reachable", eps,
                                  !globally_reachable_nodes(out.graph).empty(),
                                  "tail-positive limit graph has no globally reachable node");
  out.report.params["tail_margin"] = tail_margin;
  out.report.notes.push_back(
      "finite-horizon proxy: tail positivity verified on [t, window], not [t, inf)");
  return out;
}

LimitGraphResult build_limit_coverage_graph(const LimitTable& table, Scalar eps) {
  require(eps >= 0.0, "eps must be nonnegative");
  const int n = table.n_agents;
  LimitGraphResult out;
  out.graph = DirectedGraph(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k && table.limit_total(j, k) > eps) out.graph.add_arrow(j, k);
  out.report = limit_graph_report(table, out.graph, "limit_graph_coverage", eps,
                                  pairwise_coverage(out.graph),
                                  "some pair has no arrow in either direction");
  return out;
}

CertifyReport certify(const ConnectionSchedule& schedule, const CertifyParams& p) {
  CertifyReport out;

  const WindowedGraphResult moreau = build_moreau_graph(schedule, p.window);
  out.conditions.push_back(moreau.reachable);
  out.conditions.push_back(moreau.complete);
  out.conditions.push_back(check_isc(schedule, p.window).report);

  CutBalanceParams cb = p.cut_balance;
  if (cb.partition.empty()) cb.partition = CutBalanceParams::unit_partition(p.window.horizon);
  out.conditions.push_back(check_cut_balance(schedule, cb));

  std::vector<Scalar> t_seq = p.t_seq;
  if (t_seq.empty()) {
    const Scalar hi = p.window.horizon - p.limit_window;
    require(hi > 0.0, "horizon too small for the limit window");
    const int n_samples = 12;
    for (int i = 0; i < n_samples; ++i)
      t_seq.push_back(hi * static_cast<Scalar>(i) / (n_samples - 1));
  }
  const LimitTable table =
      estimate_limits(schedule, t_seq, p.limit_window, p.limit_stride, p.limit_delta);
  out.conditions.push_back(
      build_limit_reachable_graph(table, p.limit_eps, p.tail_margin).report);
  out.conditions.push_back(build_limit_coverage_graph(table, p.limit_eps).report);

  for (const ConditionReport& c : out.conditions)
    if (c.holds()) out.certified_by.push_back(c.condition);
  return out;
}

}  // namespace consensus
