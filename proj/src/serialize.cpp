#include "consensus/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace consensus {

namespace {

const char* kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::Zero:
      return "zero";
    case SegmentKind::Constant:
      return "constant";
    case SegmentKind::Hyperbolic:
      return "hyperbolic";
    case SegmentKind::InvSqrtLeft:
      return "inv_sqrt_left";
    case SegmentKind::InvCbrtRight:
      return "inv_cbrt_right";
  }
  return "?";
}

Json piece_to_json(const Piece& p) {
  Json out;
  out["t0"] = p.t_begin;
  if (std::isfinite(p.t_end))
    out["t1"] = p.t_end;
  else
    out["t1"] = nullptr;
  out["kind"] = kind_name(p.shape.kind);
  switch (p.shape.kind) {
    case SegmentKind::Zero:
      out["params"] = Json::array();
      break;
    case SegmentKind::Constant:
      out["params"] = {p.shape.rate};
      break;
    case SegmentKind::Hyperbolic:
      out["params"] = {p.shape.rate, p.shape.pole, p.shape.offset};
      break;
    case SegmentKind::InvSqrtLeft:
    case SegmentKind::InvCbrtRight:
      out["params"] = {p.shape.pole};
      break;
  }
  return out;
}

Piece piece_from_json(const Json& j) {
  Piece p;
  p.t_begin = j.at("t0").get<Scalar>();
  p.t_end = j.at("t1").is_null() ? kTimeInfinity : j.at("t1").get<Scalar>();
  const std::string kind = j.at("kind").get<std::string>();
  const auto& par = j.at("params");
  if (kind == "zero") {
    p.shape = SegmentPrimitive::zero();
  } else if (kind == "constant") {
    p.shape = SegmentPrimitive::constant(par.at(0).get<Scalar>());
  } else if (kind == "hyperbolic") {
    p.shape = SegmentPrimitive::hyperbolic(par.at(0).get<Scalar>(), par.at(1).get<Scalar>(),
                                           par.at(2).get<Scalar>());
  } else if (kind == "inv_sqrt_left") {
    p.shape = SegmentPrimitive::inv_sqrt_left(par.at(0).get<Scalar>());
  } else if (kind == "inv_cbrt_right") {
    p.shape = SegmentPrimitive::inv_cbrt_right(par.at(0).get<Scalar>());
  } else {
    throw std::invalid_argument("unknown piece kind: " + kind);
  }
  return p;
}

std::string format_number(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json int_array_1based(const std::vector<int>& v) {
  Json arr = Json::array();
  for (int x : v) arr.push_back(x + 1);
  return arr;
}

Json graph_to_json(const DirectedGraph& g) {
  Json arrows = Json::array();
  for (const auto& [j, k] : g.arrows) arrows.push_back({j + 1, k + 1});
  Json out;
  out["n_nodes"] = g.n_nodes;
  out["arrows"] = arrows;
  return out;
}

}  // namespace

Json schedule_to_json(const ConnectionSchedule& schedule) {
  Json out;
  out["n_agents"] = schedule.n_agents();
  Json entries = Json::array();
  for (int j = 0; j < schedule.n_agents(); ++j) {
    for (int k = 0; k < schedule.n_agents(); ++k) {
      const PiecewiseFunction& f = schedule.entry(j, k);
      if (f.is_zero()) continue;
      Json e;
      e["from"] = k + 1;  // influence source
      e["to"] = j + 1;
      Json pieces = Json::array();
      for (const Piece& p : f.pieces()) pieces.push_back(piece_to_json(p));
      e["pieces"] = pieces;
      if (f.period()) e["period"] = *f.period();
      entries.push_back(e);
    }
  }
  out["entries"] = entries;
  return out;
}

ConnectionSchedule schedule_from_json(const Json& j) {
  ConnectionSchedule schedule(j.at("n_agents").get<int>());
  for (const auto& e : j.at("entries")) {
    const int to = e.at("to").get<int>() - 1;
    const int from = e.at("from").get<int>() - 1;
    std::vector<Piece> pieces;
    for (const auto& pj : e.at("pieces")) pieces.push_back(piece_from_json(pj));
    std::optional<Scalar> period;
    if (e.contains("period")) period = e.at("period").get<Scalar>();
    schedule.set_entry(to, from, PiecewiseFunction::from_pieces(std::move(pieces), period));
  }
  return schedule;
}

Json scenario_to_json(const Scenario& s) {
  Json out;
  out["name"] = s.name;
  out["description"] = s.description;
  out["n_agents"] = s.schedule.n_agents();
  Json x0 = Json::array();
  for (int i = 0; i < s.x0.positions.rows(); ++i) x0.push_back(s.x0.positions(i, 0));
  out["x0"] = x0;
  out["horizon_hint"] = s.horizon_hint;
  if (s.diameter_lower_bound) out["diameter_lower_bound"] = *s.diameter_lower_bound;
  if (!s.suggested_tn.empty()) out["suggested_tn"] = s.suggested_tn;
  Json golden = Json::array();
  for (const GoldenFact& f : s.golden) {
    Json g;
    g["t"] = f.t;
    switch (f.kind) {
      case GoldenFact::Kind::StateEquals: {
        g["kind"] = "state_equals";
        Json st = Json::array();
        for (int i = 0; i < f.state.size(); ++i) st.push_back(f.state(i));
        g["state"] = st;
        g["tol"] = f.tol;
        break;
      }
      case GoldenFact::Kind::DiameterAtLeast:
        g["kind"] = "diameter_at_least";
        g["value"] = f.value;
        break;
      case GoldenFact::Kind::DiameterBelow:
        g["kind"] = "diameter_below";
        g["value"] = f.value;
        break;
    }
    if (!f.note.empty()) g["note"] = f.note;
    golden.push_back(g);
  }
  out["golden"] = golden;
  out["schedule"] = schedule_to_json(s.schedule);
  return out;
}

std::string trajectory_to_csv(const Trajectory& traj, int axis) {
  if (axis < 0 || axis >= traj.dim) throw std::domain_error("axis out of range");
  std::string out = "t";
  for (int j = 1; j <= traj.n_agents; ++j) out += ",x_" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_number(traj.times[i]);
    for (int j = 0; j < traj.n_agents; ++j)
      out += "," + format_number(traj.states[i](j, axis));
    out += "\n";
  }
  return out;
}

Json trajectory_to_json(const Trajectory& traj, bool include_steps) {
  Json out;
  out["n_agents"] = traj.n_agents;
  out["dim"] = traj.dim;
  out["times"] = traj.times;
  Json states = Json::array();
  for (const Matrix& x : traj.states) {
    Json rows = Json::array();
    for (int j = 0; j < x.rows(); ++j) {
      Json row = Json::array();
      for (int a = 0; a < x.cols(); ++a) row.push_back(x(j, a));
      rows.push_back(row);
    }
    states.push_back(rows);
  }
  out["states"] = states;
  if (include_steps) {
    Json steps = Json::array();
    for (const StepRecord& s : traj.steps) {
      Json sj;
      sj["t0"] = s.t_begin;
      sj["t1"] = s.t_end;
      auto mat = [](const Matrix& m) {
        Json rows = Json::array();
        for (int r = 0; r < m.rows(); ++r) {
          Json row = Json::array();
          for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
          rows.push_back(row);
        }
        return rows;
      };
      sj["generator"] = mat(s.generator);
      sj["propagator"] = mat(s.propagator);
      steps.push_back(sj);
    }
    out["steps"] = steps;
  }
  return out;
}

Json report_to_json(const ConditionReport& r) {
  Json out;
  out["condition"] = r.condition;
  out["verdict"] = verdict_name(r.verdict);
  out["horizon"] = r.horizon;
  Json params;
  for (const auto& [k, v] : r.params) params[k] = v;
  out["params"] = params;
  if (!r.metrics.empty()) {
    Json metrics;
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    out["metrics"] = metrics;
  }
  Json witnesses = Json::object();
  if (r.witness) {
    const Witness& w = *r.witness;
    if (w.pair_jk) witnesses["pair"] = {w.pair_jk->first + 1, w.pair_jk->second + 1};
    if (w.t) witnesses["t"] = *w.t;
    if (w.subset) witnesses["subset"] = int_array_1based(*w.subset);
    if (w.cell_index) witnesses["cell"] = *w.cell_index;
    if (w.lhs) witnesses["lhs"] = *w.lhs;
    if (w.rhs) witnesses["rhs"] = *w.rhs;
    if (!w.note.empty()) witnesses["note"] = w.note;
  }
  out["witnesses"] = witnesses;
  if (!r.reachable_nodes.empty()) out["reachable_nodes"] = int_array_1based(r.reachable_nodes);
  if (r.graph) out["graph"] = graph_to_json(*r.graph);
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

Json certify_to_json(const CertifyReport& r) {
  Json out;
  Json conditions = Json::array();
  for (const ConditionReport& c : r.conditions) conditions.push_back(report_to_json(c));
  out["conditions"] = conditions;
  out["certified_by"] = r.certified_by;
  return out;
}

Json diagnostics_to_json(const DiagnosticsReport& rep) {
  Json out;
  out["final_diameter"] = rep.final_diameter;
  Json verdict;
  switch (rep.verdict.kind) {
    case ConsensusVerdict::Kind::Reached:
      verdict["kind"] = "reached";
      verdict["t_reached"] = rep.verdict.t_reached;
      break;
    case ConsensusVerdict::Kind::NotReached:
      verdict["kind"] = "not-reached";
      verdict["lower_bound"] = rep.verdict.lower_bound;
      break;
    case ConsensusVerdict::Kind::Undetermined:
      verdict["kind"] = "undetermined";
      break;
  }
  verdict["tol"] = rep.verdict.tol;
  out["verdict"] = verdict;
  out["n_samples"] = rep.times.size();
  out["t_begin"] = rep.times.front();
  out["t_end"] = rep.times.back();
  Json violations = Json::array();
  for (const MonotonicityViolation& v : rep.violations) {
    Json vj;
    vj["index"] = v.index;
    vj["axis"] = v.axis + 1;
    vj["amount"] = v.amount;
    violations.push_back(vj);
  }
  out["monotonicity_violations"] = violations;
  return out;
}

std::string diagnostics_to_csv(const DiagnosticsReport& rep) {
  const int d = rep.max_per_axis.empty() ? 1 : static_cast<int>(rep.max_per_axis.front().size());
  std::string out = "t,diameter";
  if (d > 1)
    for (int a = 1; a <= d; ++a) out += ",spread_axis" + std::to_string(a);
  out += "\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    out += format_number(rep.times[i]) + "," + format_number(rep.diameter[i]);
    if (d > 1)
      for (int a = 0; a < d; ++a)
        out += "," + format_number(rep.max_per_axis[i](a) - rep.min_per_axis[i](a));
    out += "\n";
  }
  return out;
}

std::string graph_to_text(const DirectedGraph& g) {
  std::string out;
  for (const auto& [j, k] : g.arrows)
    out += std::to_string(j + 1) + " -> " + std::to_string(k + 1) + "\n";
  return out;
}

}  // namespace consensus
