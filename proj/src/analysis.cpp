#include "consensus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace consensus {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

DiagnosticsReport diagnose(const Trajectory& traj, Scalar tol,
                           std::optional<Scalar> diameter_lower_bound, Scalar extremal_band,
                           Scalar slack) {
  require(!traj.times.empty(), "empty trajectory");
  require(tol > 0.0, "tolerance must be positive");

  DiagnosticsReport rep;
  rep.times = traj.times;
  const int d = traj.dim;
  const int n = traj.n_agents;

  for (const Matrix& x : traj.states) {
    Vector mx = x.colwise().maxCoeff();
    Vector mn = x.colwise().minCoeff();
    rep.diameter.push_back((mx - mn).maxCoeff());
    std::vector<int> upper, lower;
    for (int j = 0; j < n; ++j) {
      if (x(j, 0) >= mx(0) - extremal_band) upper.push_back(j);
      if (x(j, 0) <= mn(0) + extremal_band) lower.push_back(j);
    }
    rep.upper_set.push_back(std::move(upper));
    rep.lower_set.push_back(std::move(lower));
    rep.max_per_axis.push_back(std::move(mx));
    rep.min_per_axis.push_back(std::move(mn));
  }
  rep.final_diameter = rep.diameter.back();

  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      const Scalar up = rep.max_per_axis[i](a) - rep.max_per_axis[i - 1](a);
      if (up > slack) rep.violations.push_back({i, a, up});
      const Scalar down = rep.min_per_axis[i - 1](a) - rep.min_per_axis[i](a);
      if (down > slack) rep.violations.push_back({i, a, down});
    }
  }

  rep.verdict.tol = tol;
  if (rep.final_diameter < tol) {
    rep.verdict.kind = ConsensusVerdict::Kind::Reached;
    for (std::size_t i = 0; i < rep.diameter.size(); ++i) {
      if (rep.diameter[i] < tol) {
        rep.verdict.t_reached = rep.times[i];
        break;
      }
    }
  } else if (diameter_lower_bound && *diameter_lower_bound > tol &&
             rep.final_diameter + 1e-12 >= *diameter_lower_bound) {
    rep.verdict.kind = ConsensusVerdict::Kind::NotReached;
    rep.verdict.lower_bound = *diameter_lower_bound;
  } else {
    rep.verdict.kind = ConsensusVerdict::Kind::Undetermined;
  }
  return rep;
}

Trajectory project(const Trajectory& traj, const Vector& v) {
  require(v.size() == traj.dim, "direction dimension mismatch");
  require(v.norm() > 0.0, "direction must be nonzero");

  Trajectory out;
  out.n_agents = traj.n_agents;
  out.dim = 1;
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  for (const Matrix& x : traj.states) out.states.push_back(x * v);
  out.steps = traj.steps;  // same scalar propagators drive every projection
  return out;
}

Trajectory simulate_nonlinear(const ConnectionSchedule& schedule, const NonlinearInteraction& phi,
                              const AgentState& x0, Scalar t_end, const SimConfig& cfg) {
  require(static_cast<bool>(phi.phi), "phi must be callable");
  require(x0.dim() == 1, "nonlinear probe runs in one dimension");
  require(x0.n_agents() == schedule.n_agents(), "state/schedule dimension mismatch");
  require(t_end > x0.t, "t_end must exceed the initial time");

  const int n = schedule.n_agents();
  const std::vector<Scalar> bps = schedule.breakpoints_in(x0.t, t_end);

  Trajectory traj;
  traj.n_agents = n;
  traj.dim = 1;
  traj.times.push_back(x0.t);
  traj.states.push_back(x0.positions);

  auto weighted_generator = [&](Scalar s, Scalar h, const Vector& frozen) {
    Matrix omega = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      Scalar row = 0.0;
      for (int k = 0; k < n; ++k) {
        if (j == k) continue;
        const Scalar w = phi.phi(frozen(k) - frozen(j));
        require(w >= 0.0, "phi must be nonnegative");
        const Scalar m = schedule.window_mass(j, k, s, s + h) * w;
        omega(j, k) = m;
        row += m;
      }
      omega(j, j) = -row;
    }
    return omega;
  };

  Vector x = x0.positions.col(0);
  Scalar t = x0.t;
  std::size_t bp_idx = 0;
  while (t < t_end - 1e-12) {
    while (bp_idx < bps.size() && bps[bp_idx] <= t + 1e-12) ++bp_idx;
    Scalar target = std::min(t + cfg.max_step, t_end);
    if (bp_idx < bps.size() && bps[bp_idx] < target) target = bps[bp_idx];
    const Scalar h = target - t;

    // Midpoint predictor with phi frozen at the current state.
    const Vector half = stochastic_exp(weighted_generator(t, 0.5 * h, x)) * x;
    const Matrix omega = weighted_generator(t, h, half);
    const Matrix p = stochastic_exp(omega);
    x = p * x;
    if (!x.allFinite()) throw std::runtime_error("nonlinear probe: state became non-finite");

    if (cfg.keep_step_log) traj.steps.push_back(StepRecord{t, target, omega, p});
    t = target;
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

LinearizationResult linearize_nonlinear(const ConnectionSchedule& schedule,
                                        const NonlinearInteraction& phi, const Trajectory& traj) {
  require(static_cast<bool>(phi.phi), "phi must be callable");
  require(traj.n_agents == schedule.n_agents(), "trajectory/schedule dimension mismatch");
  require(traj.dim == 1, "linearization runs in one dimension");
  require(traj.times.size() >= 3, "need at least three recorded states");

  const int n = traj.n_agents;
  LinearizationResult out;
  for (std::size_t i = 1; i + 1 < traj.times.size(); ++i) {
    const Scalar t = traj.times[i];
    const Vector& x = traj.states[i];
    Matrix rates = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (j == k) continue;
        const auto a = schedule.entry(j, k).value_at(t);
        if (!a) continue;  // singular sample point carries no usable rate
        const Scalar w = phi.phi(x(k) - x(j));
        rates(j, k) = *a * w;
        if (*a > 0.0) {
          const Scalar cap = *a * phi.sup_norm;
          out.max_rate_ratio = std::max(out.max_rate_ratio, cap > 0.0 ? rates(j, k) / cap : 0.0);
          if (rates(j, k) > cap + 1e-12) out.bound_satisfied = false;
        }
      }
    }

    // Central-difference defect of the linear system with these rates.
    const Vector xdot =
        (traj.states[i + 1] - traj.states[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
    Vector model = Vector::Zero(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (j != k) model(j) += rates(j, k) * (x(k) - x(j));
    const Scalar res = (xdot - model).lpNorm<Eigen::Infinity>();

    out.times.push_back(t);
    out.effective_rates.push_back(std::move(rates));
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

}  // namespace consensus
