#include "consensus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace consensus {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

constexpr Scalar kTimeSnap = 1e-12;

}  // namespace

AgentState AgentState::scalar(Scalar t, const Vector& x) {
  AgentState s;
  s.t = t;
  s.positions = x;
  return s;
}

Matrix Trajectory::state_at(Scalar t) const {
  require(!times.empty(), "empty trajectory");
  require(t >= times.front() - 1e-12 && t <= times.back() + 1e-12,
          "time outside the recorded range");
  const int i = index_at(t);
  if (i >= 0) return states[static_cast<std::size_t>(i)];
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const Scalar w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * states[lo] + w * states[hi];
}

int Trajectory::index_at(Scalar t, Scalar tol) const {
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end()) return -1;
  if (std::abs(*it - t) <= tol) return static_cast<int>(it - times.begin());
  return -1;
}

Matrix generator_integral(const ConnectionSchedule& schedule, Scalar s, Scalar h) {
  require(h > 0.0 && std::isfinite(h), "step length must be positive");
  const int n = schedule.n_agents();
  Matrix omega = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Scalar row = 0.0;
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const Scalar m = schedule.window_mass(j, k, s, s + h);
      omega(j, k) = m;
      row += m;
    }
    omega(j, j) = -row;
  }
  return omega;
}

Matrix stochastic_exp(const Matrix& generator) {
  const int n = static_cast<int>(generator.rows());
  require(generator.cols() == n, "generator must be square");

  // Shift by the largest diagonal magnitude so the series has only
  // nonnegative terms, then scale and square.
  Scalar shift = 0.0;
  for (int j = 0; j < n; ++j) shift = std::max(shift, -generator(j, j));
  if (shift == 0.0) return Matrix::Identity(n, n);

  int squarings = 0;
  Scalar scaled = shift;
  while (scaled > 0.5) {
    scaled *= 0.5;
    ++squarings;
  }
  const Scalar inv = std::ldexp(1.0, -squarings);
  Matrix b = generator * inv;
  for (int j = 0; j < n; ++j) b(j, j) += scaled;

  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = (term * b) / static_cast<Scalar>(k);
    sum += term;
    if (term.lpNorm<Eigen::Infinity>() < 1e-20) break;
  }
  Matrix p = std::exp(-scaled) * sum;
  for (int i = 0; i < squarings; ++i) p = p * p;
  return p;
}

Matrix propagator(const ConnectionSchedule& schedule, Scalar s, Scalar h) {
  require(s >= 0.0, "step start must be nonnegative");
  return stochastic_exp(generator_integral(schedule, s, h));
}

Trajectory simulate(const ConnectionSchedule& schedule, const AgentState& x0, Scalar t_end,
                    const SimConfig& cfg) {
  require(cfg.max_step > 0.0, "max_step must be positive");
  require(cfg.record_stride >= 1, "record_stride must be >= 1");
  require(cfg.align_breakpoints, "breakpoint alignment is mandatory");
  require(x0.n_agents() == schedule.n_agents(), "state/schedule dimension mismatch");
  require(x0.dim() >= 1, "state needs at least one coordinate axis");
  require(t_end > x0.t, "t_end must exceed the initial time");
  require(x0.positions.allFinite(), "initial state must be finite");

  const std::vector<Scalar> bps = schedule.breakpoints_in(x0.t, t_end);

  Trajectory traj;
  traj.n_agents = x0.n_agents();
  traj.dim = x0.dim();
  traj.times.push_back(x0.t);
  traj.states.push_back(x0.positions);

  Matrix x = x0.positions;
  Scalar t = x0.t;
  std::size_t bp_idx = 0;
  long step_count = 0;

  while (t < t_end - kTimeSnap) {
    while (bp_idx < bps.size() && bps[bp_idx] <= t + kTimeSnap) ++bp_idx;
    const Scalar step_start = t;
    Scalar target = std::min(t + cfg.max_step, t_end);
    if (bp_idx < bps.size() && bps[bp_idx] < target) target = bps[bp_idx];

    Matrix omega = generator_integral(schedule, step_start, target - step_start);
    // Halve until the integrated out-degree per agent is below the cap.
    while (-omega.diagonal().minCoeff() > cfg.generator_row_cap) {
      target = step_start + 0.5 * (target - step_start);
      omega = generator_integral(schedule, step_start, target - step_start);
    }

    const Matrix p = stochastic_exp(omega);
    x = p * x;
    if (!x.allFinite()) throw std::runtime_error("simulate: state became non-finite");

    // Land exactly on breakpoints and on the horizon.
    if (bp_idx < bps.size() && std::abs(target - bps[bp_idx]) <= kTimeSnap) target = bps[bp_idx];
    if (std::abs(target - t_end) <= kTimeSnap) target = t_end;
    t = target;
    ++step_count;

    const bool record = (step_count % cfg.record_stride == 0) || t >= t_end - kTimeSnap ||
                        (bp_idx < bps.size() && t == bps[bp_idx]);
    if (record) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
    if (cfg.keep_step_log) {
      traj.steps.push_back(StepRecord{step_start, t, std::move(omega), p});
    }
  }
  return traj;
}

}  // namespace consensus
