#pragma once

#include <vector>

#include "consensus/schedule.hpp"
#include "consensus/types.hpp"

namespace consensus {

// Positions of all agents at one time; one row per agent, one column per
// coordinate axis (d >= 1).
struct AgentState {
  Scalar t = 0.0;
  Matrix positions;  // N x d

  static AgentState scalar(Scalar t, const Vector& x);
  int n_agents() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

struct StepRecord {
  Scalar t_begin = 0.0;
  Scalar t_end = 0.0;
  Matrix generator;   // integrated Laplacian over the step
  Matrix propagator;  // exp(generator), row-stochastic and nonnegative
};

struct Trajectory {
  int n_agents = 0;
  int dim = 1;
  std::vector<Scalar> times;
  std::vector<Matrix> states;  // N x d each, aligned with times
  std::vector<StepRecord> steps;

  const Matrix& initial_state() const { return states.front(); }
  const Matrix& final_state() const { return states.back(); }
  Scalar t_begin() const { return times.front(); }
  Scalar t_end() const { return times.back(); }
  // Linear interpolation between recorded states; exact at recorded times.
  Matrix state_at(Scalar t) const;
  // Index of a recorded time within tol of t, or -1.
  int index_at(Scalar t, Scalar tol = 1e-9) const;
};

struct SimConfig {
  Scalar max_step = 0.05;
  int record_stride = 1;
  bool keep_step_log = true;
  // Steps are bisected until the integrated out-degree of every agent stays
  // below this cap, which keeps the exponential well-conditioned.
  Scalar generator_row_cap = 2.0;
  // Steps always stop at schedule breakpoints; the flag exists for the
  // record and must stay true.
  bool align_breakpoints = true;
};

// Integrated Laplacian: off-diagonal (j,k) holds the window mass of entry
// (j,k) over [s, s+h]; rows sum to zero.
Matrix generator_integral(const ConnectionSchedule& schedule, Scalar s, Scalar h);

// exp of a zero-row-sum Metzler matrix, nonnegative by construction
// (uniformization plus scaling and squaring).
Matrix stochastic_exp(const Matrix& generator);

// One-step flow map over [s, s+h].
Matrix propagator(const ConnectionSchedule& schedule, Scalar s, Scalar h);

// Evolves x0 to t_end under xdot_j = sum_k a_jk(t) (x_k - x_j), applying the
// same scalar propagators to every coordinate axis. Exact on intervals where
// the active rates are constant; first-order Magnus elsewhere (local error
// O(h^3), controlled by max_step).
Trajectory simulate(const ConnectionSchedule& schedule, const AgentState& x0, Scalar t_end,
                    const SimConfig& cfg = {});

}  // namespace consensus
