#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "consensus/dynamics.hpp"
#include "consensus/schedule.hpp"
#include "consensus/types.hpp"

namespace consensus {

// "Reached" is a finite-time statement made safe by contraction: once the
// diameter is below tol it can never grow again. "Not reached" needs an
// analytic lower bound supplied by the scenario; simulation alone cannot
// prove non-consensus.
struct ConsensusVerdict {
  enum class Kind { Reached, NotReached, Undetermined } kind = Kind::Undetermined;
  Scalar tol = 0.0;
  Scalar t_reached = 0.0;     // first recorded time below tol
  Scalar lower_bound = 0.0;   // certified bound when NotReached
};

struct MonotonicityViolation {
  std::size_t index = 0;  // recorded state where the extreme moved the wrong way
  int axis = 0;
  Scalar amount = 0.0;
};

struct DiagnosticsReport {
  std::vector<Scalar> times;
  std::vector<Scalar> diameter;          // max over axes of per-axis spread
  std::vector<Vector> max_per_axis;      // one length-d vector per time
  std::vector<Vector> min_per_axis;
  std::vector<std::vector<int>> upper_set;  // agents within band of the max (axis 0)
  std::vector<std::vector<int>> lower_set;
  std::vector<MonotonicityViolation> violations;  // empty for propagated flows
  ConsensusVerdict verdict;
  Scalar final_diameter = 0.0;
};

DiagnosticsReport diagnose(const Trajectory& traj, Scalar tol,
                           std::optional<Scalar> diameter_lower_bound = std::nullopt,
                           Scalar extremal_band = 1e-10, Scalar slack = 1e-12);

// Scalar trajectory y_j = x_j . v; solves the same dynamics with projected
// initial data, so it reuses the recorded propagators unchanged.
Trajectory project(const Trajectory& traj, const Vector& v);

// State-dependent interaction strength phi applied on top of a schedule.
struct NonlinearInteraction {
  std::function<Scalar(Scalar)> phi;
  Scalar sup_norm = 1.0;    // declared bound on phi over the relevant range
  Scalar lipschitz = 0.0;
};

// Companion integrator for xdot_j = sum_k a_jk(t) phi(x_k - x_j)(x_k - x_j):
// midpoint predictor with phi frozen per sub-step, propagated exponentially
// so contraction still holds step by step. A probe, not a certified solver.
Trajectory simulate_nonlinear(const ConnectionSchedule& schedule, const NonlinearInteraction& phi,
                              const AgentState& x0, Scalar t_end, const SimConfig& cfg = {});

// Effective rates a_jk(t) phi(x_k(t) - x_j(t)) sampled along a nonlinear
// trajectory, with the defect of the linear system they should solve,
// measured by central differences at interior recorded times.
struct LinearizationResult {
  std::vector<Scalar> times;
  std::vector<Matrix> effective_rates;  // N x N per sample; zero diagonal
  std::vector<Scalar> residuals;
  Scalar max_residual = 0.0;
  Scalar max_rate_ratio = 0.0;  // max over samples of rate / (a_jk * sup_norm)
  bool bound_satisfied = true;
};

LinearizationResult linearize_nonlinear(const ConnectionSchedule& schedule,
                                        const NonlinearInteraction& phi, const Trajectory& traj);

}  // namespace consensus
