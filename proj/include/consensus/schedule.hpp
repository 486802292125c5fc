#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "consensus/types.hpp"

namespace consensus {

// A connection rate profile a(t) on an interval, restricted to a small family
// of closed forms so that every window integral has an exact antiderivative.
// All shapes are clamped at zero where the analytic expression dips below it,
// which keeps rates nonnegative on any admissible interval.
//
//   Constant      c
//   Hyperbolic    c / (t - pole + offset)
//   InvSqrtLeft   1/sqrt(t - edge) - 1, integrable singularity at the left edge
//   InvCbrtRight  1/cbrt(edge - t) - 1, integrable singularity at the right edge
//   Zero          0
enum class SegmentKind { Zero, Constant, Hyperbolic, InvSqrtLeft, InvCbrtRight };

struct SegmentPrimitive {
  SegmentKind kind = SegmentKind::Zero;
  Scalar rate = 0.0;    // c for Constant / Hyperbolic
  Scalar pole = 0.0;    // pole for Hyperbolic, edge for InvSqrtLeft / InvCbrtRight
  Scalar offset = 0.0;  // Hyperbolic only

  static SegmentPrimitive zero();
  static SegmentPrimitive constant(Scalar c);
  static SegmentPrimitive hyperbolic(Scalar c, Scalar pole, Scalar offset);
  static SegmentPrimitive inv_sqrt_left(Scalar edge);
  static SegmentPrimitive inv_cbrt_right(Scalar edge);

  // Clamped value; nullopt at an integrable singularity (unbounded).
  std::optional<Scalar> value(Scalar t) const;
  // Antiderivative of the clamped value, continuous, exact in closed form.
  Scalar antiderivative(Scalar t) const;
  Scalar integral(Scalar a, Scalar b) const { return antiderivative(b) - antiderivative(a); }
  bool singular_at(Scalar t) const;
  // Same shape shifted so that value'(t) == value(t + dt).
  SegmentPrimitive translated(Scalar dt) const;
};

struct Piece {
  Scalar t_begin = 0.0;
  Scalar t_end = 0.0;  // +infinity allowed on a final piece
  SegmentPrimitive shape;
};

constexpr Scalar kTimeInfinity = std::numeric_limits<Scalar>::infinity();

// Piecewise-analytic rate function on [0, inf). Pieces tile a contiguous
// range [t_begin, t_end); the function is zero before the first piece and,
// unless a periodic extension or an unbounded final piece is present, zero
// after the last one. Immutable after construction; safe to share across
// threads.
class PiecewiseFunction {
 public:
  PiecewiseFunction() = default;  // identically zero

  static PiecewiseFunction zero();
  static PiecewiseFunction single(Scalar t0, Scalar t1, SegmentPrimitive shape);
  static PiecewiseFunction constant_on(Scalar t0, Scalar t1, Scalar c);
  // pieces must be sorted, contiguous and non-degenerate; period, when given,
  // must cover the pattern span and makes the pattern repeat forever.
  static PiecewiseFunction from_pieces(std::vector<Piece> pieces,
                                       std::optional<Scalar> period = std::nullopt);

  const std::vector<Piece>& pieces() const { return pieces_; }
  std::optional<Scalar> period() const { return period_; }
  bool is_zero() const { return pieces_.empty(); }
  bool is_periodic() const { return period_.has_value(); }
  bool has_unbounded_piece() const;
  // End of explicit support: +inf for periodic or unbounded-tail functions.
  Scalar support_end() const;

  std::optional<Scalar> value_at(Scalar t) const;
  Scalar integral(Scalar a, Scalar b) const;
  // Supremum of the clamped value over [a, b]; nullopt when unbounded there.
  std::optional<Scalar> sup_on(Scalar a, Scalar b) const;
  // Piece boundaries (periodic copies unfolded) intersected with [a, b].
  std::vector<Scalar> breakpoints_in(Scalar a, Scalar b) const;

  // g with g(t) = (*this)(t0 + t), so g.integral(a,b) == integral(t0+a, t0+b).
  PiecewiseFunction translated(Scalar t0) const;

 private:
  // Cumulative integral from 0 to x of the non-periodic pattern.
  Scalar pattern_cumulative(Scalar x) const;

  std::vector<Piece> pieces_;
  std::optional<Scalar> period_;
  Scalar pattern_mass_ = 0.0;  // one-period mass when periodic
};

// N x N grid of connection rates; entry(j, k) is the influence of agent k on
// agent j. Indices are 0-based in memory (1-based only in files and reports).
// Diagonal entries are identically zero.
class ConnectionSchedule {
 public:
  explicit ConnectionSchedule(int n_agents);

  int n_agents() const { return n_; }
  const PiecewiseFunction& entry(int j, int k) const;
  void set_entry(int j, int k, PiecewiseFunction f);

  Scalar window_mass(int j, int k, Scalar a, Scalar b) const {
    return entry(j, k).integral(a, b);
  }
  // Union of entry breakpoints in [a, b], sorted and deduplicated.
  std::vector<Scalar> breakpoints_in(Scalar a, Scalar b) const;
  // Largest explicit support end over all entries (+inf if any entry is
  // periodic or has an unbounded tail).
  Scalar support_end() const;

 private:
  int n_ = 0;
  std::vector<PiecewiseFunction> entries_;
};

// Monotone time substitutions rho with rho(0) = 0, closed under the exact
// per-segment transforms the primitive family supports.
struct TimeMap {
  enum class Kind { Affine, ExpMinusOne } kind = Kind::Affine;
  Scalar slope = 1.0;  // Affine: rho(t) = slope * t

  static TimeMap identity() { return {Kind::Affine, 1.0}; }
  static TimeMap affine(Scalar slope);
  static TimeMap exp_minus_one() { return {Kind::ExpMinusOne, 1.0}; }

  Scalar apply(Scalar t) const;
  Scalar inverse(Scalar u) const;
  Scalar derivative(Scalar t) const;
};

// b(t) = f(rho(t)) * rho'(t); throws std::domain_error when a segment has no
// exact image inside the primitive family.
PiecewiseFunction time_rescale(const PiecewiseFunction& f, const TimeMap& rho);
ConnectionSchedule time_rescale(const ConnectionSchedule& schedule, const TimeMap& rho);

}  // namespace consensus
