#include "consensus/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace consensus {

namespace {

constexpr Scalar kSingularSnap = 0.0;  // exact hit only

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

SegmentPrimitive SegmentPrimitive::zero() { return {}; }

SegmentPrimitive SegmentPrimitive::constant(Scalar c) {
  require(std::isfinite(c) && c >= 0.0, "constant segment needs a nonnegative rate");
  SegmentPrimitive p;
  p.kind = c == 0.0 ? SegmentKind::Zero : SegmentKind::Constant;
  p.rate = c;
  return p;
}

SegmentPrimitive SegmentPrimitive::hyperbolic(Scalar c, Scalar pole, Scalar offset) {
  require(std::isfinite(c) && c >= 0.0, "hyperbolic segment needs a nonnegative rate");
  require(std::isfinite(pole) && std::isfinite(offset), "hyperbolic parameters must be finite");
  SegmentPrimitive p;
  p.kind = SegmentKind::Hyperbolic;
  p.rate = c;
  p.pole = pole;
  p.offset = offset;
  return p;
}

SegmentPrimitive SegmentPrimitive::inv_sqrt_left(Scalar edge) {
  require(std::isfinite(edge), "inv_sqrt_left edge must be finite");
  SegmentPrimitive p;
  p.kind = SegmentKind::InvSqrtLeft;
  p.pole = edge;
  return p;
}

SegmentPrimitive SegmentPrimitive::inv_cbrt_right(Scalar edge) {
  require(std::isfinite(edge), "inv_cbrt_right edge must be finite");
  SegmentPrimitive p;
  p.kind = SegmentKind::InvCbrtRight;
  p.pole = edge;
  return p;
}

bool SegmentPrimitive::singular_at(Scalar t) const {
  switch (kind) {
    case SegmentKind::InvSqrtLeft:
      return t - pole <= kSingularSnap && t >= pole;
    case SegmentKind::InvCbrtRight:
      return pole - t <= kSingularSnap && t <= pole;
    default:
      return false;
  }
}

std::optional<Scalar> SegmentPrimitive::value(Scalar t) const {
  switch (kind) {
    case SegmentKind::Zero:
      return 0.0;
    case SegmentKind::Constant:
      return rate;
    case SegmentKind::Hyperbolic: {
      const Scalar den = t - pole + offset;
      require(den > 0.0, "hyperbolic segment evaluated at or beyond its pole");
      return rate / den;
    }
    case SegmentKind::InvSqrtLeft: {
      const Scalar u = t - pole;
      require(u >= 0.0, "inv_sqrt_left evaluated left of its edge");
      if (u == 0.0) return std::nullopt;
      return std::max(0.0, 1.0 / std::sqrt(u) - 1.0);
    }
    case SegmentKind::InvCbrtRight: {
      const Scalar v = pole - t;
      require(v >= 0.0, "inv_cbrt_right evaluated right of its edge");
      if (v == 0.0) return std::nullopt;
      return std::max(0.0, 1.0 / std::cbrt(v) - 1.0);
    }
  }
  return 0.0;
}

Scalar SegmentPrimitive::antiderivative(Scalar t) const {
  switch (kind) {
    case SegmentKind::Zero:
      return 0.0;
    case SegmentKind::Constant:
      return rate * t;
    case SegmentKind::Hyperbolic: {
      const Scalar den = t - pole + offset;
      require(den > 0.0, "hyperbolic antiderivative evaluated at or beyond its pole");
      return rate * std::log(den);
    }
    case SegmentKind::InvSqrtLeft: {
      // integral of max(0, 1/sqrt(u) - 1): 2*sqrt(u) - u on [0,1], then flat.
      const Scalar u = t - pole;
      if (u <= 0.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return 2.0 * std::sqrt(u) - u;
    }
    case SegmentKind::InvCbrtRight: {
      // integral of max(0, 1/cbrt(v) - 1) with v = edge - t, flat left of v=1.
      const Scalar v = pole - t;
      if (v >= 1.0) return -0.5;
      if (v <= 0.0) return 0.0;
      return v - 1.5 * std::cbrt(v * v);
    }
  }
  return 0.0;
}

SegmentPrimitive SegmentPrimitive::translated(Scalar dt) const {
  SegmentPrimitive p = *this;
  switch (kind) {
    case SegmentKind::Zero:
    case SegmentKind::Constant:
      break;
    case SegmentKind::Hyperbolic:
    case SegmentKind::InvSqrtLeft:
    case SegmentKind::InvCbrtRight:
      p.pole -= dt;
      break;
  }
  return p;
}

namespace {

void validate_piece(const Piece& piece) {
  require(std::isfinite(piece.t_begin) && piece.t_begin >= 0.0,
          "piece must start at a finite nonnegative time");
  require(piece.t_end > piece.t_begin, "piece must have positive length");
  switch (piece.shape.kind) {
    case SegmentKind::Hyperbolic:
      require(piece.t_begin - piece.shape.pole + piece.shape.offset > 0.0,
              "hyperbolic piece overlaps its pole");
      break;
    case SegmentKind::InvSqrtLeft:
      require(piece.t_begin >= piece.shape.pole, "inv_sqrt_left piece starts left of its edge");
      require(std::isfinite(piece.t_end), "inv_sqrt_left piece must be bounded");
      break;
    case SegmentKind::InvCbrtRight:
      require(std::isfinite(piece.t_end) && piece.t_end <= piece.shape.pole,
              "inv_cbrt_right piece ends right of its edge");
      break;
    default:
      break;
  }
}

}  // namespace

PiecewiseFunction PiecewiseFunction::zero() { return {}; }

PiecewiseFunction PiecewiseFunction::single(Scalar t0, Scalar t1, SegmentPrimitive shape) {
  return from_pieces({Piece{t0, t1, shape}});
}

PiecewiseFunction PiecewiseFunction::constant_on(Scalar t0, Scalar t1, Scalar c) {
  if (c == 0.0) return zero();
  return single(t0, t1, SegmentPrimitive::constant(c));
}

PiecewiseFunction PiecewiseFunction::from_pieces(std::vector<Piece> pieces,
                                                 std::optional<Scalar> period) {
  // Drop zero pieces: the gaps they would fill are implicit.
  std::erase_if(pieces, [](const Piece& p) { return p.shape.kind == SegmentKind::Zero; });
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.t_begin < b.t_begin; });
  for (const Piece& p : pieces) validate_piece(p);
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    require(pieces[i].t_begin >= pieces[i - 1].t_end, "pieces overlap");
    require(std::isfinite(pieces[i - 1].t_end), "only the final piece may be unbounded");
  }

  PiecewiseFunction f;
  f.pieces_ = std::move(pieces);
  if (period) {
    require(*period > 0.0 && std::isfinite(*period), "period must be positive and finite");
    require(!f.pieces_.empty(), "periodic extension of an empty pattern");
    require(std::isfinite(f.pieces_.back().t_end), "periodic pattern must be bounded");
    require(f.pieces_.back().t_end - f.pieces_.front().t_begin <= *period + 1e-12,
            "pattern longer than its period");
    f.period_ = period;
    f.pattern_mass_ = 0.0;
    for (const Piece& p : f.pieces_) f.pattern_mass_ += p.shape.integral(p.t_begin, p.t_end);
  }
  return f;
}

bool PiecewiseFunction::has_unbounded_piece() const {
  return !pieces_.empty() && !std::isfinite(pieces_.back().t_end);
}

Scalar PiecewiseFunction::support_end() const {
  if (pieces_.empty()) return 0.0;
  if (period_ || has_unbounded_piece()) return kTimeInfinity;
  return pieces_.back().t_end;
}

std::optional<Scalar> PiecewiseFunction::value_at(Scalar t) const {
  require(t >= 0.0 && std::isfinite(t), "time must be finite and nonnegative");
  if (pieces_.empty()) return 0.0;
  Scalar tt = t;
  const Scalar base = pieces_.front().t_begin;
  if (period_ && t >= base) {
    tt = base + std::fmod(t - base, *period_);
  }
  for (const Piece& p : pieces_) {
    if (tt >= p.t_begin && tt < p.t_end) {
      if (p.shape.singular_at(tt)) return std::nullopt;
      return p.shape.value(tt);
    }
  }
  // Right endpoint of the final piece belongs to it (then zero onward).
  const Piece& last = pieces_.back();
  if (tt == last.t_end) {
    if (last.shape.singular_at(tt)) return std::nullopt;
    return last.shape.value(tt);
  }
  return 0.0;
}

Scalar PiecewiseFunction::pattern_cumulative(Scalar x) const {
  Scalar total = 0.0;
  for (const Piece& p : pieces_) {
    if (x <= p.t_begin) break;
    const Scalar hi = std::min(x, p.t_end);
    total += p.shape.integral(p.t_begin, hi);
  }
  return total;
}

Scalar PiecewiseFunction::integral(Scalar a, Scalar b) const {
  require(a >= 0.0 && std::isfinite(a), "window start must be finite and nonnegative");
  require(std::isfinite(b) && b >= a, "window must satisfy a <= b < inf");
  if (pieces_.empty() || a == b) return 0.0;
  if (!period_) return pattern_cumulative(b) - pattern_cumulative(a);

  const Scalar base = pieces_.front().t_begin;
  const Scalar P = *period_;
  auto cumulative = [&](Scalar x) -> Scalar {
    if (x <= base) return 0.0;
    const Scalar r = std::fmod(x - base, P);
    const Scalar k = std::round((x - base - r) / P);
    return k * pattern_mass_ + pattern_cumulative(base + r);
  };
  return cumulative(b) - cumulative(a);
}

std::optional<Scalar> PiecewiseFunction::sup_on(Scalar a, Scalar b) const {
  require(a >= 0.0 && b >= a, "bad window");
  Scalar sup = 0.0;
  for (const Piece& p : pieces_) {
    // For periodic functions take the sup over the whole pattern, a (tight
    // enough) upper bound for any window.
    Scalar lo = p.t_begin, hi = p.t_end;
    if (!period_) {
      lo = std::max(p.t_begin, a);
      hi = std::min(p.t_end, b);
      if (lo >= hi) continue;
    }
    switch (p.shape.kind) {
      case SegmentKind::Zero:
        break;
      case SegmentKind::Constant:
        sup = std::max(sup, p.shape.rate);
        break;
      case SegmentKind::Hyperbolic:
        sup = std::max(sup, *p.shape.value(lo));  // decreasing in t
        break;
      case SegmentKind::InvSqrtLeft:
        if (lo <= p.shape.pole) return std::nullopt;
        sup = std::max(sup, *p.shape.value(lo));
        break;
      case SegmentKind::InvCbrtRight:
        if (hi >= p.shape.pole) return std::nullopt;
        sup = std::max(sup, *p.shape.value(hi));
        break;
    }
  }
  return sup;
}

std::vector<Scalar> PiecewiseFunction::breakpoints_in(Scalar a, Scalar b) const {
  std::vector<Scalar> out;
  if (pieces_.empty()) return out;
  auto push = [&](Scalar t) {
    if (t >= a && t <= b && std::isfinite(t)) out.push_back(t);
  };
  if (!period_) {
    for (const Piece& p : pieces_) {
      push(p.t_begin);
      push(p.t_end);
    }
    return out;
  }
  const Scalar base = pieces_.front().t_begin;
  const Scalar P = *period_;
  Scalar k0 = std::floor((a - base) / P) - 1.0;
  if (k0 < 0.0) k0 = 0.0;
  for (Scalar k = k0; base + k * P <= b; k += 1.0) {
    const Scalar shift = k * P;
    for (const Piece& p : pieces_) {
      push(p.t_begin + shift);
      push(p.t_end + shift);
    }
  }
  return out;
}

PiecewiseFunction PiecewiseFunction::translated(Scalar t0) const {
  require(t0 >= 0.0 && std::isfinite(t0), "translation must be finite and nonnegative");
  if (t0 == 0.0 || pieces_.empty()) return *this;

  auto shift_clip = [&](const Piece& p, Scalar cut_lo) -> std::optional<Piece> {
    const Scalar lo = std::max(p.t_begin, cut_lo);
    if (p.t_end <= lo) return std::nullopt;
    Piece q;
    q.t_begin = lo - t0;
    q.t_end = std::isfinite(p.t_end) ? p.t_end - t0 : kTimeInfinity;
    q.shape = p.shape.translated(t0);
    return q;
  };

  if (!period_) {
    std::vector<Piece> shifted;
    for (const Piece& p : pieces_) {
      if (auto q = shift_clip(p, t0)) shifted.push_back(*q);
    }
    return from_pieces(std::move(shifted));
  }

  const Scalar base = pieces_.front().t_begin;
  const Scalar P = *period_;
  if (t0 <= base) {
    std::vector<Piece> shifted;
    for (const Piece& p : pieces_) {
      Piece q{p.t_begin - t0, p.t_end - t0, p.shape.translated(t0)};
      shifted.push_back(q);
    }
    return from_pieces(std::move(shifted), P);
  }
  // Rotate the pattern so the fold of t0 becomes the new origin.
  const Scalar r = std::fmod(t0 - base, P);
  std::vector<Piece> rotated;
  for (const Piece& p : pieces_) {
    // Part of the piece at or after the cut lands at the front of the cycle.
    const Scalar cut = base + r;
    if (p.t_end > cut) {
      const Scalar lo = std::max(p.t_begin, cut);
      rotated.push_back(Piece{lo - cut, p.t_end - cut, p.shape.translated(cut)});
    }
    if (p.t_begin < cut) {
      const Scalar hi = std::min(p.t_end, cut);
      const Scalar shift = cut - P;  // moved one period forward
      rotated.push_back(Piece{p.t_begin - shift, hi - shift, p.shape.translated(shift)});
    }
  }
  return from_pieces(std::move(rotated), P);
}

ConnectionSchedule::ConnectionSchedule(int n_agents) : n_(n_agents) {
  require(n_agents >= 1, "schedule needs at least one agent");
  entries_.resize(static_cast<std::size_t>(n_) * n_);
}

const PiecewiseFunction& ConnectionSchedule::entry(int j, int k) const {
  require(j >= 0 && j < n_ && k >= 0 && k < n_, "entry index out of range");
  return entries_[static_cast<std::size_t>(j) * n_ + k];
}

void ConnectionSchedule::set_entry(int j, int k, PiecewiseFunction f) {
  require(j >= 0 && j < n_ && k >= 0 && k < n_, "entry index out of range");
  require(j != k || f.is_zero(), "diagonal entries are identically zero");
  entries_[static_cast<std::size_t>(j) * n_ + k] = std::move(f);
}

std::vector<Scalar> ConnectionSchedule::breakpoints_in(Scalar a, Scalar b) const {
  std::vector<Scalar> out;
  for (const PiecewiseFunction& f : entries_) {
    auto bs = f.breakpoints_in(a, b);
    out.insert(out.end(), bs.begin(), bs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](Scalar x, Scalar y) { return std::abs(x - y) < 1e-12; }),
            out.end());
  return out;
}

Scalar ConnectionSchedule::support_end() const {
  // Zero entries are defined everywhere and never constrain sampling.
  Scalar end = 0.0;
  bool any = false;
  for (const PiecewiseFunction& f : entries_) {
    if (f.is_zero()) continue;
    any = true;
    end = std::max(end, f.support_end());
  }
  return any ? end : kTimeInfinity;
}

TimeMap TimeMap::affine(Scalar slope) {
  if (!(slope > 0.0) || !std::isfinite(slope))
    throw std::domain_error("time map must be increasing");
  return {Kind::Affine, slope};
}

Scalar TimeMap::apply(Scalar t) const {
  return kind == Kind::Affine ? slope * t : std::expm1(t);
}

Scalar TimeMap::inverse(Scalar u) const {
  return kind == Kind::Affine ? u / slope : std::log1p(u);
}

Scalar TimeMap::derivative(Scalar t) const {
  return kind == Kind::Affine ? slope : std::exp(t);
}

namespace {

// Exact image of one piece under b(t) = f(rho(t)) rho'(t), when it exists.
Piece rescale_piece(const Piece& p, const TimeMap& rho) {
  Piece q;
  q.t_begin = rho.inverse(p.t_begin);
  q.t_end = std::isfinite(p.t_end) ? rho.inverse(p.t_end) : kTimeInfinity;
  const SegmentPrimitive& s = p.shape;
  if (rho.kind == TimeMap::Kind::Affine) {
    const Scalar al = rho.slope;
    switch (s.kind) {
      case SegmentKind::Zero:
        q.shape = SegmentPrimitive::zero();
        return q;
      case SegmentKind::Constant:
        q.shape = SegmentPrimitive::constant(s.rate * al);
        return q;
      case SegmentKind::Hyperbolic:
        // c/(al*t - pole + offset) * al == c/(t - (pole - offset)/al)
        q.shape = SegmentPrimitive::hyperbolic(s.rate, (s.pole - s.offset) / al, 0.0);
        return q;
      case SegmentKind::InvSqrtLeft:
      case SegmentKind::InvCbrtRight:
        if (al == 1.0) {
          q.shape = s;
          return q;
        }
        break;
    }
  } else {
    // rho(t) = e^t - 1
    if (s.kind == SegmentKind::Zero) {
      q.shape = SegmentPrimitive::zero();
      return q;
    }
    if (s.kind == SegmentKind::Hyperbolic && std::abs(s.offset - s.pole - 1.0) < 1e-15) {
      // c/(rho(t) + 1) * e^t == c
      q.shape = SegmentPrimitive::constant(s.rate);
      return q;
    }
  }
  throw std::domain_error("time_rescale: segment has no exact image in the primitive family");
}

}  // namespace

PiecewiseFunction time_rescale(const PiecewiseFunction& f, const TimeMap& rho) {
  if (f.is_zero()) return f;
  if (f.is_periodic() && !(rho.kind == TimeMap::Kind::Affine))
    throw std::domain_error("time_rescale: nonlinear map breaks periodicity");
  std::vector<Piece> out;
  out.reserve(f.pieces().size());
  for (const Piece& p : f.pieces()) out.push_back(rescale_piece(p, rho));
  std::optional<Scalar> period;
  if (f.period()) period = *f.period() / rho.slope;
  return PiecewiseFunction::from_pieces(std::move(out), period);
}

ConnectionSchedule time_rescale(const ConnectionSchedule& schedule, const TimeMap& rho) {
  ConnectionSchedule out(schedule.n_agents());
  for (int j = 0; j < schedule.n_agents(); ++j)
    for (int k = 0; k < schedule.n_agents(); ++k)
      if (j != k) out.set_entry(j, k, time_rescale(schedule.entry(j, k), rho));
  return out;
}

}  // namespace consensus
