#pragma once

// Test-only oracles, independent of the library code paths they check:
// adaptive quadrature for window masses, brute-force graph reachability, and
// seeded random generators for schedules.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <queue>
#include <random>
#include <vector>

#include "consensus/graphs.hpp"
#include "consensus/schedule.hpp"

namespace oracles {

// Gauss-Kronrod 7-15 on one interval.
inline double gk15(const std::function<double(double)>& f, double a, double b, double& err) {
  static const double nodes[8] = {0.0,
                                  0.405845151377397166906606412076961,
                                  0.741531185599394439863864773280788,
                                  0.949107912342758524526189684047851,
                                  0.207784955007898467600689403773245,
                                  0.586087235467691130294144838258730,
                                  0.864864423359769072789712788640926,
                                  0.991455371120812639206854697526329};
  static const double wg[8] = {0.417959183673469387755102040816327,
                               0.381830050505118944950369775488975,
                               0.279705391489276667901467771423780,
                               0.129484966168869693270611432679082,
                               0, 0, 0, 0};
  static const double wk[8] = {0.209482141084727828012999174891714,
                               0.190350578064785409913256402421014,
                               0.140653259715525918745189590510238,
                               0.063092092629978553290700663189204,
                               0.204432940075298892414161999234649,
                               0.169004726639267902826583426598550,
                               0.104790010322250183839876322541518,
                               0.022935322010529224963732008058970};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double g = wg[0] * f0;
  double k = wk[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * nodes[i];
    const double fi = f(mid + dx) + f(mid - dx);
    k += wk[i] * fi;
    if (i < 4) g += wg[i] * fi;
  }
  g *= half;
  k *= half;
  err = std::abs(g - k);
  return k;
}

// Adaptive bisection; good enough for the clamped closed forms used here.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-11, int max_depth = 56) {
  struct Item {
    double a, b;
    int depth;
  };
  std::vector<Item> stack{{a, b, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double val = gk15(f, it.a, it.b, err);
    // Proportional budget plus a relative floor; without the floor, smooth
    // subintervals next to a singular path keep splitting too.
    const bool converged = err < abs_tol * (it.b - it.a) / (b - a) ||
                           err <= 1e-14 * (std::abs(val) + 1e-4);
    if (converged || it.depth >= max_depth) {
      total += val;
      continue;
    }
    const double mid = 0.5 * (it.a + it.b);
    stack.push_back({it.a, mid, it.depth + 1});
    stack.push_back({mid, it.b, it.depth + 1});
  }
  return total;
}

// Window mass of a piecewise function via quadrature on its raw values,
// nudging away from integrable singularities (truncation < 1e-7).
inline double quadrature_mass(const consensus::PiecewiseFunction& f, double a, double b) {
  auto value = [&](double t) -> double {
    if (t < 0.0) return 0.0;
    const auto v = f.value_at(t);
    return v ? *v : 0.0;
  };
  double total = 0.0;
  std::vector<double> cuts = f.breakpoints_in(a, b);
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    double lo = cuts[i - 1], hi = cuts[i];
    if (hi - lo < 1e-13) continue;
    // Evaluation exactly at an integrable singularity yields 0 through the
    // sentinel, so only the truncated sliver matters here.
    const double nudge = 1e-15 * std::max(1.0, std::abs(hi));
    total += integrate(value, lo + nudge, hi - nudge);
  }
  return total;
}

// A node is globally reachable iff forward BFS from every node hits it.
inline std::vector<int> brute_force_reachable(const consensus::DirectedGraph& g) {
  const int n = g.n_nodes;
  std::vector<std::vector<char>> hits(static_cast<std::size_t>(n),
                                      std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    hits[s][s] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& [x, y] : g.arrows) {
        if (x == v && !hits[s][y]) {
          hits[s][y] = 1;
          q.push(y);
        }
      }
    }
  }
  std::vector<int> out;
  for (int cand = 0; cand < n; ++cand) {
    bool all = true;
    for (int s = 0; s < n; ++s) all = all && hits[s][cand];
    if (all) out.push_back(cand);
  }
  return out;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen = [] {
    const char* seed = std::getenv("CONSENSUS_LAB_SEED");
    return std::mt19937_64(seed ? std::strtoull(seed, nullptr, 10) : 0xC0FFEEULL);
  }();
  return gen;
}

inline consensus::SegmentPrimitive random_primitive(std::mt19937_64& gen, double t0, double t1,
                                                    bool allow_singular = true) {
  using namespace consensus;
  std::uniform_int_distribution<int> kind(0, allow_singular ? 3 : 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (kind(gen)) {
    case 0:
      return SegmentPrimitive::constant(0.1 + 2.0 * u(gen));
    case 1:
      return SegmentPrimitive::hyperbolic(0.5 + u(gen), t0, 0.3 + u(gen));
    case 2:
      return SegmentPrimitive::inv_sqrt_left(t0);
    default:
      return SegmentPrimitive::inv_cbrt_right(t1);
  }
}

inline consensus::PiecewiseFunction random_piecewise(std::mt19937_64& gen, double horizon,
                                                     bool allow_singular = true) {
  using namespace consensus;
  std::uniform_int_distribution<int> n_pieces(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = n_pieces(gen);
  std::vector<double> cuts;
  for (int i = 0; i < 2 * m; ++i) cuts.push_back(u(gen) * horizon);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Piece> pieces;
  for (int i = 0; i < m; ++i) {
    const double a = cuts[static_cast<std::size_t>(2 * i)];
    const double b = cuts[static_cast<std::size_t>(2 * i + 1)];
    if (b - a < 1e-3) continue;
    pieces.push_back({a, b, random_primitive(gen, a, b, allow_singular)});
  }
  return PiecewiseFunction::from_pieces(std::move(pieces));
}

inline consensus::ConnectionSchedule random_schedule(std::mt19937_64& gen, int n, double horizon,
                                                     bool allow_singular = true,
                                                     double density = 0.7) {
  using namespace consensus;
  ConnectionSchedule s(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k && u(gen) < density)
        s.set_entry(j, k, random_piecewise(gen, horizon, allow_singular));
  return s;
}

// Piecewise-constant pattern repeated with period `period`.
inline consensus::PiecewiseFunction random_periodic_constant(std::mt19937_64& gen, double period) {
  using namespace consensus;
  std::uniform_int_distribution<int> n_pieces(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = n_pieces(gen);
  std::vector<double> cuts;
  for (int i = 0; i < 2 * m; ++i) cuts.push_back(u(gen) * period);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Piece> pieces;
  for (int i = 0; i < m; ++i) {
    const double a = cuts[static_cast<std::size_t>(2 * i)];
    const double b = cuts[static_cast<std::size_t>(2 * i + 1)];
    if (b - a < 1e-3) continue;
    pieces.push_back({a, b, SegmentPrimitive::constant(0.1 + 2.0 * u(gen))});
  }
  if (pieces.empty())
    pieces.push_back({0.0, 0.5 * period, SegmentPrimitive::constant(1.0)});
  return PiecewiseFunction::from_pieces(std::move(pieces), period);
}

}  // namespace oracles
