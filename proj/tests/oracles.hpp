#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "projcx/blowup.hpp"
#include "projcx/hyperbolic.hpp"

namespace oracles {

/// Hyperbolic length of the circular arc between p and q (both on the
/// geodesic through them) by direct quadrature of |dz|/y.
inline double arc_length_quadrature(const projcx::HPoint& p, const projcx::HPoint& q,
                                    int steps = 200000) {
  if (std::abs(p.x - q.x) < 1e-14) {  // vertical segment
    return std::abs(std::log(q.y / p.y));
  }
  // Circle orthogonal to the real axis through p and q.
  const double c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x));
  const double r = std::hypot(p.x - c, p.y);
  const double t0 = std::atan2(p.y, p.x - c);
  const double t1 = std::atan2(q.y, q.x - c);
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  double sum = 0.0;
  const double h = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = lo + (i + 0.5) * h;
    sum += h * r / (r * std::sin(t));
  }
  return sum;
}

/// Point of the geodesic y at arclength coordinate u (the convention the
/// library uses: ln|T| with T the standard form).
inline projcx::HPoint point_at(const projcx::Geodesic& y, double u) {
  using projcx::HPoint;
  if (y.a.infinite) {  // (inf, b): vertical line x = b, u = -ln(height)
    return HPoint{y.b.value, std::exp(-u)};
  }
  if (y.b.infinite) {  // (a, inf): vertical line x = a, u = ln(height)
    return HPoint{y.a.value, std::exp(u)};
  }
  // Semicircle: T(z) = (z-a)/(z-b) maps y to the imaginary axis; the point
  // with |T| = e^u is T^{-1}(s * i * e^u) where s = sign fixed by the image
  // half-plane (T has negative determinant when a < b).
  const double a = y.a.value, b = y.b.value;
  const double e = std::exp(u);
  // Invert w = (z-a)/(z-b): z = (a - b w)/(1 - w), with w = i*e (or -i*e).
  for (double sgn : {1.0, -1.0}) {
    const double wr = 0.0, wi = sgn * e;
    const double den = (1.0 - wr) * (1.0 - wr) + wi * wi;
    const double zr = ((a - b * wr) * (1.0 - wr) + (b * wi) * wi) / den;
    const double zi = ((-b * wi) * (1.0 - wr) + (a - b * wr) * wi) / den;
    if (zi > 0) return projcx::HPoint{zr, zi};
  }
  throw std::logic_error("point_at: no preimage in the upper half-plane");
}

/// Nearest-point projection coordinate found by golden-section minimization
/// of the hyperbolic distance from a point approaching the ideal point t.
inline double projection_coordinate_minimized(const projcx::Geodesic& y,
                                              const projcx::BoundaryPoint& t) {
  auto dist_to_axis = [&](const projcx::HPoint& p) {
    // minimize over u by golden section on a wide bracket
    double lo = -40.0, hi = 40.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    auto f = [&](double u) { return projcx::hyp_distance(p, point_at(y, u)); };
    for (int it = 0; it < 200; ++it) {
      if (f(c) < f(d))
        hi = d;
      else
        lo = c;
      c = hi - phi * (hi - lo);
      d = lo + phi * (hi - lo);
    }
    return (lo + hi) / 2.0;
  };
  // Approach t along a vertical transversal; heights small enough that the
  // projection coordinate has converged well below the comparison tolerance.
  projcx::HPoint p;
  if (t.infinite)
    p = {0.0, 1e8};
  else
    p = {t.value, 1e-7};
  return dist_to_axis(p);
}

/// Independent shortest-path over an exported adjacency (simple Dijkstra
/// without the library's tie-breaking or epsilon handling).
inline std::vector<double> dijkstra_reference(
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj,
    std::size_t source) {
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> done(adj.size(), false);
  dist[source] = 0;
  for (;;) {
    std::size_t best = adj.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < adj.size(); ++v)
      if (!done[v] && dist[v] < bd) {
        bd = dist[v];
        best = v;
      }
    if (best == adj.size()) break;
    done[best] = true;
    for (const auto& [w, wt] : adj[best])
      dist[w] = std::min(dist[w], dist[best] + wt);
  }
  return dist;
}

}  // namespace oracles
