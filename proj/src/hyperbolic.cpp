#include "projcx/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

namespace projcx {

MoebiusMap MoebiusMap::from_entries(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0))
    throw std::invalid_argument("MoebiusMap: determinant must be positive");
  const double s = std::sqrt(det);
  return {a / s, b / s, c / s, d / s};
}

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
  return {m.m11 * n.m11 + m.m12 * n.m21, m.m11 * n.m12 + m.m12 * n.m22,
          m.m21 * n.m11 + m.m22 * n.m21, m.m21 * n.m12 + m.m22 * n.m22};
}

HPoint MoebiusMap::operator()(const HPoint& p) const {
  if (!(p.y > 0.0)) throw std::invalid_argument("HPoint outside upper half-plane");
  // (a z + b)/(c z + d) with z = x + iy, det = 1.
  const double cx = m21 * p.x + m22;
  const double cy = m21 * p.y;
  const double den = cx * cx + cy * cy;
  const double ax = m11 * p.x + m12;
  const double ay = m11 * p.y;
  return {(ax * cx + ay * cy) / den, p.y / den};
}

BoundaryPoint MoebiusMap::operator()(const BoundaryPoint& t) const {
  if (t.infinite) {
    if (m21 == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::at(m11 / m21);
  }
  const double den = m21 * t.value + m22;
  if (den == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::at((m11 * t.value + m12) / den);
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  if (!(p.y > 0.0) || !(q.y > 0.0))
    throw std::invalid_argument("hyp_distance: points must have y > 0");
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double c = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
  return std::acosh(std::max(1.0, c));
}

AxisResult axis_of(const MoebiusMap& m) {
  const double tr = m.trace();
  if (!(std::abs(tr) > 2.0 + kTraceTol))
    throw std::domain_error("axis_of: no axis (map is not loxodromic)");
  const double lambda = (std::abs(tr) + std::sqrt(tr * tr - 4.0)) / 2.0;

  BoundaryPoint f1, f2;
  if (m.m21 == 0.0) {
    f1 = BoundaryPoint::infinity();
    f2 = BoundaryPoint::at(m.m12 / (m.m22 - m.m11));
  } else {
    const double disc = std::sqrt((m.m11 - m.m22) * (m.m11 - m.m22) + 4.0 * m.m12 * m.m21);
    f1 = BoundaryPoint::at(((m.m11 - m.m22) + disc) / (2.0 * m.m21));
    f2 = BoundaryPoint::at(((m.m11 - m.m22) - disc) / (2.0 * m.m21));
  }

  // A fixed point is attracting iff |c z + d| > 1 (derivative 1/(cz+d)^2).
  auto attracting = [&](const BoundaryPoint& f) {
    if (f.infinite) return std::abs(m.m11) > std::abs(m.m22);
    return std::abs(m.m21 * f.value + m.m22) > 1.0;
  };
  Geodesic axis = attracting(f1) ? Geodesic{f2, f1} : Geodesic{f1, f2};
  return {axis, 2.0 * std::log(lambda)};
}

AxisCoordinate boundary_projection_coordinate(const Geodesic& y, const BoundaryPoint& t) {
  if (t.close_to(y.a) || t.close_to(y.b))
    throw std::domain_error("boundary_projection_coordinate: asymptotic, unbounded projection");
  if (y.a.close_to(y.b)) throw std::domain_error("degenerate geodesic");
  if (y.a.infinite) {
    if (t.infinite) throw std::domain_error("asymptotic, unbounded projection");
    return {-std::log(std::abs(t.value - y.b.value))};
  }
  if (y.b.infinite) {
    if (t.infinite) throw std::domain_error("asymptotic, unbounded projection");
    return {std::log(std::abs(t.value - y.a.value))};
  }
  if (t.infinite) return {0.0};  // T(inf) = 1
  return {std::log(std::abs((t.value - y.a.value) / (t.value - y.b.value)))};
}

CoordInterval projection_interval(const Geodesic& y, const Geodesic& x) {
  const double u1 = boundary_projection_coordinate(y, x.a).u;
  const double u2 = boundary_projection_coordinate(y, x.b).u;
  return {std::min(u1, u2), std::max(u1, u2)};
}

double dpi_geodesics(const Geodesic& y, const Geodesic& x, const Geodesic& z) {
  const CoordInterval ix = projection_interval(y, x);
  const CoordInterval iz = projection_interval(y, z);
  return std::max(ix.hi, iz.hi) - std::min(ix.lo, iz.lo);
}

}  // namespace projcx
