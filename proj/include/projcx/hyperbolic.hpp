#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace projcx {

// Coincidence tolerance for ideal boundary points and the loxodromic trace margin.
inline constexpr double kBoundaryTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;

/// A point of the ideal boundary of the upper half-plane: a real number or
/// the distinguished point at infinity (an explicit variant, never a sentinel
/// float).
struct BoundaryPoint {
  double value = 0.0;
  bool infinite = false;

  static BoundaryPoint at(double t) { return {t, false}; }
  static BoundaryPoint infinity() { return {0.0, true}; }

  bool close_to(const BoundaryPoint& o, double tol = kBoundaryTol) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    return std::abs(value - o.value) <= tol;
  }
};

/// Point of the open upper half-plane, y > 0 strictly.
struct HPoint {
  double x = 0.0;
  double y = 1.0;
};

/// Bi-infinite geodesic given by its two ideal endpoints, oriented a -> b.
struct Geodesic {
  BoundaryPoint a;
  BoundaryPoint b;

  Geodesic reversed() const { return {b, a}; }
};

/// Real Moebius transformation, normalized so the determinant is 1.
struct MoebiusMap {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  // Normalizes by sqrt(det); rejects det <= 0 (orientation-reversing or
  // singular input is not an isometry of the upper half-plane).
  static MoebiusMap from_entries(double a, double b, double c, double d);
  static MoebiusMap identity() { return {}; }

  MoebiusMap inverse() const { return {m22, -m12, -m21, m11}; }
  double trace() const { return m11 + m22; }
  double det() const { return m11 * m22 - m12 * m21; }

  HPoint operator()(const HPoint& p) const;
  BoundaryPoint operator()(const BoundaryPoint& t) const;
  Geodesic operator()(const Geodesic& g) const { return {(*this)(g.a), (*this)(g.b)}; }
};

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n);

/// Signed arclength along an oriented geodesic; zero at the point the
/// standard form maps to i.
struct AxisCoordinate {
  double u = 0.0;
};

/// Closed coordinate interval along an axis.
struct CoordInterval {
  double lo = 0.0;
  double hi = 0.0;
  double diameter() const { return hi - lo; }
};

double hyp_distance(const HPoint& p, const HPoint& q);

struct AxisResult {
  Geodesic axis;                  // oriented repelling -> attracting
  double translation_length = 0;  // 2 ln(larger eigenvalue modulus)
};

/// Axis of a loxodromic map. Throws std::domain_error ("no axis") on
/// elliptic/parabolic input (|trace| <= 2 + tol).
AxisResult axis_of(const MoebiusMap& m);

/// Arclength coordinate on Y of the nearest point to the ideal point t.
/// With both endpoints finite this is ln|T(t)| for T(z) = (z-a)/(z-b);
/// the infinite-endpoint cases use the corresponding limits so that
/// reversing the orientation negates the coordinate. Throws
/// std::domain_error if t coincides with an endpoint of Y.
AxisCoordinate boundary_projection_coordinate(const Geodesic& y, const BoundaryPoint& t);

/// Coordinate interval spanned by the projections of X's two endpoints;
/// its length is diam pi_Y(X). Throws std::domain_error if X and Y share
/// an endpoint.
CoordInterval projection_interval(const Geodesic& y, const Geodesic& x);

/// diam(pi_Y(X u Z)): the span of the union of the two endpoint intervals.
double dpi_geodesics(const Geodesic& y, const Geodesic& x, const Geodesic& z);

}  // namespace projcx
