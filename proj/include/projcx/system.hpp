#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "projcx/hyperbolic.hpp"
#include "projcx/report.hpp"

namespace projcx {

using Vertex = std::uint32_t;

/// The constant ledger: xi from the instance, theta (the enlarged constant
/// at which the modified-distance properties are asserted), the edge
/// threshold K, the forcing threshold K', and the bridge length L.
struct CoreParams {
  double xi = 1.0;
  double theta = 4.0;
  double K = 30.0;
  double Kprime = 180.0;
  double L = 33.0;

  static CoreParams defaults(double xi_) {
    CoreParams p;
    p.xi = xi_;
    p.theta = 4.0 * xi_;
    p.K = 30.0 * xi_;
    p.Kprime = 5.0 * p.K + 30.0 * xi_;
    p.L = p.K + 2.0 * xi_ + 1.0;
    return p;
  }

  /// Re-derives K'-and-L defaults after an explicit K override.
  CoreParams with_K(double K_) const {
    CoreParams p = *this;
    p.K = K_;
    p.Kprime = 5.0 * K_ + 30.0 * xi;
    p.L = K_ + 2.0 * xi + 1.0;
    return p;
  }

  void validate() const {
    if (!(xi > 0)) throw std::invalid_argument("CoreParams: xi must be > 0");
    if (theta < 4.0 * xi - 1e-12) throw std::invalid_argument("CoreParams: theta < 4 xi");
    if (K < theta - 1e-12) throw std::invalid_argument("CoreParams: K < theta");
    if (!(Kprime > K)) throw std::invalid_argument("CoreParams: Kprime <= K");
    if (!(L > K + 2.0 * xi)) throw std::invalid_argument("CoreParams: L <= K + 2 xi");
  }

  json to_json() const {
    return json{{"xi", xi}, {"theta", theta}, {"K", K}, {"Kprime", Kprime}, {"L", L}};
  }
};

/// Geometry hook used by the blowup: the projection of X to Y's space as an
/// interval in Y's internal coordinate.
class AnchorGeometry {
 public:
  virtual ~AnchorGeometry() = default;
  virtual CoordInterval anchor(Vertex y, Vertex x) const = 0;
};

/// A finite family Y with a projection-distance oracle d^pi and constant xi.
class ProjectionSystem {
 public:
  virtual ~ProjectionSystem() = default;
  virtual std::size_t size() const = 0;
  virtual double xi() const = 0;
  /// d^pi_Y(X,Z); requires y != x and y != z. x == z is allowed and yields
  /// diam pi_Y(X).
  virtual double dpi(Vertex y, Vertex x, Vertex z) const = 0;
  virtual std::string label(Vertex v) const { return "v" + std::to_string(v); }
  virtual const AnchorGeometry* geometry() const { return nullptr; }
  /// Stable content hash for report provenance.
  virtual std::uint64_t content_hash() const = 0;
};

/// Dense explicit table, for hand-crafted systems and JSON files.
class TabularSystem final : public ProjectionSystem {
 public:
  TabularSystem(std::vector<std::string> labels, double xi);

  void set_dpi(Vertex y, Vertex x, Vertex z, double value);  // also sets (z,x)

  std::size_t size() const override { return labels_.size(); }
  double xi() const override { return xi_; }
  double dpi(Vertex y, Vertex x, Vertex z) const override;
  std::string label(Vertex v) const override { return labels_.at(v); }
  std::uint64_t content_hash() const override;

  /// { "xi": x, "vertices": [...], "dpi": { "Y": { "X|Z": v } } } with
  /// symmetric completion of missing (Z,X) entries.
  static TabularSystem from_json(const json& j);

 private:
  std::size_t idx(Vertex y, Vertex x, Vertex z) const;
  std::vector<std::string> labels_;
  double xi_;
  std::vector<double> table_;
};

/// A system whose d^pi comes from per-pair anchor intervals: each vertex Y
/// carries a real coordinate line and every other X projects to the interval
/// anchor(Y, X). Both the half-plane backends and the synthetic chain
/// produce this shape.
class AnchoredSystem final : public ProjectionSystem, public AnchorGeometry {
 public:
  AnchoredSystem(std::vector<std::string> labels,
                 std::vector<CoordInterval> anchors,  // size n*n, row-major [y][x]
                 double xi, std::string provenance);

  std::size_t size() const override { return labels_.size(); }
  double xi() const override { return xi_; }
  double dpi(Vertex y, Vertex x, Vertex z) const override;
  std::string label(Vertex v) const override { return labels_.at(v); }
  const AnchorGeometry* geometry() const override { return this; }
  CoordInterval anchor(Vertex y, Vertex x) const override;
  std::uint64_t content_hash() const override;

  /// Max observed diam pi_Y(X) (the instance's nu).
  double max_projection_diameter() const;
  /// Max over distinct triples of min{dpi_Y(X,Z), dpi_Z(X,Y)}.
  double measured_minimal_xi() const;
  const std::string& provenance() const { return provenance_; }

 private:
  std::vector<std::string> labels_;
  std::vector<CoordInterval> anchors_;
  double xi_;
  std::string provenance_;
};

/// Geodesic family instance: the axes and the anchored system they induce.
struct GeodesicInstance {
  std::vector<Geodesic> geodesics;
  std::shared_ptr<AnchoredSystem> system;
  double nu = 0.0;  // max observed diam pi_Y(X)
};

/// Builds an anchored system from explicit geodesics. xi is the measured
/// minimal valid constant times 1.1 unless overridden. Throws
/// std::domain_error if two geodesics share an endpoint.
GeodesicInstance make_geodesic_instance(const std::vector<Geodesic>& geodesics,
                                        const std::vector<std::string>& labels,
                                        std::string provenance,
                                        std::optional<double> xi_override = {});

/// Orbit of the generator axes under reduced words of length <= word_radius,
/// deduped on quantized endpoint pairs. `extra_words` adds further translates
/// (word strings over the generator alphabet) to the enumerated window.
struct SchottkyInstance {
  std::vector<MoebiusMap> generators;
  int word_radius = 0;
  GeodesicInstance inst;
  std::vector<std::string> vertex_words;  // shortest producing word per vertex
  std::map<std::pair<std::int64_t, std::int64_t>, Vertex> endpoint_index;

  std::optional<Vertex> find_axis(const Geodesic& g) const;
};

SchottkyInstance make_schottky_instance(const std::vector<MoebiusMap>& generators,
                                        int word_radius,
                                        const std::vector<std::string>& extra_words = {});

/// The standard two-generator instance: a = [[4,0],[0,1/4]], b = [[17,15],[15,17]]/8.
std::vector<MoebiusMap> default_schottky_generators();

/// n random geodesics with endpoints in [lo, hi], all endpoint separations
/// >= min_gap; deterministic in the seed.
struct RandomGeodesicSpec {
  int count = 30;
  std::uint64_t seed = 1;
  double endpoint_lo = -10.0;
  double endpoint_hi = 10.0;
  double min_gap = 0.05;
};
GeodesicInstance make_random_instance(const RandomGeodesicSpec& spec);

/// Near-tangent semicircle chain: unit semicircles centered at i*(2+delta).
GeodesicInstance make_tangent_chain(int count, double delta);

/// Synthetic chain: vertex i anchors vertex j at the single coordinate
/// sign(j-i) * (big - 2^-|j-i|). Satisfies the axioms exactly with a small
/// xi while consecutive projections are ~2*big, so the complex is a path
/// graph at the default thresholds.
std::shared_ptr<AnchoredSystem> make_synthetic_chain(int count, double big);

/// Instance-spec JSON dispatch: schottky ("generators"/"word_radius"),
/// random ("count"/"endpoint_range"/"min_gap"), or tabular ("dpi").
struct LoadedInstance {
  std::shared_ptr<ProjectionSystem> system;
  std::optional<SchottkyInstance> schottky;
  std::optional<GeodesicInstance> geodesics;
};
LoadedInstance load_instance_json(const json& j);

}  // namespace projcx
