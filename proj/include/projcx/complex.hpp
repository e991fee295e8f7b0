#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "projcx/core.hpp"
#include "projcx/system.hpp"

namespace projcx {

enum class MetricMode { modified, raw };

/// Plain undirected graph, for the diagnostics that run on arbitrary graphs.
struct SimpleGraph {
  std::vector<std::vector<Vertex>> adj;

  std::size_t size() const { return adj.size(); }
  void add_edge(Vertex a, Vertex b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  static SimpleGraph path(std::size_t n);
  static SimpleGraph cycle(std::size_t n);
  /// Uniform random recursive tree on n vertices (deterministic in seed).
  static SimpleGraph random_tree(std::size_t n, std::uint64_t seed);
};

inline constexpr unsigned kUnreachable = std::numeric_limits<unsigned>::max();

std::vector<unsigned> bfs_distances(const SimpleGraph& g, Vertex source);

/// The complex P_K: vertices of the system, an edge where no third element
/// sees a projection above K (modified or raw distance per `mode`).
class ProjectionComplex {
 public:
  static ProjectionComplex build(const ModifiedDistances& d, const CoreParams& params,
                                 double K, MetricMode mode);

  const SimpleGraph& graph() const { return graph_; }
  double K() const { return K_; }
  MetricMode mode() const { return mode_; }
  bool connected() const { return connected_; }
  std::size_t size() const { return graph_.size(); }
  bool adjacent(Vertex a, Vertex b) const;

  unsigned graph_distance(Vertex a, Vertex b) const { return dist_[a][b]; }
  unsigned eccentricity(Vertex v) const;

 private:
  SimpleGraph graph_;
  std::vector<std::vector<unsigned>> dist_;
  double K_ = 0;
  MetricMode mode_ = MetricMode::modified;
  bool connected_ = true;
};

// ------------------------------------------------------------ diagnostics

struct PairBounds {
  Vertex x = 0, z = 0;
  std::size_t lower_count = 0;  // |Y_K'(x,z)|
  std::size_t upper_count = 0;  // |Y_K(x,z)|
  unsigned distance = 0;
  bool ok = true;  // lower_count+1 <= distance <= upper_count+1
};

struct DistanceBoundsReport {
  std::vector<PairBounds> pairs;
  bool all_ok = true;
  json to_json() const;
  std::string to_csv() const;  // lower, actual, upper per pair
};

DistanceBoundsReport distance_bounds(const ModifiedDistances& d, const CoreParams& params,
                                     const ProjectionComplex& c);

struct ContainmentResult {
  Vertex x = 0, z = 0;
  bool pass = true;
  bool sampled = false;           // geodesic count exceeded the cap
  double geodesic_count = 0;      // saturating
  double minimal_threshold = 0;   // smallest t with Y_t(x,z) on every geodesic
  std::vector<Vertex> missed;     // forced vertices missing from some geodesic
};

struct ContainmentReport {
  bool pass = true;
  double minimal_empirical_Kprime = 0;  // max of per-pair minimal thresholds
  std::vector<ContainmentResult> failures;
  std::size_t pairs_checked = 0;
  std::size_t sampled_pairs = 0;
  json to_json() const;
};

/// Every vertex of Y_K'(x,z) must lie on every geodesic between x and z.
/// Geodesic enumeration is exact below `max_geodesics`, then a seeded sample
/// of `sample_size` geodesics with the result flagged as sampled.
ContainmentResult check_geodesic_containment(const ModifiedDistances& d,
                                             const CoreParams& params,
                                             const ProjectionComplex& c, Vertex x, Vertex z,
                                             double max_geodesics = 1e6,
                                             std::size_t sample_size = 10'000,
                                             std::uint64_t seed = 0);
ContainmentReport check_geodesic_containment_all(const ModifiedDistances& d,
                                                 const CoreParams& params,
                                                 const ProjectionComplex& c);

struct SeparationResult {
  Vertex x = 0, z = 0, y = 0;
  bool pass = true;
  bool trivial = false;  // x or z inside B(y,2): every path meets the ball at an endpoint
};

struct SeparationReport {
  bool all_pass = true;
  std::size_t checked = 0;
  std::vector<SeparationResult> failures;
  json to_json() const;
};

/// For each Y in Y_K(x,z): removing the closed ball B(Y,2) minus {x,z}
/// must disconnect x from z.
SeparationReport check_midpath_separation(const ModifiedDistances& d,
                                          const CoreParams& params,
                                          const ProjectionComplex& c, Vertex x, Vertex z);
SeparationReport check_midpath_separation_all(const ModifiedDistances& d,
                                              const CoreParams& params,
                                              const ProjectionComplex& c);

struct BottleneckReport {
  unsigned delta = 0;
  std::vector<std::pair<Vertex, Vertex>> witness_pairs;  // pairs attaining delta
  std::size_t pairs_checked = 0;
  json to_json() const;
};

/// Minimal Delta such that every pair at distance >= 2 has a midpoint vertex
/// (on some geodesic, side difference <= 1) whose closed ball B(y, Delta),
/// after excluding the endpoints, separates them.
BottleneckReport bottleneck_delta(const SimpleGraph& g);

struct DiameterReport {
  unsigned diameter = 0;
  std::vector<std::size_t> eccentricity_histogram;  // index = eccentricity
  json to_json() const;
};

DiameterReport complex_diameter(const ProjectionComplex& c);

std::string to_dot(const ProjectionComplex& c, const ProjectionSystem& sys);

}  // namespace projcx
