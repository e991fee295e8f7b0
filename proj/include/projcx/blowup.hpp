#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "projcx/complex.hpp"
#include "projcx/core.hpp"
#include "projcx/system.hpp"

namespace projcx {

/// A node of the blowup: a vertex space plus an integer mesh coordinate
/// inside that space's truncation window.
struct PointRef {
  Vertex space = 0;
  long coord = 0;
};

/// One per-vertex metric space: a unit-mesh path graph over a truncation
/// window, with anchor node ranges toward the complex neighbors.
struct VertexSpace {
  Vertex owner = 0;
  long lo = 0, hi = 0;              // inclusive window in mesh coordinates
  std::size_t base = 0;             // global node id of coordinate `lo`
  std::map<Vertex, std::pair<long, long>> anchors;  // neighbor -> node range

  std::size_t node_count() const { return static_cast<std::size_t>(hi - lo + 1); }
};

/// The quasi-tree of metric spaces: per-vertex path graphs joined by bridge
/// bundles of length L along every complex edge.
class BlowupSpace {
 public:
  static BlowupSpace build(std::shared_ptr<const AnchoredSystem> sys,
                           const ModifiedDistances& d, const CoreParams& params,
                           const ProjectionComplex& complex);

  const std::vector<VertexSpace>& spaces() const { return spaces_; }
  const AnchoredSystem& system() const { return *sys_; }
  const CoreParams& params() const { return params_; }
  const ProjectionComplex& complex() const { return *complex_; }
  double bridge_length() const { return L_; }
  std::size_t node_count() const { return node_space_.size(); }
  std::size_t bridge_count() const { return bridge_count_; }

  std::size_t node_id(const PointRef& p) const;
  PointRef point_of(std::size_t node) const;

  double distance(const PointRef& p, const PointRef& q) const;
  /// Single-source shortest distances over the whole blowup graph.
  std::vector<double> distances_from(const PointRef& p) const;
  std::vector<double> distances_from_node(std::size_t source) const;

  /// The paper's point conventions: d_Y(x,z) is the modified distance of the
  /// owning vertices unless x or z lies in Y, where the raw projection
  /// distance with the point is used instead.
  double extended_dY(const ModifiedDistances& d, Vertex y, const PointRef& x,
                     const PointRef& z) const;
  /// { Y : d_Y(x,z) > t }; may contain the owners of x and z.
  std::vector<Vertex> extended_large_set(const ModifiedDistances& d, const PointRef& x,
                                         const PointRef& z, double t) const;

  /// Edge list rows: src, dst, weight, kind in {internal, bridge}.
  std::string edge_list_csv() const;

  const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adjacency() const {
    return adj_;
  }

 private:
  std::shared_ptr<const AnchoredSystem> sys_;
  const ProjectionComplex* complex_ = nullptr;
  CoreParams params_;
  double L_ = 0;
  std::vector<VertexSpace> spaces_;
  std::vector<Vertex> node_space_;  // node id -> owning space
  std::vector<long> node_coord_;    // node id -> mesh coordinate
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
  std::size_t bridge_count_ = 0;
};

// --------------------------------------------------------------- queries

struct EmbeddingReport {
  Vertex space = 0;
  bool pass = true;
  double max_defect = 0;
  std::size_t pairs_checked = 0;
};
/// Internal distance must equal blowup distance for all node pairs of C(y).
EmbeddingReport check_isometric_embedding(const BlowupSpace& b, Vertex y);

struct StandardPath {
  std::vector<PointRef> nodes;
  double length = 0;
  double upper_bound = 0;  // 6K + 4 * sum of large modified distances
  bool within_bound = true;
};
StandardPath standard_path(const BlowupSpace& b, const ModifiedDistances& d,
                           const PointRef& x, const PointRef& z);

struct SandwichResult {
  double lower = 0, actual = 0, upper = 0;
  bool ok = true;
};
SandwichResult distance_formula_bounds(const BlowupSpace& b, const ModifiedDistances& d,
                                       const PointRef& x, const PointRef& z);

struct NearestPointResult {
  PointRef nearest;
  double distance = 0;
  double projection_defect = 0;  // d_Z(x, nearest)
  bool within_bound = true;      // defect <= 2K
  bool flagged = false;          // defect > 2K + 20 xi
};
NearestPointResult nearest_point_check(const BlowupSpace& b, const ModifiedDistances& d,
                                       const PointRef& x, Vertex z_space);

struct TraceVisit {
  Vertex space = 0;
  long entry = 0, exit = 0;
};
struct TraceReport {
  std::vector<TraceVisit> visits;
  double length = 0;
  bool contiguous = true;       // no space is re-entered
  bool covers_forced = true;    // every K'-large vertex is visited
  bool in_order = true;         // forced visits follow the interval order
  double max_endpoint_defect = 0;
  bool defects_flagged = false;  // some defect exceeded K' + 10 xi
  double geodesic_count = 0;     // from the shortest-path DAG (saturating)
  std::size_t enumerated = 0;    // geodesics individually checked
};
TraceReport geodesic_trace(const BlowupSpace& b, const ModifiedDistances& d,
                           const PointRef& x, const PointRef& z,
                           std::size_t enumerate_cap = 10'000);

double hausdorff_distance(const BlowupSpace& b, const std::vector<PointRef>& path_a,
                          const std::vector<PointRef>& path_b);

struct DeltaEstimate {
  double delta_4pt = 0;
  double bottleneck_delta = 0;
  std::uint64_t seed = 0;
  std::size_t quadruples = 0;
  std::size_t pairs = 0;
  json to_json() const;
};
DeltaEstimate estimate_delta(const BlowupSpace& b, std::size_t sample_count,
                             std::uint64_t seed);

}  // namespace projcx
