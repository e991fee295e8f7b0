#include "projcx/complex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace projcx {

SimpleGraph SimpleGraph::path(std::size_t n) {
  SimpleGraph g;
  g.adj.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    g.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(i + 1));
  return g;
}

SimpleGraph SimpleGraph::cycle(std::size_t n) {
  SimpleGraph g = path(n);
  if (n > 2) g.add_edge(static_cast<Vertex>(n - 1), 0);
  return g;
}

SimpleGraph SimpleGraph::random_tree(std::size_t n, std::uint64_t seed) {
  SimpleGraph g;
  g.adj.resize(n);
  SplitMix64 rng(seed);
  for (std::size_t i = 1; i < n; ++i)
    g.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(rng.below(i)));
  return g;
}

std::vector<unsigned> bfs_distances(const SimpleGraph& g, Vertex source) {
  std::vector<unsigned> dist(g.size(), kUnreachable);
  std::deque<Vertex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex v : g.adj[u])
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

ProjectionComplex ProjectionComplex::build(const ModifiedDistances& d,
                                           const CoreParams& params, double K,
                                           MetricMode mode) {
  const auto n = static_cast<Vertex>(d.size());
  if (mode == MetricMode::modified && K < params.theta - 1e-12)
    throw std::invalid_argument("build_complex: K below theta");
  if (mode == MetricMode::raw && K < params.xi - 1e-12)
    throw std::invalid_argument("build_complex: K below xi (raw mode)");

  ProjectionComplex c;
  c.K_ = K;
  c.mode_ = mode;
  c.graph_.adj.resize(n);
  const ProjectionSystem& sys = d.system();
  for (Vertex x = 0; x < n; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
      bool edge = true;
      if (mode == MetricMode::modified) {
        auto r = d.row(x, z);
        for (Vertex y = 0; y < n && edge; ++y)
          if (y != x && y != z && r[y] > K) edge = false;
      } else {
        for (Vertex y = 0; y < n && edge; ++y)
          if (y != x && y != z && sys.dpi(y, x, z) > K) edge = false;
      }
      if (edge) c.graph_.add_edge(x, z);
    }

  c.dist_.resize(n);
  for (Vertex v = 0; v < n; ++v) c.dist_[v] = bfs_distances(c.graph_, v);
  c.connected_ = true;
  for (Vertex v = 0; v < n; ++v)
    if (c.dist_[0][v] == kUnreachable) c.connected_ = false;
  if (!c.connected_ && mode == MetricMode::modified) {
    // Contradicts the connectivity property of the modified complex.
    std::ostringstream os;
    os << "internal error: modified-mode complex disconnected at K=" << K
       << " (n=" << n << ")";
    throw std::logic_error(os.str());
  }
  return c;
}

bool ProjectionComplex::adjacent(Vertex a, Vertex b) const {
  const auto& nb = graph_.adj[a];
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

unsigned ProjectionComplex::eccentricity(Vertex v) const {
  unsigned e = 0;
  for (unsigned d : dist_[v])
    if (d != kUnreachable) e = std::max(e, d);
  return e;
}

// --------------------------------------------------------- distance bounds

json DistanceBoundsReport::to_json() const {
  json arr = json::array();
  for (const auto& p : pairs)
    arr.push_back({{"x", p.x},
                   {"z", p.z},
                   {"lower", p.lower_count + 1},
                   {"actual", p.distance},
                   {"upper", p.upper_count + 1},
                   {"ok", p.ok}});
  return json{{"statement", "distance-count-bounds"}, {"all_ok", all_ok}, {"pairs", arr}};
}

std::string DistanceBoundsReport::to_csv() const {
  std::ostringstream os;
  os << "x,z,lower,actual,upper\n";
  for (const auto& p : pairs)
    os << p.x << "," << p.z << "," << p.lower_count + 1 << "," << p.distance << ","
       << p.upper_count + 1 << "\n";
  return os.str();
}

DistanceBoundsReport distance_bounds(const ModifiedDistances& d, const CoreParams& params,
                                     const ProjectionComplex& c) {
  DistanceBoundsReport rep;
  const auto n = static_cast<Vertex>(d.size());
  for (Vertex x = 0; x < n; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
      PairBounds pb;
      pb.x = x;
      pb.z = z;
      pb.lower_count = large_set(d, x, z, params.Kprime).size();
      pb.upper_count = large_set(d, x, z, c.K()).size();
      pb.distance = c.graph_distance(x, z);
      pb.ok = pb.lower_count + 1 <= pb.distance && pb.distance <= pb.upper_count + 1;
      if (!pb.ok) rep.all_ok = false;
      rep.pairs.push_back(pb);
    }
  return rep;
}

// ------------------------------------------------------------ containment

namespace {

// Geodesic counts through each vertex via the shortest-path DAG, saturating.
struct GeodesicCounts {
  std::vector<double> from_x, from_z;
  double total = 0;
};

GeodesicCounts count_geodesics(const ProjectionComplex& c, Vertex x, Vertex z) {
  const auto n = static_cast<Vertex>(c.size());
  GeodesicCounts gc;
  gc.from_x.assign(n, 0);
  gc.from_z.assign(n, 0);
  std::vector<Vertex> order(n);
  for (Vertex v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](Vertex a, Vertex b) { return c.graph_distance(x, a) < c.graph_distance(x, b); });
  gc.from_x[x] = 1;
  for (Vertex v : order) {
    if (v == x || c.graph_distance(x, v) == kUnreachable) continue;
    double s = 0;
    for (Vertex u : c.graph().adj[v])
      if (c.graph_distance(x, u) + 1 == c.graph_distance(x, v)) s += gc.from_x[u];
    gc.from_x[v] = std::min(s, 1e18);
  }
  std::sort(order.begin(), order.end(),
            [&](Vertex a, Vertex b) { return c.graph_distance(z, a) < c.graph_distance(z, b); });
  gc.from_z[z] = 1;
  for (Vertex v : order) {
    if (v == z || c.graph_distance(z, v) == kUnreachable) continue;
    double s = 0;
    for (Vertex u : c.graph().adj[v])
      if (c.graph_distance(z, u) + 1 == c.graph_distance(z, v)) s += gc.from_z[u];
    gc.from_z[v] = std::min(s, 1e18);
  }
  gc.total = gc.from_x[z];
  return gc;
}

}  // namespace

ContainmentResult check_geodesic_containment(const ModifiedDistances& d,
                                             const CoreParams& params,
                                             const ProjectionComplex& c, Vertex x, Vertex z,
                                             double max_geodesics, std::size_t sample_size,
                                             std::uint64_t seed) {
  if (x == z) throw std::invalid_argument("containment: x == z");
  ContainmentResult res;
  res.x = x;
  res.z = z;
  const auto n = static_cast<Vertex>(c.size());
  const unsigned dist = c.graph_distance(x, z);

  std::vector<bool> on_all(n, false);
  const GeodesicCounts gc = count_geodesics(c, x, z);
  res.geodesic_count = gc.total;

  if (gc.total <= max_geodesics) {
    for (Vertex y = 0; y < n; ++y) {
      if (y == x || y == z) continue;
      if (c.graph_distance(x, y) + c.graph_distance(y, z) != dist) continue;
      on_all[y] = gc.from_x[y] * gc.from_z[y] == gc.total;
    }
  } else {
    // Sampled mode: random geodesics drawn through the predecessor DAG.
    res.sampled = true;
    std::vector<std::size_t> hit(n, 0);
    SplitMix64 rng(seed ^ (static_cast<std::uint64_t>(x) << 32) ^ z);
    for (std::size_t s = 0; s < sample_size; ++s) {
      Vertex cur = z;
      while (cur != x) {
        std::vector<Vertex> preds;
        for (Vertex u : c.graph().adj[cur])
          if (c.graph_distance(x, u) + 1 == c.graph_distance(x, cur)) preds.push_back(u);
        cur = preds[rng.below(preds.size())];
        if (cur != x) ++hit[cur];
      }
    }
    for (Vertex y = 0; y < n; ++y)
      if (y != x && y != z) on_all[y] = hit[y] == sample_size;
  }

  // Forced set at K' and the smallest threshold that would be forced.
  auto r = d.row(x, z);
  double tmin = 0;
  for (Vertex y = 0; y < n; ++y) {
    if (y == x || y == z) continue;
    if (!on_all[y]) tmin = std::max(tmin, r[y]);
    if (r[y] > params.Kprime && !on_all[y]) {
      res.pass = false;
      res.missed.push_back(y);
    }
  }
  res.minimal_threshold = tmin;
  return res;
}

json ContainmentReport::to_json() const {
  json f = json::array();
  for (const auto& r : failures) {
    json missed = json::array();
    for (Vertex v : r.missed) missed.push_back(v);
    f.push_back({{"x", r.x}, {"z", r.z}, {"sampled", r.sampled}, {"missed", missed}});
  }
  return json{{"statement", "geodesic-containment"},
              {"pass", pass},
              {"minimal_empirical_Kprime", minimal_empirical_Kprime},
              {"pairs_checked", pairs_checked},
              {"sampled_pairs", sampled_pairs},
              {"failures", f}};
}

ContainmentReport check_geodesic_containment_all(const ModifiedDistances& d,
                                                 const CoreParams& params,
                                                 const ProjectionComplex& c) {
  ContainmentReport rep;
  const auto n = static_cast<Vertex>(c.size());
  for (Vertex x = 0; x < n; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
      ContainmentResult r = check_geodesic_containment(d, params, c, x, z);
      ++rep.pairs_checked;
      if (r.sampled) ++rep.sampled_pairs;
      rep.minimal_empirical_Kprime =
          std::max(rep.minimal_empirical_Kprime, r.minimal_threshold);
      if (!r.pass) {
        rep.pass = false;
        if (rep.failures.size() < 16) rep.failures.push_back(std::move(r));
      }
    }
  return rep;
}

// ------------------------------------------------------------- separation

namespace {

/// Is x disconnected from z after removing `removed`?
bool separates(const SimpleGraph& g, const std::vector<bool>& removed, Vertex x, Vertex z) {
  std::vector<bool> seen(g.size(), false);
  std::deque<Vertex> queue{x};
  seen[x] = true;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    if (u == z) return false;
    for (Vertex v : g.adj[u])
      if (!seen[v] && !removed[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
  }
  return true;
}

}  // namespace

json SeparationReport::to_json() const {
  json f = json::array();
  for (const auto& r : failures) f.push_back({{"x", r.x}, {"z", r.z}, {"y", r.y}});
  return json{{"statement", "midpath-separation"},
              {"all_pass", all_pass},
              {"checked", checked},
              {"failures", f}};
}

SeparationReport check_midpath_separation(const ModifiedDistances& d,
                                          const CoreParams& params,
                                          const ProjectionComplex& c, Vertex x, Vertex z) {
  SeparationReport rep;
  const auto n = static_cast<Vertex>(c.size());
  for (Vertex y : large_set(d, x, z, c.K())) {
    SeparationResult r;
    r.x = x;
    r.z = z;
    r.y = y;
    ++rep.checked;
    if (c.graph_distance(x, y) <= 2 || c.graph_distance(z, y) <= 2) {
      r.trivial = true;  // any path meets B(y,2) at an endpoint
    } else {
      std::vector<bool> removed(n, false);
      for (Vertex v = 0; v < n; ++v)
        if (c.graph_distance(y, v) <= 2) removed[v] = true;
      removed[x] = removed[z] = false;
      r.pass = separates(c.graph(), removed, x, z);
    }
    if (!r.pass) {
      rep.all_pass = false;
      rep.failures.push_back(r);
    }
  }
  (void)params;
  return rep;
}

SeparationReport check_midpath_separation_all(const ModifiedDistances& d,
                                              const CoreParams& params,
                                              const ProjectionComplex& c) {
  SeparationReport rep;
  const auto n = static_cast<Vertex>(c.size());
  for (Vertex x = 0; x < n; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
      SeparationReport one = check_midpath_separation(d, params, c, x, z);
      rep.checked += one.checked;
      if (!one.all_pass) {
        rep.all_pass = false;
        for (auto& f : one.failures)
          if (rep.failures.size() < 16) rep.failures.push_back(f);
      }
    }
  return rep;
}

// -------------------------------------------------------------- bottleneck

json BottleneckReport::to_json() const {
  json w = json::array();
  for (const auto& p : witness_pairs) w.push_back({p.first, p.second});
  return json{{"statement", "bottleneck"},
              {"delta", delta},
              {"pairs_checked", pairs_checked},
              {"witness_pairs", w}};
}

BottleneckReport bottleneck_delta(const SimpleGraph& g) {
  const auto n = static_cast<Vertex>(g.size());
  std::vector<std::vector<unsigned>> dist(n);
  for (Vertex v = 0; v < n; ++v) dist[v] = bfs_distances(g, v);

  BottleneckReport rep;
  for (Vertex x = 0; x < n; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
      const unsigned dxz = dist[x][z];
      if (dxz == kUnreachable || dxz < 2) continue;
      ++rep.pairs_checked;
      std::vector<Vertex> mids;
      for (Vertex y = 0; y < n; ++y)
        if (dist[x][y] + dist[y][z] == dxz &&
            (dist[x][y] > dist[y][z] ? dist[x][y] - dist[y][z]
                                     : dist[y][z] - dist[x][y]) <= 1)
          mids.push_back(y);
      unsigned best = kUnreachable;
      for (unsigned delta = 0; delta < n && best == kUnreachable; ++delta) {
        for (Vertex y : mids) {
          std::vector<bool> removed(n, false);
          for (Vertex v = 0; v < n; ++v)
            if (dist[y][v] <= delta) removed[v] = true;
          removed[x] = removed[z] = false;
          if (separates(g, removed, x, z)) {
            best = delta;
            break;
          }
        }
      }
      if (best == kUnreachable) best = static_cast<unsigned>(n);  // should not happen
      if (best > rep.delta) {
        rep.delta = best;
        rep.witness_pairs.clear();
      }
      if (best == rep.delta && rep.witness_pairs.size() < 8)
        rep.witness_pairs.emplace_back(x, z);
    }
  return rep;
}

// --------------------------------------------------------------- diameter

json DiameterReport::to_json() const {
  return json{{"diameter", diameter}, {"eccentricity_histogram", eccentricity_histogram}};
}

DiameterReport complex_diameter(const ProjectionComplex& c) {
  DiameterReport rep;
  const auto n = static_cast<Vertex>(c.size());
  for (Vertex v = 0; v < n; ++v) rep.diameter = std::max(rep.diameter, c.eccentricity(v));
  rep.eccentricity_histogram.assign(rep.diameter + 1, 0);
  for (Vertex v = 0; v < n; ++v) ++rep.eccentricity_histogram[c.eccentricity(v)];
  return rep;
}

std::string to_dot(const ProjectionComplex& c, const ProjectionSystem& sys) {
  std::ostringstream os;
  os << "graph projection_complex {\n";
  const char* mode = c.mode() == MetricMode::modified ? "modified" : "raw";
  for (Vertex v = 0; v < c.size(); ++v)
    os << "  n" << v << " [label=\"" << sys.label(v) << "\"];\n";
  for (Vertex v = 0; v < c.size(); ++v)
    for (Vertex w : c.graph().adj[v])
      if (v < w) os << "  n" << v << " -- n" << w << " [mode=" << mode << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace projcx
