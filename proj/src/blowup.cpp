#include "projcx/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace projcx {

namespace {
constexpr double kDistEps = 1e-9;
}

BlowupSpace BlowupSpace::build(std::shared_ptr<const AnchoredSystem> sys,
                               const ModifiedDistances& d, const CoreParams& params,
                               const ProjectionComplex& complex) {
  const auto n = static_cast<Vertex>(sys->size());
  if (n == 0) throw std::invalid_argument("build_blowup: empty system");
  if (complex.mode() != MetricMode::modified)
    throw std::invalid_argument("build_blowup: complex must use the modified metric");

  BlowupSpace b;
  b.sys_ = sys;
  b.complex_ = &complex;
  b.params_ = params;
  b.L_ = params.L;

  const long margin = static_cast<long>(std::ceil(2.0 * params.K));
  b.spaces_.resize(n);
  std::size_t next = 0;
  for (Vertex y = 0; y < n; ++y) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (Vertex x = 0; x < n; ++x) {
      if (x == y) continue;
      const CoordInterval a = sys->anchor(y, x);
      if (a.diameter() >= sys->xi())
        throw std::logic_error("build_blowup: anchor diameter must stay below xi");
      lo = first ? a.lo : std::min(lo, a.lo);
      hi = first ? a.hi : std::max(hi, a.hi);
      first = false;
    }
    VertexSpace& vs = b.spaces_[y];
    vs.owner = y;
    vs.lo = static_cast<long>(std::floor(lo)) - margin;
    vs.hi = static_cast<long>(std::ceil(hi)) + margin;
    if (n == 1) vs.lo = -margin, vs.hi = margin;
    vs.base = next;
    next += vs.node_count();
  }

  b.node_space_.resize(next);
  b.node_coord_.resize(next);
  b.adj_.resize(next);
  for (Vertex y = 0; y < n; ++y) {
    const VertexSpace& vs = b.spaces_[y];
    for (long c = vs.lo; c <= vs.hi; ++c) {
      const std::size_t id = vs.base + static_cast<std::size_t>(c - vs.lo);
      b.node_space_[id] = y;
      b.node_coord_[id] = c;
      if (c < vs.hi) {
        const std::size_t nxt = id + 1;
        b.adj_[id].emplace_back(static_cast<std::uint32_t>(nxt), 1.0);
        b.adj_[nxt].emplace_back(static_cast<std::uint32_t>(id), 1.0);
      }
    }
  }

  auto anchor_range = [&](Vertex y, Vertex x) -> std::pair<long, long> {
    const CoordInterval a = sys->anchor(y, x);
    const long alo = std::lround(a.lo), ahi = std::lround(a.hi);
    const VertexSpace& vs = b.spaces_[y];
    if (alo < vs.lo || ahi > vs.hi)
      throw std::logic_error("build_blowup: anchor outside truncation window");
    return {alo, ahi};
  };

  for (Vertex x = 0; x < n; ++x)
    for (Vertex z : complex.graph().adj[x]) {
      if (z <= x) continue;
      const auto ax = anchor_range(x, z);
      const auto az = anchor_range(z, x);
      b.spaces_[x].anchors[z] = ax;
      b.spaces_[z].anchors[x] = az;
      for (long cx = ax.first; cx <= ax.second; ++cx)
        for (long cz = az.first; cz <= az.second; ++cz) {
          const std::size_t u = b.node_id({x, cx});
          const std::size_t v = b.node_id({z, cz});
          b.adj_[u].emplace_back(static_cast<std::uint32_t>(v), b.L_);
          b.adj_[v].emplace_back(static_cast<std::uint32_t>(u), b.L_);
          ++b.bridge_count_;
        }
    }

  // bridge bundles mirror the complex edges, so a connected complex must
  // give a connected blowup
  if (!b.adj_.empty()) {
    std::vector<bool> seen(b.adj_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : b.adj_[u]) {
        (void)w;
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (complex.connected() && reached != b.adj_.size())
      throw std::logic_error("build_blowup: disconnected blowup over a connected complex");
  }

  (void)d;
  return b;
}

std::size_t BlowupSpace::node_id(const PointRef& p) const {
  const VertexSpace& vs = spaces_.at(p.space);
  if (p.coord < vs.lo || p.coord > vs.hi)
    throw std::out_of_range("PointRef outside truncation window");
  return vs.base + static_cast<std::size_t>(p.coord - vs.lo);
}

PointRef BlowupSpace::point_of(std::size_t node) const {
  return {node_space_.at(node), node_coord_.at(node)};
}

std::vector<double> BlowupSpace::distances_from_node(std::size_t source) const {
  std::vector<double> dist(adj_.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0;
  heap.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u] + kDistEps) continue;
    for (const auto& [v, w] : adj_[u])
      if (du + w < dist[v] - kDistEps) {
        dist[v] = du + w;
        heap.emplace(dist[v], v);
      }
  }
  return dist;
}

std::vector<double> BlowupSpace::distances_from(const PointRef& p) const {
  return distances_from_node(node_id(p));
}

double BlowupSpace::distance(const PointRef& p, const PointRef& q) const {
  if (p.space == q.space) {
    // Spaces are totally geodesically embedded; still compute over the whole
    // graph so the caller can detect if that ever fails.
    if (p.coord == q.coord) return 0.0;
  }
  return distances_from(p)[node_id(q)];
}

double BlowupSpace::extended_dY(const ModifiedDistances& d, Vertex y, const PointRef& x,
                                const PointRef& z) const {
  const Vertex X = x.space, Z = z.space;
  if (y != X && y != Z) {
    if (X == Z) return 0.0;  // both points inside one other space: no large view
    return d(y, X, Z);
  }
  if (X == Z) return std::abs(static_cast<double>(x.coord - z.coord));
  if (y == X) {
    const CoordInterval a = sys_->anchor(X, Z);
    const double u = static_cast<double>(x.coord);
    return std::max(a.hi, u) - std::min(a.lo, u);
  }
  const CoordInterval a = sys_->anchor(Z, X);
  const double v = static_cast<double>(z.coord);
  return std::max(a.hi, v) - std::min(a.lo, v);
}

std::vector<Vertex> BlowupSpace::extended_large_set(const ModifiedDistances& d,
                                                    const PointRef& x, const PointRef& z,
                                                    double t) const {
  std::vector<Vertex> out;
  for (Vertex y = 0; y < sys_->size(); ++y)
    if (extended_dY(d, y, x, z) > t) out.push_back(y);
  return out;
}

std::string BlowupSpace::edge_list_csv() const {
  std::ostringstream os;
  os << "src,dst,weight,kind\n";
  for (std::size_t u = 0; u < adj_.size(); ++u)
    for (const auto& [v, w] : adj_[u]) {
      if (v < u) continue;
      const PointRef pu = point_of(u), pv = point_of(static_cast<std::size_t>(v));
      os << sys_->label(pu.space) << ":" << pu.coord << "," << sys_->label(pv.space) << ":"
         << pv.coord << "," << w << "," << (pu.space == pv.space ? "internal" : "bridge")
         << "\n";
    }
  return os.str();
}

// ---------------------------------------------------------------- queries

EmbeddingReport check_isometric_embedding(const BlowupSpace& b, Vertex y) {
  EmbeddingReport rep;
  rep.space = y;
  const VertexSpace& vs = b.spaces().at(y);
  for (long c = vs.lo; c <= vs.hi; ++c) {
    const auto dist = b.distances_from({y, c});
    for (long c2 = c + 1; c2 <= vs.hi; ++c2) {
      const double internal = static_cast<double>(c2 - c);
      const double defect = internal - dist[b.node_id({y, c2})];
      ++rep.pairs_checked;
      rep.max_defect = std::max(rep.max_defect, std::abs(defect));
      if (std::abs(defect) > kDistEps) rep.pass = false;
    }
  }
  return rep;
}

namespace {

long anchor_rep_node(const BlowupSpace& b, Vertex y, Vertex toward) {
  const auto& anchors = b.spaces().at(y).anchors;
  const auto it = anchors.find(toward);
  if (it == anchors.end())
    throw std::logic_error("standard_path: consecutive interval elements not adjacent");
  return (it->second.first + it->second.second) / 2;
}

void append_internal_run(std::vector<PointRef>& nodes, Vertex space, long from, long to) {
  const long step = from <= to ? 1 : -1;
  for (long c = from; c != to; c += step) nodes.push_back({space, c + step});
}

}  // namespace

StandardPath standard_path(const BlowupSpace& b, const ModifiedDistances& d,
                           const PointRef& x, const PointRef& z) {
  StandardPath sp;
  const CoreParams& params = b.params();
  sp.nodes.push_back(x);

  if (x.space == z.space) {
    append_internal_run(sp.nodes, x.space, x.coord, z.coord);
    sp.length = std::abs(static_cast<double>(x.coord - z.coord));
  } else {
    const OrderedInterval oi = order_interval(d, x.space, z.space, params.K);
    const auto& e = oi.elements;
    long cur = x.coord;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      const long exit = anchor_rep_node(b, e[i], e[i + 1]);
      append_internal_run(sp.nodes, e[i], cur, exit);
      sp.length += std::abs(static_cast<double>(exit - cur));
      const long entry = anchor_rep_node(b, e[i + 1], e[i]);
      sp.nodes.push_back({e[i + 1], entry});
      sp.length += b.bridge_length();
      cur = entry;
    }
    append_internal_run(sp.nodes, z.space, cur, z.coord);
    sp.length += std::abs(static_cast<double>(cur - z.coord));
  }

  double sum = 0;
  for (Vertex y : b.extended_large_set(d, x, z, params.K)) sum += b.extended_dY(d, y, x, z);
  sp.upper_bound = 6.0 * params.K + 4.0 * sum;
  sp.within_bound = sp.length <= sp.upper_bound + kDistEps;
  return sp;
}

SandwichResult distance_formula_bounds(const BlowupSpace& b, const ModifiedDistances& d,
                                       const PointRef& x, const PointRef& z) {
  const CoreParams& params = b.params();
  SandwichResult r;
  double sum_kp = 0;
  for (Vertex y : b.extended_large_set(d, x, z, params.Kprime))
    sum_kp += b.extended_dY(d, y, x, z);
  double sum_k = 0;
  for (Vertex y : b.extended_large_set(d, x, z, params.K))
    sum_k += b.extended_dY(d, y, x, z);
  r.lower = 0.5 * sum_kp;
  r.upper = 6.0 * params.K + 4.0 * sum_k;
  r.actual = b.distance(x, z);
  r.ok = r.lower <= r.actual + kDistEps && r.actual <= r.upper + kDistEps;
  return r;
}

NearestPointResult nearest_point_check(const BlowupSpace& b, const ModifiedDistances& d,
                                       const PointRef& x, Vertex z_space) {
  if (x.space == z_space)
    throw std::invalid_argument("nearest_point_check: x already lies in C(Z)");
  const CoreParams& params = b.params();
  const auto dist = b.distances_from(x);
  const VertexSpace& vs = b.spaces().at(z_space);
  NearestPointResult res;
  res.distance = std::numeric_limits<double>::infinity();
  for (long c = vs.lo; c <= vs.hi; ++c) {
    const double dv = dist[b.node_id({z_space, c})];
    if (dv < res.distance - kDistEps) {
      res.distance = dv;
      res.nearest = {z_space, c};
    }
  }
  res.projection_defect = b.extended_dY(d, z_space, x, res.nearest);
  res.within_bound = res.projection_defect <= 2.0 * params.K + kDistEps;
  res.flagged = res.projection_defect > 2.0 * params.K + 20.0 * params.xi;
  return res;
}

namespace {

struct DagContext {
  const BlowupSpace* b;
  const std::vector<double>* dist;  // from x
  std::size_t x_node, z_node;
};

std::vector<std::uint32_t> shortest_predecessors(const DagContext& ctx, std::size_t v) {
  std::vector<std::uint32_t> preds;
  for (const auto& [u, w] : ctx.b->adjacency()[v])
    if (std::abs((*ctx.dist)[u] + w - (*ctx.dist)[v]) <= kDistEps) preds.push_back(u);
  return preds;
}

/// One deterministic shortest path from x to z (lowest-id predecessor).
std::vector<std::size_t> extract_path(const DagContext& ctx) {
  std::vector<std::size_t> rev{ctx.z_node};
  std::size_t cur = ctx.z_node;
  while (cur != ctx.x_node) {
    auto preds = shortest_predecessors(ctx, cur);
    if (preds.empty()) throw std::logic_error("trace: broken shortest-path DAG");
    cur = *std::min_element(preds.begin(), preds.end());
    rev.push_back(cur);
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

struct VisitCheck {
  bool contiguous = true;
  bool covers_forced = true;
  bool in_order = true;
  double max_defect = 0;
  std::vector<TraceVisit> visits;
};

VisitCheck check_path(const BlowupSpace& b, const ModifiedDistances& d, const PointRef& x,
                      const PointRef& z, const std::vector<std::size_t>& path,
                      const std::vector<Vertex>& forced,
                      const std::vector<std::size_t>& order_pos) {
  VisitCheck vc;
  for (std::size_t id : path) {
    const PointRef p = b.point_of(id);
    if (vc.visits.empty() || vc.visits.back().space != p.space)
      vc.visits.push_back({p.space, p.coord, p.coord});
    else
      vc.visits.back().exit = p.coord;
  }
  std::vector<bool> seen(b.system().size(), false);
  for (const auto& v : vc.visits) {
    if (seen[v.space]) vc.contiguous = false;
    seen[v.space] = true;
  }
  std::size_t last_pos = 0;
  bool have_last = false;
  for (const auto& v : vc.visits) {
    const auto it = std::find(forced.begin(), forced.end(), v.space);
    if (it == forced.end()) continue;
    const std::size_t pos = order_pos[static_cast<std::size_t>(it - forced.begin())];
    if (have_last && pos < last_pos) vc.in_order = false;
    last_pos = pos;
    have_last = true;
  }
  for (std::size_t i = 0; i < forced.size(); ++i) {
    const Vertex y = forced[i];
    if (!seen[y]) {
      vc.covers_forced = false;
      continue;
    }
    for (const auto& v : vc.visits)
      if (v.space == y) {
        vc.max_defect = std::max(vc.max_defect, b.extended_dY(d, y, x, {y, v.entry}));
        vc.max_defect = std::max(vc.max_defect, b.extended_dY(d, y, z, {y, v.exit}));
        break;
      }
  }
  return vc;
}

}  // namespace

TraceReport geodesic_trace(const BlowupSpace& b, const ModifiedDistances& d,
                           const PointRef& x, const PointRef& z, std::size_t enumerate_cap) {
  const CoreParams& params = b.params();
  TraceReport rep;
  const auto dist = b.distances_from(x);
  DagContext ctx{&b, &dist, b.node_id(x), b.node_id(z)};
  rep.length = dist[ctx.z_node];

  // Forced vertices and their positions in the canonical order.
  const std::vector<Vertex> forced = b.extended_large_set(d, x, z, params.Kprime);
  std::vector<std::size_t> order_pos(forced.size(), 0);
  if (x.space != z.space) {
    const OrderedInterval oi = order_interval(d, x.space, z.space, params.K);
    for (std::size_t i = 0; i < forced.size(); ++i) {
      const auto it = std::find(oi.elements.begin(), oi.elements.end(), forced[i]);
      order_pos[i] = it == oi.elements.end()
                         ? oi.elements.size()
                         : static_cast<std::size_t>(it - oi.elements.begin());
    }
  }

  const auto main_path = extract_path(ctx);
  VisitCheck vc = check_path(b, d, x, z, main_path, forced, order_pos);
  rep.visits = vc.visits;
  rep.contiguous = vc.contiguous;
  rep.covers_forced = vc.covers_forced;
  rep.in_order = vc.in_order;
  rep.max_endpoint_defect = vc.max_defect;

  // Count geodesics through the DAG; if few enough, check them all.
  std::vector<double> count(b.node_count(), -1.0);
  std::vector<std::size_t> order;
  for (std::size_t v = 0; v < b.node_count(); ++v)
    if (std::isfinite(dist[v])) order.push_back(v);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t c) { return dist[a] < dist[c]; });
  for (std::size_t v : order) {
    if (v == ctx.x_node) {
      count[v] = 1;
      continue;
    }
    double s = 0;
    for (std::uint32_t u : shortest_predecessors(ctx, v)) s += count[u];
    count[v] = std::min(s, 1e18);
  }
  rep.geodesic_count = std::max(0.0, count[ctx.z_node]);

  if (rep.geodesic_count > 1.5 && rep.geodesic_count <= static_cast<double>(enumerate_cap)) {
    std::vector<std::vector<std::size_t>> stack{{ctx.z_node}};
    while (!stack.empty()) {
      auto cur = std::move(stack.back());
      stack.pop_back();
      if (cur.back() == ctx.x_node) {
        std::vector<std::size_t> fwd(cur.rbegin(), cur.rend());
        VisitCheck one = check_path(b, d, x, z, fwd, forced, order_pos);
        rep.contiguous = rep.contiguous && one.contiguous;
        rep.covers_forced = rep.covers_forced && one.covers_forced;
        rep.in_order = rep.in_order && one.in_order;
        rep.max_endpoint_defect = std::max(rep.max_endpoint_defect, one.max_defect);
        ++rep.enumerated;
        continue;
      }
      for (std::uint32_t u : shortest_predecessors(ctx, cur.back())) {
        auto next = cur;
        next.push_back(u);
        stack.push_back(std::move(next));
      }
    }
  }

  rep.defects_flagged = rep.max_endpoint_defect > params.Kprime + 10.0 * params.xi;
  return rep;
}

double hausdorff_distance(const BlowupSpace& b, const std::vector<PointRef>& path_a,
                          const std::vector<PointRef>& path_b) {
  if (path_a.empty() || path_b.empty())
    throw std::invalid_argument("hausdorff_distance: empty path");
  auto one_sided = [&](const std::vector<PointRef>& from, const std::vector<PointRef>& to) {
    double worst = 0;
    for (const PointRef& p : from) {
      const auto dist = b.distances_from(p);
      double best = std::numeric_limits<double>::infinity();
      for (const PointRef& q : to) best = std::min(best, dist[b.node_id(q)]);
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(path_a, path_b), one_sided(path_b, path_a));
}

json DeltaEstimate::to_json() const {
  return json{{"delta_4pt", delta_4pt},
              {"bottleneck_delta", bottleneck_delta},
              {"seed", seed},
              {"quadruples", quadruples},
              {"pairs", pairs}};
}

DeltaEstimate estimate_delta(const BlowupSpace& b, std::size_t sample_count,
                             std::uint64_t seed) {
  DeltaEstimate est;
  est.seed = seed;
  SplitMix64 rng(seed);
  const std::size_t nodes = b.node_count();

  const std::size_t pool_size = std::min<std::size_t>(std::max<std::size_t>(sample_count / 8, 8), 40);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(rng.below(nodes));
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::vector<std::vector<double>> pd;
  for (std::size_t s : pool) pd.push_back(b.distances_from_node(s));

  const std::size_t m = pool.size();
  for (std::size_t q = 0; q < sample_count && m >= 4; ++q) {
    std::size_t i = rng.below(m), j = rng.below(m), k = rng.below(m), l = rng.below(m);
    if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
    const double s1 = pd[i][pool[j]] + pd[k][pool[l]];
    const double s2 = pd[i][pool[k]] + pd[j][pool[l]];
    const double s3 = pd[i][pool[l]] + pd[j][pool[k]];
    double a = s1, bb = s2, c = s3;
    if (a < bb) std::swap(a, bb);
    if (bb < c) std::swap(bb, c);
    if (a < bb) std::swap(a, bb);
    est.delta_4pt = std::max(est.delta_4pt, (a - bb) / 2.0);
    ++est.quadruples;
  }

  // Weighted ball-separation: midpoint slack is one bridge length.
  const double slack = b.bridge_length();
  const std::size_t pair_budget = std::min<std::size_t>(std::max<std::size_t>(sample_count / 16, 4), 24);
  for (std::size_t t = 0; t < pair_budget; ++t) {
    const std::size_t xs = pool[rng.below(m)];
    const std::size_t zs = pool[rng.below(m)];
    if (xs == zs) continue;
    ++est.pairs;
    const auto dx = b.distances_from_node(xs);
    const auto dz = b.distances_from_node(zs);
    const double dxz = dx[zs];
    if (dxz < 2.0) continue;
    struct Mid {
      std::size_t node;
      double skew;
    };
    std::vector<Mid> mids;
    for (std::size_t v = 0; v < nodes; ++v)
      if (std::abs(dx[v] + dz[v] - dxz) <= kDistEps &&
          std::abs(dx[v] - dz[v]) <= slack + kDistEps)
        mids.push_back({v, std::abs(dx[v] - dz[v])});
    std::sort(mids.begin(), mids.end(), [](const Mid& a, const Mid& c) {
      return a.skew < c.skew || (a.skew == c.skew && a.node < c.node);
    });
    if (mids.size() > 8) mids.resize(8);

    double pair_best = std::numeric_limits<double>::infinity();
    for (const Mid& mid : mids) {
      const auto dm = b.distances_from_node(mid.node);
      std::vector<double> radii(dm);
      std::sort(radii.begin(), radii.end());
      // smallest radius whose ball (minus the endpoints) separates
      std::size_t lo = 0, hi = radii.size() - 1, ans = radii.size();
      auto separated_at = [&](double r) {
        std::vector<bool> removed(nodes, false);
        for (std::size_t v = 0; v < nodes; ++v)
          if (dm[v] <= r + kDistEps) removed[v] = true;
        removed[xs] = removed[zs] = false;
        std::vector<bool> seen(nodes, false);
        std::vector<std::size_t> stack{xs};
        seen[xs] = true;
        while (!stack.empty()) {
          const std::size_t u = stack.back();
          stack.pop_back();
          if (u == zs) return false;
          for (const auto& [v, w] : b.adjacency()[u]) {
            (void)w;
            if (!seen[v] && !removed[v]) {
              seen[v] = true;
              stack.push_back(v);
            }
          }
        }
        return true;
      };
      while (lo <= hi) {
        const std::size_t midpt = (lo + hi) / 2;
        if (separated_at(radii[midpt])) {
          ans = midpt;
          if (midpt == 0) break;
          hi = midpt - 1;
        } else {
          lo = midpt + 1;
        }
      }
      if (ans < radii.size()) pair_best = std::min(pair_best, radii[ans]);
    }
    if (std::isfinite(pair_best))
      est.bottleneck_delta = std::max(est.bottleneck_delta, pair_best);
  }
  return est;
}

}  // namespace projcx
