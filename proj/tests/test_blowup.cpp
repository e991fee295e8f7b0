#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "projcx/blowup.hpp"
#include "projcx/system.hpp"

using namespace projcx;

namespace {

struct Fixture {
  std::shared_ptr<AnchoredSystem> sys;
  std::unique_ptr<ModifiedDistances> d;
  CoreParams params;
  std::unique_ptr<ProjectionComplex> complex;
  std::unique_ptr<BlowupSpace> blowup;
};

Fixture make_fixture(std::shared_ptr<AnchoredSystem> sys) {
  Fixture f;
  f.sys = std::move(sys);
  f.d = std::make_unique<ModifiedDistances>(f.sys);
  f.params = CoreParams::defaults(f.sys->xi());
  f.complex = std::make_unique<ProjectionComplex>(
      ProjectionComplex::build(*f.d, f.params, f.params.K, MetricMode::modified));
  f.blowup = std::make_unique<BlowupSpace>(
      BlowupSpace::build(f.sys, *f.d, f.params, *f.complex));
  return f;
}

Fixture chain_fixture(int n = 8, double big = 70.0) {
  return make_fixture(make_synthetic_chain(n, big));
}

/// Two-space toy: anchors at coordinate 0 on both sides, K = 20, xi = 1.
Fixture toy_fixture() {
  std::vector<CoordInterval> anchors(4);
  anchors[0 * 2 + 1] = {0.0, 0.0};  // pi_A(B)
  anchors[1 * 2 + 0] = {0.0, 0.0};  // pi_B(A)
  auto sys = std::make_shared<AnchoredSystem>(std::vector<std::string>{"A", "B"}, anchors,
                                              1.0, "toy");
  Fixture f;
  f.sys = std::move(sys);
  f.d = std::make_unique<ModifiedDistances>(f.sys);
  f.params = CoreParams::defaults(1.0);
  f.params.K = 20.0;
  f.params.Kprime = 5 * f.params.K + 30.0;
  f.params.L = f.params.K + 2.0 + 1.0;  // 23
  f.params.validate();
  f.complex = std::make_unique<ProjectionComplex>(
      ProjectionComplex::build(*f.d, f.params, f.params.K, MetricMode::modified));
  f.blowup = std::make_unique<BlowupSpace>(
      BlowupSpace::build(f.sys, *f.d, f.params, *f.complex));
  return f;
}

}  // namespace

TEST_CASE("toy blowup: two path graphs and one bridge") {
  Fixture f = toy_fixture();
  CHECK(f.blowup->spaces().size() == 2);
  CHECK(f.blowup->bridge_count() == 1);
  CHECK(f.blowup->bridge_length() == doctest::Approx(23.0));

  // route arithmetic: 7 + L + 8 = 38
  const double dist = f.blowup->distance({0, 7}, {1, -8});
  CHECK(dist == doctest::Approx(7.0 + 23.0 + 8.0));
  CHECK(f.blowup->distance({0, 3}, {0, 3}) == doctest::Approx(0.0));
  CHECK(f.blowup->distance({0, -2}, {0, 5}) == doctest::Approx(7.0));
}

TEST_CASE("empty system is rejected") {
  CHECK_THROWS_AS(make_synthetic_chain(0, 10.0), std::invalid_argument);
}

TEST_CASE("blowup distances match an independent shortest-path oracle") {
  Fixture f = chain_fixture(5, 40.0);
  const auto& adj = f.blowup->adjacency();
  SplitMix64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t src = rng.below(f.blowup->node_count());
    const auto mine = f.blowup->distances_from_node(src);
    const auto ref = oracles::dijkstra_reference(adj, src);
    for (std::size_t v = 0; v < mine.size(); ++v)
      CHECK(mine[v] == doctest::Approx(ref[v]).epsilon(1e-9));
  }
}

TEST_CASE("every vertex space is totally geodesically embedded") {
  Fixture f = chain_fixture(6, 50.0);
  for (Vertex y = 0; y < f.sys->size(); ++y) {
    const auto rep = check_isometric_embedding(*f.blowup, y);
    CHECK(rep.pass);
    CHECK(rep.max_defect == doctest::Approx(0.0));
  }
}

TEST_CASE("coarse lower bound: blowup distance dominates every projection view") {
  Fixture f = chain_fixture(6, 50.0);
  SplitMix64 rng(5);
  const auto& spaces = f.blowup->spaces();
  for (int trial = 0; trial < 40; ++trial) {
    const Vertex xs = static_cast<Vertex>(rng.below(spaces.size()));
    const Vertex zs = static_cast<Vertex>(rng.below(spaces.size()));
    const PointRef x{xs, static_cast<long>(spaces[xs].lo +
                                           rng.below(spaces[xs].node_count()))};
    const PointRef z{zs, static_cast<long>(spaces[zs].lo +
                                           rng.below(spaces[zs].node_count()))};
    const double dist = f.blowup->distance(x, z);
    for (Vertex y = 0; y < f.sys->size(); ++y) {
      const double view = f.blowup->extended_dY(*f.d, y, x, z);
      if (xs == zs && zs == y) {
        CHECK(dist == doctest::Approx(view));
      } else if (xs != y || zs != y) {
        // rounding anchors to the mesh costs at most 1 per endpoint
        CHECK(dist >= view - 2.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("coarse lower bound holds exhaustively on a small chain") {
  Fixture f = chain_fixture(5, 40.0);
  const std::size_t nodes = f.blowup->node_count();
  REQUIRE(nodes < 2000);
  for (std::size_t u = 0; u < nodes; ++u) {
    const auto dist = f.blowup->distances_from_node(u);
    const PointRef x = f.blowup->point_of(u);
    for (std::size_t v = u + 1; v < nodes; ++v) {
      const PointRef z = f.blowup->point_of(v);
      for (Vertex y = 0; y < f.sys->size(); ++y) {
        if ((x.space == y) != (z.space == y)) continue;  // mixed case has its own slack
        const double view = f.blowup->extended_dY(*f.d, y, x, z);
        // anchors round to the unit mesh: at most one unit per endpoint
        REQUIRE(dist[v] >= view - 2.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("standard path on the chain") {
  Fixture f = chain_fixture(8, 70.0);
  const auto& s0 = f.blowup->spaces()[0];
  const auto& s7 = f.blowup->spaces()[7];
  const PointRef x{0, (s0.lo + s0.hi) / 2}, z{7, (s7.lo + s7.hi) / 2};
  const StandardPath sp = standard_path(*f.blowup, *f.d, x, z);
  CHECK(sp.within_bound);
  CHECK(sp.length >= f.blowup->distance(x, z) - 1e-9);

  // same space: internal geodesic
  const StandardPath internal = standard_path(*f.blowup, *f.d, {3, -4}, {3, 9});
  CHECK(internal.length == doctest::Approx(13.0));
  CHECK(internal.nodes.size() == 14);

  // adjacent spaces: legs plus one bridge
  const StandardPath adj = standard_path(*f.blowup, *f.d, {2, 5}, {3, -5});
  const double leg_sum = adj.length - f.blowup->bridge_length();
  CHECK(leg_sum >= 0);
  CHECK(adj.within_bound);
}

TEST_CASE("distance formula sandwich on the chain, nonvacuous") {
  Fixture f = chain_fixture(8, 70.0);
  SplitMix64 rng(13);
  const auto& spaces = f.blowup->spaces();
  bool nonvacuous = false;
  for (int trial = 0; trial < 60; ++trial) {
    const Vertex xs = static_cast<Vertex>(rng.below(spaces.size()));
    const Vertex zs = static_cast<Vertex>(rng.below(spaces.size()));
    const PointRef x{xs, static_cast<long>(spaces[xs].lo +
                                           rng.below(spaces[xs].node_count()))};
    const PointRef z{zs, static_cast<long>(spaces[zs].lo +
                                           rng.below(spaces[zs].node_count()))};
    const SandwichResult r = distance_formula_bounds(*f.blowup, *f.d, x, z);
    CHECK(r.ok);
    if (r.lower > 0) nonvacuous = true;
  }
  CHECK(nonvacuous);
}

TEST_CASE("nearest point lands by the anchor on a neighbor") {
  Fixture f = chain_fixture(8, 70.0);
  // x in space 2 at its anchor toward 3; nearest point of space 3
  const auto& anchors = f.blowup->spaces()[2].anchors;
  REQUIRE(anchors.count(3) == 1);
  const PointRef x{2, anchors.at(3).first};
  const NearestPointResult res = nearest_point_check(*f.blowup, *f.d, x, 3);
  CHECK(res.within_bound);
  CHECK_FALSE(res.flagged);
  const auto back = f.blowup->spaces()[3].anchors.at(2);
  CHECK(res.nearest.coord >= back.first - 1);
  CHECK(res.nearest.coord <= back.second + 1);

  CHECK_THROWS_AS(nearest_point_check(*f.blowup, *f.d, x, 2), std::invalid_argument);
}

TEST_CASE("toy nearest point: unique route lands on the anchor") {
  Fixture f = toy_fixture();
  const NearestPointResult res = nearest_point_check(*f.blowup, *f.d, {0, 7}, 1);
  CHECK(res.nearest.space == 1);
  CHECK(res.nearest.coord == 0);
  CHECK(res.distance == doctest::Approx(7.0 + 23.0));
  CHECK(res.within_bound);
}

TEST_CASE("geodesic trace visits every forced space in order") {
  Fixture f = chain_fixture(8, 70.0);
  const auto& s0 = f.blowup->spaces()[0];
  const auto& s7 = f.blowup->spaces()[7];
  const PointRef x{0, (s0.lo + s0.hi) / 2}, z{7, (s7.lo + s7.hi) / 2};
  const TraceReport rep = geodesic_trace(*f.blowup, *f.d, x, z);
  CHECK(rep.contiguous);
  CHECK(rep.covers_forced);
  CHECK(rep.in_order);
  CHECK_FALSE(rep.defects_flagged);
  REQUIRE(rep.visits.size() == 8);
  for (Vertex i = 0; i < 8; ++i) CHECK(rep.visits[i].space == i);

  // same-space pair: one visit, trivially contiguous
  const TraceReport same = geodesic_trace(*f.blowup, *f.d, {4, -3}, {4, 6});
  CHECK(same.visits.size() == 1);
  CHECK(same.contiguous);
  CHECK(same.length == doctest::Approx(9.0));
}

TEST_CASE("hausdorff distance basics and path comparison") {
  Fixture f = chain_fixture(6, 50.0);
  const auto& s0 = f.blowup->spaces()[0];
  const auto& s5 = f.blowup->spaces()[5];
  const PointRef x{0, (s0.lo + s0.hi) / 2}, z{5, (s5.lo + s5.hi) / 2};
  const StandardPath sp = standard_path(*f.blowup, *f.d, x, z);
  CHECK(hausdorff_distance(*f.blowup, sp.nodes, sp.nodes) == doctest::Approx(0.0));

  // path versus itself plus one detour node at distance r
  std::vector<PointRef> detour = sp.nodes;
  const VertexSpace& vs0 = f.blowup->spaces()[0];
  const PointRef far{0, vs0.lo};
  detour.push_back(far);
  const double r = [&] {
    double best = std::numeric_limits<double>::infinity();
    const auto dist = f.blowup->distances_from(far);
    for (const auto& p : sp.nodes) best = std::min(best, dist[f.blowup->node_id(p)]);
    return best;
  }();
  CHECK(hausdorff_distance(*f.blowup, sp.nodes, detour) == doctest::Approx(r));

  // a traced geodesic stays near the standard path
  const TraceReport tr = geodesic_trace(*f.blowup, *f.d, x, z);
  std::vector<PointRef> tr_nodes;
  for (const auto& v : tr.visits)
    for (long c = std::min(v.entry, v.exit); c <= std::max(v.entry, v.exit); ++c)
      tr_nodes.push_back({v.space, c});
  const double m = hausdorff_distance(*f.blowup, sp.nodes, tr_nodes);
  CHECK(m < 3.0 * f.params.L + 3.0 * f.params.K + 10.0 * f.params.xi);
}

TEST_CASE("delta estimates vanish on trees") {
  Fixture toy = toy_fixture();
  const DeltaEstimate est = estimate_delta(*toy.blowup, 400, 7);
  CHECK(est.delta_4pt == doctest::Approx(0.0));

  // single-space system: a bare path graph
  std::vector<CoordInterval> anchors(1);
  auto single = std::make_shared<AnchoredSystem>(std::vector<std::string>{"A"},
                                                 anchors, 1.0, "single");
  ModifiedDistances d(single);
  const CoreParams params = CoreParams::defaults(1.0);
  const auto complex = ProjectionComplex::build(d, params, params.K, MetricMode::modified);
  const auto blow = BlowupSpace::build(single, d, params, complex);
  CHECK(estimate_delta(blow, 300, 3).delta_4pt == doctest::Approx(0.0));
}

TEST_CASE("delta estimate is reproducible for a fixed seed") {
  Fixture f = chain_fixture(6, 50.0);
  const DeltaEstimate a = estimate_delta(*f.blowup, 200, 42);
  const DeltaEstimate b = estimate_delta(*f.blowup, 200, 42);
  CHECK(a.delta_4pt == doctest::Approx(b.delta_4pt));
  CHECK(a.bottleneck_delta == doctest::Approx(b.bottleneck_delta));
}

TEST_CASE("bridge orientation symmetry: reversed anchors give an isometric blowup") {
  const int n = 6;
  auto fwd_sys = make_synthetic_chain(n, 50.0);
  std::vector<CoordInterval> reversed(n * n);
  for (Vertex y = 0; y < n; ++y)
    for (Vertex x = 0; x < n; ++x) {
      if (x == y) continue;
      const CoordInterval a = fwd_sys->anchor(y, x);
      reversed[static_cast<std::size_t>(y) * n + x] = {-a.hi, -a.lo};
    }
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  auto rev_sys = std::make_shared<AnchoredSystem>(labels, reversed, fwd_sys->xi(),
                                                  "synthetic-chain-reversed");

  Fixture f = make_fixture(fwd_sys);
  Fixture g = make_fixture(rev_sys);
  SplitMix64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const Vertex xs = static_cast<Vertex>(rng.below(n));
    const Vertex zs = static_cast<Vertex>(rng.below(n));
    const auto& fx = f.blowup->spaces()[xs];
    const auto& fz = f.blowup->spaces()[zs];
    const long cx = fx.lo + static_cast<long>(rng.below(fx.node_count()));
    const long cz = fz.lo + static_cast<long>(rng.below(fz.node_count()));
    const double dist_f = f.blowup->distance({xs, cx}, {zs, cz});
    const double dist_g = g.blowup->distance({xs, -cx}, {zs, -cz});
    CHECK(dist_f == doctest::Approx(dist_g).epsilon(1e-9));
  }
}

TEST_CASE("edge list export") {
  Fixture f = toy_fixture();
  const std::string csv = f.blowup->edge_list_csv();
  CHECK(csv.rfind("src,dst,weight,kind\n", 0) == 0);
  CHECK(csv.find("bridge") != std::string::npos);
  CHECK(csv.find("internal") != std::string::npos);
}

TEST_CASE("schottky blowup: embedding, sandwich and bridge counting") {
  auto sch = make_schottky_instance(default_schottky_generators(), 2);
  auto sys = sch.inst.system;
  ModifiedDistances d(sys);
  const CoreParams params = CoreParams::defaults(sys->xi());
  const auto complex = ProjectionComplex::build(d, params, params.K, MetricMode::modified);
  const auto blow = BlowupSpace::build(sys, d, params, complex);

  // bridge count = sum over complex edges of |pi_X(Z)| x |pi_Z(X)|
  std::size_t expected = 0;
  for (Vertex x = 0; x < sys->size(); ++x)
    for (Vertex z : complex.graph().adj[x]) {
      if (z <= x) continue;
      const auto ax = blow.spaces()[x].anchors.at(z);
      const auto az = blow.spaces()[z].anchors.at(x);
      expected += static_cast<std::size_t>(ax.second - ax.first + 1) *
                  static_cast<std::size_t>(az.second - az.first + 1);
    }
  CHECK(blow.bridge_count() == expected);

  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Vertex xs = static_cast<Vertex>(rng.below(sys->size()));
    const Vertex zs = static_cast<Vertex>(rng.below(sys->size()));
    const auto& sx = blow.spaces()[xs];
    const auto& sz = blow.spaces()[zs];
    const PointRef x{xs, sx.lo + static_cast<long>(rng.below(sx.node_count()))};
    const PointRef z{zs, sz.lo + static_cast<long>(rng.below(sz.node_count()))};
    CHECK(distance_formula_bounds(blow, d, x, z).ok);
  }
  for (Vertex y : {Vertex(0), Vertex(5), Vertex(11)}) {
    CHECK(check_isometric_embedding(blow, y).pass);
  }
}
