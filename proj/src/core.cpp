#include "projcx/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projcx/complex.hpp"

namespace projcx {

namespace {

constexpr double kEps = 1e-12;  // fp guard on inequalities that are exact in reals

bool in_h_set(const ProjectionSystem& sys, double two_xi, Vertex x, Vertex z, Vertex p,
              Vertex q) {
  if (p == x && q == z) return true;
  if (p == x && q != z) return sys.dpi(z, x, q) > two_xi;
  if (q == z && p != x) return sys.dpi(x, p, z) > two_xi;
  if (p != x && p != z && q != x && q != z)
    return sys.dpi(x, p, q) > two_xi && sys.dpi(z, p, q) > two_xi;
  return false;
}

}  // namespace

HSet h_set(const ProjectionSystem& sys, Vertex x, Vertex z) {
  if (x == z) throw std::invalid_argument("h_set: x == z");
  const auto n = static_cast<Vertex>(sys.size());
  const double two_xi = 2.0 * sys.xi();
  HSet out{x, z, {}};
  for (Vertex p = 0; p < n; ++p)
    for (Vertex q = 0; q < n; ++q)
      if (in_h_set(sys, two_xi, x, z, p, q)) out.members.emplace_back(p, q);
  return out;
}

double modified_distance_direct(const ProjectionSystem& sys, Vertex y, Vertex x, Vertex z) {
  if (x == z || y == x || y == z)
    throw std::invalid_argument("modified_distance: degenerate arguments");
  const auto n = static_cast<Vertex>(sys.size());
  const double two_xi = 2.0 * sys.xi();
  double best = std::numeric_limits<double>::infinity();
  for (Vertex p = 0; p < n; ++p) {
    if (p == y) continue;
    for (Vertex q = 0; q < n; ++q) {
      if (q == y) continue;
      if (!in_h_set(sys, two_xi, x, z, p, q)) continue;
      best = std::min(best, sys.dpi(y, p, q));
    }
  }
  return best;
}

ModifiedDistances::ModifiedDistances(std::shared_ptr<const ProjectionSystem> sys)
    : sys_(std::move(sys)), n_(sys_->size()), rows_(n_ * n_) {}

std::size_t ModifiedDistances::pair_index(Vertex x, Vertex z) const {
  const Vertex lo = std::min(x, z), hi = std::max(x, z);
  return static_cast<std::size_t>(lo) * n_ + hi;
}

std::span<const double> ModifiedDistances::row(Vertex x, Vertex z) const {
  if (x == z) throw std::invalid_argument("ModifiedDistances::row: x == z");
  auto& slot = rows_[pair_index(x, z)];
  if (!slot) {
    const HSet h = h_set(*sys_, x, z);
    auto row = std::make_unique<double[]>(n_);
    for (Vertex y = 0; y < n_; ++y) {
      if (y == x || y == z) {
        row[y] = 0.0;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [p, q] : h.members) {
        if (p == y || q == y) continue;  // outside d^pi_Y's domain
        best = std::min(best, sys_->dpi(y, p, q));
      }
      row[y] = best;
    }
    slot = std::move(row);
  }
  return {slot.get(), n_};
}

double ModifiedDistances::operator()(Vertex y, Vertex x, Vertex z) const {
  if (y == x || y == z) throw std::invalid_argument("ModifiedDistances: y in {x,z}");
  return row(x, z)[y];
}

void ModifiedDistances::warm_all() const {
  for (Vertex x = 0; x < n_; ++x)
    for (Vertex z = static_cast<Vertex>(x + 1); z < n_; ++z) row(x, z);
}

std::vector<Vertex> large_set(const ModifiedDistances& d, Vertex x, Vertex z,
                              double threshold) {
  auto r = d.row(x, z);
  std::vector<Vertex> out;
  for (Vertex y = 0; y < d.size(); ++y)
    if (y != x && y != z && r[y] > threshold) out.push_back(y);
  return out;
}

OrderedInterval order_interval(const ModifiedDistances& d, Vertex x, Vertex z,
                               double threshold) {
  const double xi = d.xi();
  std::vector<Vertex> s = large_set(d, x, z, threshold);
  const std::size_t m = s.size();

  // less[i][j]: s[i] < s[j], i.e. d_{s[i]}(x, s[j]) > xi
  std::vector<std::vector<bool>> less(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) less[i][j] = d(s[i], x, s[j]) > xi;

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (less[i][j] && less[j][i])
        throw OrderError("order comparator: both directions hold (K too small?)", x, s[i],
                         s[j]);
      if (!less[i][j] && !less[j][i])
        throw OrderError("order comparator: tie (K too small / system degenerate)", x, s[i],
                         s[j]);
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        if (i != j && j != k && i != k && less[i][j] && less[j][k] && !less[i][k])
          throw OrderError("order comparator: transitivity failure", s[i], s[j], s[k]);

  std::vector<std::size_t> pos(m);
  for (std::size_t i = 0; i < m; ++i) pos[i] = i;
  std::sort(pos.begin(), pos.end(),
            [&](std::size_t i, std::size_t j) { return less[i][j]; });

  OrderedInterval out{x, z, threshold, {}};
  out.elements.push_back(x);
  for (std::size_t i : pos) out.elements.push_back(s[i]);
  out.elements.push_back(z);
  return out;
}

bool is_guard(const ModifiedDistances& d, const CoreParams& params, Vertex w, Vertex y,
              double K) {
  if (w == y) throw std::invalid_argument("is_guard: w == y");
  const double xi = d.xi();
  for (Vertex xv = 0; xv < d.size(); ++xv) {
    if (xv == w || xv == y) continue;
    if (!(d(w, xv, y) > params.theta)) continue;
    for (Vertex zv : large_set(d, xv, y, K)) {
      if (zv == w) continue;
      if (!(d(zv, xv, w) > xi)) return false;  // not zv < w, so w fails to guard
    }
  }
  return true;
}

bool is_barrier(const ModifiedDistances& d, const CoreParams& params, Vertex y,
                std::span<const Vertex> path, Vertex z) {
  if (y == z) return false;
  for (Vertex v : path)
    if (v == y) return false;
  for (Vertex v : path) {
    if (v == z) throw std::invalid_argument("is_barrier: z lies on the path");
    if (!(d(y, v, z) > params.theta)) return false;
  }
  return true;
}

BarrierResult find_barrier(const ModifiedDistances& d, const CoreParams& params,
                           const ProjectionComplex& complex,
                           std::span<const Vertex> path, Vertex z) {
  if (path.empty()) throw std::invalid_argument("find_barrier: empty path");
  for (Vertex v : path)
    if (complex.graph_distance(v, z) < 3)
      throw std::invalid_argument("find_barrier: path vertex within distance 2 of z");

  const double xi = d.xi();
  const double half_K = params.K / 2.0;
  BarrierResult out;

  auto greatest_below = [&](Vertex xv, std::optional<Vertex> bound) -> std::optional<Vertex> {
    // Greatest element of Y_{K/2}(xv, z) (below `bound` when given), with
    // greatness read from the comparator on the pair (xv, z).
    std::optional<Vertex> best;
    for (Vertex v : large_set(d, xv, z, half_K)) {
      if (bound && !(d(v, xv, *bound) > xi)) continue;  // need v < bound
      if (!best || d(*best, xv, v) > xi) best = v;      // best < v: v is greater
    }
    return best;
  };

  auto w = greatest_below(path[0], std::nullopt);
  if (!w) {
    out.diagnostic = "no large projections at K/2 from the first path vertex";
    return out;
  }
  out.guards.push_back(*w);
  for (std::size_t i = 1; i < path.size(); ++i) {
    Vertex cur = out.guards.back();
    if (d(cur, path[i], z) > half_K) {
      out.guards.push_back(cur);
      continue;
    }
    auto next = greatest_below(path[i], cur);
    if (!next) {
      out.diagnostic = "guard chain broke: K too small";
      return out;
    }
    out.guards.push_back(*next);
  }

  const Vertex barrier = out.guards.front();
  if (!is_barrier(d, params, barrier, path, z)) {
    out.diagnostic = "constructed vertex fails the barrier test: K too small";
    return out;
  }
  out.barrier = barrier;
  return out;
}

// ---------------------------------------------------------------- axioms

json AxiomReport::to_json() const {
  json v = json::array();
  for (const auto& viol : violations)
    v.push_back({{"axiom", viol.axiom},
                 {"y", viol.y},
                 {"x", viol.x},
                 {"z", viol.z},
                 {"w", viol.w},
                 {"value", viol.value}});
  return json{{"ok", ok},
              {"minimal_valid_xi", minimal_valid_xi},
              {"triples_checked", triples_checked},
              {"triangle_exhaustive", triangle_exhaustive},
              {"triangle_checked", triangle_checked},
              {"finiteness", "trivial (finite system)"},
              {"violations", v}};
}

AxiomReport validate_axioms(const ProjectionSystem& sys,
                            std::size_t exhaustive_quadruple_budget,
                            std::uint64_t sample_seed) {
  const auto n = static_cast<Vertex>(sys.size());
  const double xi = sys.xi();
  AxiomReport rep;
  auto add = [&](const char* axiom, Vertex y, Vertex x, Vertex z, Vertex w, double val) {
    rep.ok = false;
    if (rep.violations.size() < 16) rep.violations.push_back({axiom, y, x, z, w, val});
  };

  // Symmetry, then the triple inequality (strict below xi); the running
  // max-min gives the minimal valid constant.
  double maxmin = 0.0;
  for (Vertex y = 0; y < n; ++y)
    for (Vertex x = 0; x < n; ++x) {
      if (x == y) continue;
      for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
        if (z == y) continue;
        ++rep.triples_checked;
        if (std::abs(sys.dpi(y, x, z) - sys.dpi(y, z, x)) > kEps)
          add("symmetry", y, x, z, 0, sys.dpi(y, x, z));
      }
    }
  for (Vertex y = 0; y < n; ++y)
    for (Vertex z = static_cast<Vertex>(y + 1); z < n; ++z)
      for (Vertex x = 0; x < n; ++x) {
        if (x == y || x == z) continue;
        const double m = std::min(sys.dpi(y, x, z), sys.dpi(z, x, y));
        maxmin = std::max(maxmin, m);
        if (!(m < xi)) add("triple-inequality", y, x, z, 0, m);
      }
  rep.minimal_valid_xi =
      std::nextafter(maxmin, std::numeric_limits<double>::infinity());

  // Triangle inequality in the last two slots, exhaustive within budget.
  const std::size_t quadruples = static_cast<std::size_t>(n) * n * n * n;
  auto check_triangle = [&](Vertex y, Vertex x, Vertex z, Vertex w) {
    const double lhs = sys.dpi(y, x, w);
    const double rhs = sys.dpi(y, x, z) + sys.dpi(y, z, w);
    ++rep.triangle_checked;
    if (lhs > rhs + kEps) add("triangle", y, x, z, w, lhs - rhs);
  };
  if (quadruples <= exhaustive_quadruple_budget) {
    for (Vertex y = 0; y < n; ++y)
      for (Vertex x = 0; x < n; ++x) {
        if (x == y) continue;
        for (Vertex z = 0; z < n; ++z) {
          if (z == y || z == x) continue;
          for (Vertex w = 0; w < n; ++w) {
            if (w == y) continue;
            check_triangle(y, x, z, w);
          }
        }
      }
  } else {
    rep.triangle_exhaustive = false;
    SplitMix64 rng(sample_seed ^ 0x5bd1e995u);
    const std::size_t samples = std::min<std::size_t>(exhaustive_quadruple_budget, 5'000'000);
    for (std::size_t i = 0; i < samples; ++i) {
      const Vertex y = static_cast<Vertex>(rng.below(n));
      const Vertex x = static_cast<Vertex>(rng.below(n));
      const Vertex z = static_cast<Vertex>(rng.below(n));
      const Vertex w = static_cast<Vertex>(rng.below(n));
      if (x == y || z == y || z == x || w == y) continue;
      check_triangle(y, x, z, w);
    }
  }
  return rep;
}

// ----------------------------------------------------------- theorem main

json ClauseReport::to_json() const {
  json s = json::array();
  for (const auto& viol : samples)
    s.push_back({{"y", viol.y}, {"x", viol.x}, {"z", viol.z}, {"w", viol.w},
                 {"value", viol.value}});
  return json{{"statement", statement}, {"pass", pass},
              {"flagged", flagged},     {"checked", checked},
              {"violations", violations}, {"max_slack", max_slack},
              {"violation_samples", s}};
}

bool TheoremMainReport::all_pass() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseReport& c) { return c.pass; });
}

json TheoremMainReport::to_json() const {
  json arr = json::array();
  for (const auto& c : clauses) arr.push_back(c.to_json());
  return json{{"clauses", arr}, {"all_pass", all_pass()}};
}

TheoremMainReport check_theorem_main(const ModifiedDistances& d, const CoreParams& params) {
  const auto n = static_cast<Vertex>(d.size());
  const double xi = d.xi();
  const double theta = params.theta;
  const ProjectionSystem& sys = d.system();
  d.warm_all();

  TheoremMainReport rep;
  auto clause = [&](const char* statement) -> ClauseReport& {
    rep.clauses.push_back({statement, true, false, 0, 0, 0.0, {}});
    return rep.clauses.back();
  };
  auto fail = [](ClauseReport& c, Vertex y, Vertex x, Vertex z, Vertex w, double v) {
    c.pass = false;
    ++c.violations;
    if (c.samples.size() < 8) c.samples.push_back({c.statement, y, x, z, w, v});
  };

  // symmetry: rows are shared between (x,z) and (z,x); cross-check a
  // seeded sample against direct enumeration with swapped arguments.
  {
    auto& c = clause("symmetry");
    SplitMix64 rng(17);
    const std::size_t samples = std::min<std::size_t>(300, n * n);
    for (std::size_t i = 0; i < samples; ++i) {
      const Vertex x = static_cast<Vertex>(rng.below(n));
      const Vertex z = static_cast<Vertex>(rng.below(n));
      const Vertex y = static_cast<Vertex>(rng.below(n));
      if (x == z || y == x || y == z) continue;
      ++c.checked;
      const double via_cache = d(y, x, z);
      const double direct_swapped = modified_distance_direct(sys, y, z, x);
      if (std::abs(via_cache - direct_swapped) > kEps)
        fail(c, y, x, z, 0, via_cache - direct_swapped);
    }
  }

  // gap: 0 <= dpi - d < 2 xi, exhaustive.
  {
    auto& c = clause("coarse-equality-gap");
    for (Vertex x = 0; x < n; ++x)
      for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
        auto r = d.row(x, z);
        for (Vertex y = 0; y < n; ++y) {
          if (y == x || y == z) continue;
          const double gap = sys.dpi(y, x, z) - r[y];
          ++c.checked;
          c.max_slack = std::max(c.max_slack, gap);
          if (gap < -kEps || !(gap < 2.0 * xi)) fail(c, y, x, z, 0, gap);
        }
      }
  }

  // coarse triangle: d_Y(X,W) <= d_Y(X,Z) + d_Y(Z,W) + 4 xi, exhaustive.
  {
    auto& c = clause("coarse-triangle");
    for (Vertex y = 0; y < n; ++y)
      for (Vertex x = 0; x < n; ++x) {
        if (x == y) continue;
        for (Vertex z = 0; z < n; ++z) {
          if (z == y || z == x) continue;
          auto rxz = d.row(x, z);
          for (Vertex w = 0; w < n; ++w) {
            if (w == y || w == x || w == z) continue;
            const double excess = d(y, x, w) - rxz[y] - d(y, z, w);
            ++c.checked;
            c.max_slack = std::max(c.max_slack, excess);
            if (excess > 4.0 * xi + kEps) fail(c, y, x, z, w, excess);
          }
        }
      }
  }

  // triples: min{d_Y(X,Z), d_Z(X,Y)} < xi, exhaustive.
  {
    auto& c = clause("triple-inequality");
    for (Vertex y = 0; y < n; ++y)
      for (Vertex z = static_cast<Vertex>(y + 1); z < n; ++z)
        for (Vertex x = 0; x < n; ++x) {
          if (x == y || x == z) continue;
          const double m = std::min(d(y, x, z), d(z, x, y));
          ++c.checked;
          c.max_slack = std::max(c.max_slack, m);
          if (!(m < xi)) fail(c, y, x, z, 0, m);
        }
  }

  // finiteness: report the largest large-projection count at theta.
  {
    auto& c = clause("finiteness-count");
    for (Vertex x = 0; x < n; ++x)
      for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
        ++c.checked;
        c.max_slack = std::max(
            c.max_slack, static_cast<double>(large_set(d, x, z, theta).size()));
      }
  }

  // monotonicity at theta, exhaustive over quadruples.
  {
    auto& c = clause("monotonicity");
    for (Vertex x = 0; x < n; ++x)
      for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
        auto rxz = d.row(x, z);
        for (Vertex y = 0; y < n; ++y) {
          if (y == x || y == z) continue;
          if (!(rxz[y] >= theta)) continue;
          auto rxy = d.row(x, y);
          auto rzy = d.row(z, y);
          for (Vertex w = 0; w < n; ++w) {
            if (w == x || w == y || w == z) continue;
            ++c.checked;
            const double excess = std::max(rxy[w], rzy[w]) - rxz[w];
            if (excess > kEps) fail(c, y, x, z, w, excess);
          }
        }
      }
  }

  // betweenness against the order at theta; slacks measured, outliers
  // flagged rather than failed.
  {
    auto& c = clause("betweenness-order");
    for (Vertex x = 0; x < n; ++x)
      for (Vertex z = static_cast<Vertex>(x + 1); z < n; ++z) {
        OrderedInterval oi;
        try {
          oi = order_interval(d, x, z, theta);
        } catch (const OrderError&) {
          c.flagged = true;
          ++c.violations;
          continue;
        }
        const auto& e = oi.elements;
        const std::size_t m = e.size();
        double max_between_slack = 0.0;
        for (std::size_t j = 1; j + 1 < m; ++j) {
          const Vertex y1 = e[j];
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = i + 1; k < m; ++k) {
              if (i == j || k == j) continue;
              const Vertex y0 = e[i], y2 = e[k];
              if (y0 == y1 || y2 == y1) continue;
              ++c.checked;
              const double dyz = d(y1, x, z);
              const double dy02 = d(y1, y0, y2);
              if (i < j && j < k) {
                if (dy02 > dyz + kEps) fail(c, y1, y0, y2, 0, dy02 - dyz);
                max_between_slack = std::max(max_between_slack, dyz - dy02);
                if (dyz - dy02 > 10.0 * xi) c.flagged = true;
              } else {
                if (dy02 > 4.0 * xi) c.flagged = true;
                c.max_slack = std::max(c.max_slack, dy02);
              }
            }
        }
        c.max_slack = std::max(c.max_slack, max_between_slack);
      }
  }

  // barrier composition: shared large projections force close projections to z.
  {
    auto& c = clause("barrier-composition");
    for (Vertex y = 0; y < n; ++y)
      for (Vertex z = 0; z < n; ++z) {
        if (z == y) continue;
        std::vector<Vertex> seen;
        for (Vertex x = 0; x < n; ++x) {
          if (x == y || x == z) continue;
          if (d(y, x, z) > theta) seen.push_back(x);
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
          for (std::size_t j = i + 1; j < seen.size(); ++j) {
            ++c.checked;
            const double v = d(z, seen[i], seen[j]);
            c.max_slack = std::max(c.max_slack, v);
            if (!(v < theta)) fail(c, y, seen[i], seen[j], z, v);
          }
      }
  }

  return rep;
}

double auto_select_K(const ModifiedDistances& d, const CoreParams& params,
                     int max_doublings) {
  const auto n = static_cast<Vertex>(d.size());
  double K = params.K;
  for (int round = 0; round <= max_doublings; ++round) {
    bool consistent = true;
    for (Vertex x = 0; x < n && consistent; ++x)
      for (Vertex z = static_cast<Vertex>(x + 1); z < n && consistent; ++z) {
        try {
          order_interval(d, x, z, K);
        } catch (const OrderError&) {
          consistent = false;
        }
      }
    if (consistent) return K;
    K *= 2.0;
  }
  throw std::runtime_error("auto_select_K: no consistent K found");
}

}  // namespace projcx
