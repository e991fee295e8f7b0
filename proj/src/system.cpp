#include "projcx/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace projcx {

// ---------------------------------------------------------------- tabular

TabularSystem::TabularSystem(std::vector<std::string> labels, double xi)
    : labels_(std::move(labels)), xi_(xi) {
  if (!(xi_ > 0)) throw std::invalid_argument("TabularSystem: xi must be > 0");
  table_.assign(labels_.size() * labels_.size() * labels_.size(), 0.0);
}

std::size_t TabularSystem::idx(Vertex y, Vertex x, Vertex z) const {
  const std::size_t n = labels_.size();
  return (static_cast<std::size_t>(y) * n + x) * n + z;
}

void TabularSystem::set_dpi(Vertex y, Vertex x, Vertex z, double value) {
  if (y == x || y == z) throw std::invalid_argument("set_dpi: y must differ from x,z");
  table_[idx(y, x, z)] = value;
  table_[idx(y, z, x)] = value;
}

double TabularSystem::dpi(Vertex y, Vertex x, Vertex z) const {
  if (y == x || y == z) throw std::invalid_argument("dpi: y must differ from x,z");
  return table_[idx(y, x, z)];
}

std::uint64_t TabularSystem::content_hash() const {
  std::ostringstream os;
  os << "tabular;" << xi_ << ";";
  for (const auto& l : labels_) os << l << ",";
  os.write(reinterpret_cast<const char*>(table_.data()),
           static_cast<std::streamsize>(table_.size() * sizeof(double)));
  return fnv1a64(os.str());
}

TabularSystem TabularSystem::from_json(const json& j) {
  std::vector<std::string> labels = j.at("vertices").get<std::vector<std::string>>();
  TabularSystem sys(labels, j.at("xi").get<double>());
  std::map<std::string, Vertex> by_name;
  for (Vertex v = 0; v < labels.size(); ++v) by_name[labels[v]] = v;

  const auto& dpi = j.at("dpi");
  for (auto it = dpi.begin(); it != dpi.end(); ++it) {
    const Vertex y = by_name.at(it.key());
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      const std::string pair = jt.key();
      const auto bar = pair.find('|');
      if (bar == std::string::npos)
        throw std::invalid_argument("tabular dpi key must be \"X|Z\": " + pair);
      const Vertex x = by_name.at(pair.substr(0, bar));
      const Vertex z = by_name.at(pair.substr(bar + 1));
      sys.set_dpi(y, x, z, jt.value().get<double>());  // symmetric completion
    }
  }
  return sys;
}

// ---------------------------------------------------------------- anchored

AnchoredSystem::AnchoredSystem(std::vector<std::string> labels,
                               std::vector<CoordInterval> anchors, double xi,
                               std::string provenance)
    : labels_(std::move(labels)),
      anchors_(std::move(anchors)),
      xi_(xi),
      provenance_(std::move(provenance)) {
  if (anchors_.size() != labels_.size() * labels_.size())
    throw std::invalid_argument("AnchoredSystem: anchor table size mismatch");
  if (!(xi_ > 0)) throw std::invalid_argument("AnchoredSystem: xi must be > 0");
}

CoordInterval AnchoredSystem::anchor(Vertex y, Vertex x) const {
  if (y == x) throw std::invalid_argument("anchor: y == x");
  return anchors_[static_cast<std::size_t>(y) * labels_.size() + x];
}

double AnchoredSystem::dpi(Vertex y, Vertex x, Vertex z) const {
  if (y == x || y == z) throw std::invalid_argument("dpi: y must differ from x,z");
  const auto& ix = anchors_[static_cast<std::size_t>(y) * labels_.size() + x];
  const auto& iz = anchors_[static_cast<std::size_t>(y) * labels_.size() + z];
  return std::max(ix.hi, iz.hi) - std::min(ix.lo, iz.lo);
}

double AnchoredSystem::max_projection_diameter() const {
  double nu = 0.0;
  const std::size_t n = labels_.size();
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      if (x != y) nu = std::max(nu, anchors_[y * n + x].diameter());
  return nu;
}

double AnchoredSystem::measured_minimal_xi() const {
  const std::size_t n = labels_.size();
  double worst = 0.0;
  for (Vertex y = 0; y < n; ++y)
    for (Vertex z = static_cast<Vertex>(y + 1); z < n; ++z)
      for (Vertex x = 0; x < n; ++x) {
        if (x == y || x == z) continue;
        worst = std::max(worst, std::min(dpi(y, x, z), dpi(z, x, y)));
      }
  return worst;
}

std::uint64_t AnchoredSystem::content_hash() const {
  std::ostringstream os;
  os << "anchored;" << provenance_ << ";" << xi_ << ";";
  for (const auto& l : labels_) os << l << ",";
  os.write(reinterpret_cast<const char*>(anchors_.data()),
           static_cast<std::streamsize>(anchors_.size() * sizeof(CoordInterval)));
  return fnv1a64(os.str());
}

// ------------------------------------------------------------- instances

namespace {

double nextup(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

std::pair<std::int64_t, std::int64_t> endpoint_key(const Geodesic& g) {
  auto quant = [](const BoundaryPoint& p) -> std::int64_t {
    if (p.infinite) return std::numeric_limits<std::int64_t>::max();
    return std::llround(p.value * 1e7);
  };
  std::int64_t k1 = quant(g.a), k2 = quant(g.b);
  if (k1 > k2) std::swap(k1, k2);
  return {k1, k2};
}

}  // namespace

GeodesicInstance make_geodesic_instance(const std::vector<Geodesic>& geodesics,
                                        const std::vector<std::string>& labels,
                                        std::string provenance,
                                        std::optional<double> xi_override) {
  const std::size_t n = geodesics.size();
  if (n == 0) throw std::invalid_argument("empty geodesic family");
  // Shared or degenerate endpoints make projections unbounded or undefined.
  for (const Geodesic& g : geodesics)
    if (g.a.close_to(g.b)) throw std::domain_error("degenerate geodesic (a == b)");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Geodesic &gi = geodesics[i], &gj = geodesics[j];
      if (gi.a.close_to(gj.a) || gi.a.close_to(gj.b) || gi.b.close_to(gj.a) ||
          gi.b.close_to(gj.b))
        throw std::domain_error("non-discrete or degenerate configuration: shared endpoint");
    }

  std::vector<CoordInterval> anchors(n * n);
  double nu = 0.0;
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      if (x == y) continue;
      anchors[y * n + x] = projection_interval(geodesics[y], geodesics[x]);
      nu = std::max(nu, anchors[y * n + x].diameter());
    }

  // xi must be measured before the system exists; run the same sweep inline.
  double xi;
  if (xi_override) {
    xi = *xi_override;
  } else {
    double worst = 0.0;
    auto dpi_at = [&](std::size_t y, std::size_t x, std::size_t z) {
      const auto& ix = anchors[y * n + x];
      const auto& iz = anchors[y * n + z];
      return std::max(ix.hi, iz.hi) - std::min(ix.lo, iz.lo);
    };
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = y + 1; z < n; ++z)
        for (std::size_t x = 0; x < n; ++x) {
          if (x == y || x == z) continue;
          worst = std::max(worst, std::min(dpi_at(y, x, z), dpi_at(z, x, y)));
        }
    xi = std::max(nextup(worst) * 1.1, 1e-6);
  }

  GeodesicInstance inst;
  inst.geodesics = geodesics;
  inst.nu = nu;
  inst.system = std::make_shared<AnchoredSystem>(labels, std::move(anchors), xi,
                                                 std::move(provenance));
  return inst;
}

std::vector<MoebiusMap> default_schottky_generators() {
  return {MoebiusMap::from_entries(4.0, 0.0, 0.0, 0.25),
          MoebiusMap::from_entries(17.0 / 8, 15.0 / 8, 15.0 / 8, 17.0 / 8)};
}

namespace {

struct Letter {
  MoebiusMap map;
  int gen;       // generator index
  bool inverse;  // true for the inverse letter
  char name;
};

std::vector<Letter> alphabet(const std::vector<MoebiusMap>& gens) {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const char lower = static_cast<char>('a' + i);
    out.push_back({gens[i], static_cast<int>(i), false, lower});
    out.push_back({gens[i].inverse(), static_cast<int>(i), true,
                   static_cast<char>(lower - 'a' + 'A')});
  }
  return out;
}

}  // namespace

SchottkyInstance make_schottky_instance(const std::vector<MoebiusMap>& generators,
                                        int word_radius,
                                        const std::vector<std::string>& extra_words) {
  if (generators.empty()) throw std::invalid_argument("no generators");
  const auto letters = alphabet(generators);
  std::vector<Geodesic> base_axes;
  for (const auto& g : generators) base_axes.push_back(axis_of(g).axis);  // may throw "no axis"

  struct Word {
    std::string text;
    MoebiusMap map;
    int last = -1;  // alphabet index of last letter
  };
  std::vector<Word> words{{"", MoebiusMap::identity(), -1}};
  std::vector<Word> frontier = words;
  for (int r = 0; r < word_radius; ++r) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (std::size_t li = 0; li < letters.size(); ++li) {
        if (w.last >= 0) {
          const auto& prev = letters[w.last];
          const auto& cur = letters[li];
          if (prev.gen == cur.gen && prev.inverse != cur.inverse) continue;  // cancellation
        }
        next.push_back({w.text + letters[li].name, w.map * letters[li].map,
                        static_cast<int>(li)});
      }
    words.insert(words.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  for (const auto& extra : extra_words) {
    Word w{"", MoebiusMap::identity(), -1};
    for (char c : extra) {
      auto it = std::find_if(letters.begin(), letters.end(),
                             [&](const Letter& l) { return l.name == c; });
      if (it == letters.end())
        throw std::invalid_argument("unknown generator letter: " + std::string(1, c));
      w.text += c;
      w.map = w.map * it->map;
    }
    words.push_back(std::move(w));
  }

  std::map<std::pair<std::int64_t, std::int64_t>, Vertex> index;
  std::vector<Geodesic> axes;
  std::vector<std::string> vertex_words;
  std::vector<std::string> labels;
  for (const auto& w : words)
    for (std::size_t ai = 0; ai < base_axes.size(); ++ai) {
      const Geodesic g = w.map(base_axes[ai]);
      const auto key = endpoint_key(g);
      if (index.count(key)) continue;  // parallel-axis dedupe
      index.emplace(key, static_cast<Vertex>(axes.size()));
      axes.push_back(g);
      const std::string word_label =
          (w.text.empty() ? std::string() : w.text + ".") + "ax" +
          std::string(1, static_cast<char>('a' + ai));
      vertex_words.push_back(w.text);
      labels.push_back(word_label);
    }

  SchottkyInstance out;
  out.generators = generators;
  out.word_radius = word_radius;
  out.inst = make_geodesic_instance(axes, labels, "schottky");
  out.vertex_words = std::move(vertex_words);
  out.endpoint_index = std::move(index);
  return out;
}

std::optional<Vertex> SchottkyInstance::find_axis(const Geodesic& g) const {
  const auto it = endpoint_index.find(endpoint_key(g));
  if (it == endpoint_index.end()) return std::nullopt;
  return it->second;
}

GeodesicInstance make_random_instance(const RandomGeodesicSpec& spec) {
  if (spec.count < 2) throw std::invalid_argument("need at least 2 geodesics");
  SplitMix64 rng(spec.seed);
  std::vector<double> used;
  std::vector<Geodesic> geos;
  int attempts = 0;
  auto fresh = [&]() -> double {
    while (true) {
      if (++attempts > 100000) throw std::runtime_error("random instance: range too crowded");
      const double t = rng.uniform(spec.endpoint_lo, spec.endpoint_hi);
      bool ok = true;
      for (double u : used)
        if (std::abs(t - u) < spec.min_gap) {
          ok = false;
          break;
        }
      if (ok) {
        used.push_back(t);
        return t;
      }
    }
  };
  std::vector<std::string> labels;
  for (int i = 0; i < spec.count; ++i) {
    const double e1 = fresh();
    const double e2 = fresh();
    geos.push_back({BoundaryPoint::at(std::min(e1, e2)), BoundaryPoint::at(std::max(e1, e2))});
    labels.push_back("g" + std::to_string(i));
  }
  return make_geodesic_instance(geos, labels, "random-" + std::to_string(spec.seed));
}

GeodesicInstance make_tangent_chain(int count, double delta) {
  if (count < 2) throw std::invalid_argument("need at least 2 links");
  const double s = 2.0 + delta;
  std::vector<Geodesic> geos;
  std::vector<std::string> labels;
  for (int i = 0; i < count; ++i) {
    geos.push_back({BoundaryPoint::at(i * s - 1.0), BoundaryPoint::at(i * s + 1.0)});
    labels.push_back("c" + std::to_string(i));
  }
  return make_geodesic_instance(geos, labels, "tangent-chain");
}

std::shared_ptr<AnchoredSystem> make_synthetic_chain(int count, double big) {
  if (count < 2) throw std::invalid_argument("need at least 2 elements");
  const std::size_t n = static_cast<std::size_t>(count);
  auto g = [&](int m) {
    const double mag = big - std::ldexp(1.0, -std::abs(m));
    return m < 0 ? -mag : mag;
  };
  std::vector<CoordInterval> anchors(n * n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      if (x == y) continue;
      const double c = g(static_cast<int>(x) - static_cast<int>(y));
      anchors[y * n + x] = {c, c};
    }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));

  // Same measurement rule as the geometric instances: minimal valid constant
  // times 1.1. Same-side feet differ by at most 1/2 - 2^(1-n), so this stays
  // far below the cross-chain values ~2*big.
  double worst = 0.0;
  auto dpi_at = [&](std::size_t y, std::size_t x, std::size_t z) {
    const auto& ix = anchors[y * n + x];
    const auto& iz = anchors[y * n + z];
    return std::max(ix.hi, iz.hi) - std::min(ix.lo, iz.lo);
  };
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t z = y + 1; z < n; ++z)
      for (std::size_t x = 0; x < n; ++x) {
        if (x == y || x == z) continue;
        worst = std::max(worst, std::min(dpi_at(y, x, z), dpi_at(z, x, y)));
      }
  const double xi = std::max(nextup(worst) * 1.1, 1e-6);
  return std::make_shared<AnchoredSystem>(labels, std::move(anchors), xi, "synthetic-chain");
}

LoadedInstance load_instance_json(const json& j) {
  LoadedInstance out;
  if (j.contains("generators")) {
    std::vector<MoebiusMap> gens;
    for (const auto& m : j.at("generators"))
      gens.push_back(MoebiusMap::from_entries(m.at(0).at(0), m.at(0).at(1), m.at(1).at(0),
                                              m.at(1).at(1)));
    auto sch = make_schottky_instance(gens, j.at("word_radius").get<int>());
    out.system = sch.inst.system;
    out.geodesics = sch.inst;
    out.schottky = std::move(sch);
  } else if (j.contains("count")) {
    RandomGeodesicSpec spec;
    spec.count = j.at("count").get<int>();
    spec.seed = j.value("seed", 1);
    if (j.contains("endpoint_range")) {
      spec.endpoint_lo = j.at("endpoint_range").at(0).get<double>();
      spec.endpoint_hi = j.at("endpoint_range").at(1).get<double>();
    }
    spec.min_gap = j.value("min_gap", 0.05);
    auto inst = make_random_instance(spec);
    out.system = inst.system;
    out.geodesics = std::move(inst);
  } else if (j.contains("dpi")) {
    out.system = std::make_shared<TabularSystem>(TabularSystem::from_json(j));
  } else {
    throw std::invalid_argument("unrecognized instance spec");
  }
  return out;
}

}  // namespace projcx
