#include "projcx/action.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace projcx {

namespace {

bool letters_cancel(char x, char y) {
  return x != y && std::toupper(static_cast<unsigned char>(x)) ==
                       std::toupper(static_cast<unsigned char>(y)) &&
         std::tolower(static_cast<unsigned char>(x)) ==
             std::tolower(static_cast<unsigned char>(y));
}

char invert_letter(char c) {
  return std::isupper(static_cast<unsigned char>(c))
             ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
             : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

}  // namespace

std::string reduce_word(std::string w) {
  std::string out;
  for (char c : w) {
    if (!out.empty() && letters_cancel(out.back(), c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

std::string word_power(const std::string& w, int k) {
  std::string base = k >= 0 ? w : std::string();
  if (k < 0) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) base.push_back(invert_letter(*it));
  }
  std::string out;
  for (int i = 0; i < std::abs(k); ++i) out += base;
  return reduce_word(out);
}

ActionContext::ActionContext(const SchottkyInstance& inst)
    : inst_(&inst), letter_count_(2 * inst.generators.size()) {}

GroupElement ActionContext::element(const std::string& word) const {
  GroupElement g;
  g.word = reduce_word(word);
  g.matrix = MoebiusMap::identity();
  for (char c : g.word) {
    const bool upper = std::isupper(static_cast<unsigned char>(c));
    const std::size_t gi =
        static_cast<std::size_t>(std::tolower(static_cast<unsigned char>(c)) - 'a');
    if (gi >= inst_->generators.size())
      throw std::invalid_argument("unknown generator letter in word: " + word);
    g.matrix = g.matrix * (upper ? inst_->generators[gi].inverse() : inst_->generators[gi]);
  }
  return g;
}

std::optional<Vertex> ActionContext::apply(const GroupElement& g, Vertex y) const {
  const Geodesic image = g.matrix(inst_->inst.geodesics.at(y));
  const auto hit = inst_->find_axis(image);
  if (!hit) return std::nullopt;
  // The endpoint-pair key is quantized; deep contracting translates can
  // collide with a different stored axis. Confirm the match tightly and
  // treat a mismatch as out-of-window.
  const Geodesic& stored = inst_->inst.geodesics[*hit];
  auto matches = [](const BoundaryPoint& a, const BoundaryPoint& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return std::abs(a.value - b.value) <= 1e-10 * std::max(1.0, std::abs(b.value));
  };
  const bool same = (matches(image.a, stored.a) && matches(image.b, stored.b)) ||
                    (matches(image.a, stored.b) && matches(image.b, stored.a));
  return same ? hit : std::nullopt;
}

std::vector<std::string> ActionContext::word_ball(int radius) const {
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < inst_->generators.size(); ++i) {
    letters.push_back(std::string(1, static_cast<char>('a' + i)));
    letters.push_back(std::string(1, static_cast<char>('A' + i)));
  }
  std::vector<std::string> out{""};
  std::vector<std::string> frontier{""};
  for (int r = 0; r < radius; ++r) {
    std::vector<std::string> next;
    for (const auto& w : frontier)
      for (const auto& l : letters) {
        if (!w.empty() && letters_cancel(w.back(), l[0])) continue;
        next.push_back(w + l);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

json EquivarianceReport::to_json() const {
  return json{{"statement", "projection-equivariance"},
              {"max_defect", max_defect},
              {"samples", samples},
              {"skipped", skipped},
              {"pass", pass},
              {"seed", seed}};
}

EquivarianceReport check_equivariance(const ActionContext& ctx, std::size_t sample_count,
                                      std::uint64_t seed) {
  const auto& sys = *ctx.instance().inst.system;
  const auto n = static_cast<Vertex>(sys.size());
  EquivarianceReport rep;
  rep.seed = seed;
  SplitMix64 rng(seed);
  const auto words = ctx.word_ball(2);
  const std::size_t attempt_cap = 1000 * sample_count;
  std::size_t attempts = 0;
  while (rep.samples < sample_count && ++attempts < attempt_cap) {
    const GroupElement g = ctx.element(words[rng.below(words.size())]);
    const Vertex a = static_cast<Vertex>(rng.below(n));
    const Vertex b = static_cast<Vertex>(rng.below(n));
    const Vertex c = static_cast<Vertex>(rng.below(n));
    if (a == b || a == c || b == c) continue;
    const auto ga = ctx.apply(g, a), gb = ctx.apply(g, b), gc = ctx.apply(g, c);
    if (!ga || !gb || !gc || *ga == *gb || *ga == *gc) {
      ++rep.skipped;
      continue;
    }
    const double defect = std::abs(sys.dpi(*ga, *gb, *gc) - sys.dpi(a, b, c));
    rep.max_defect = std::max(rep.max_defect, defect);
    ++rep.samples;
  }
  rep.pass = rep.max_defect <= 1e-6;
  return rep;
}

std::string TranslationCurve::to_csv() const {
  std::ostringstream os;
  os << "k,distance,distance_per_k\n";
  for (std::size_t i = 0; i < distances.size(); ++i)
    os << i + 1 << "," << distances[i] << ","
       << static_cast<double>(distances[i]) / static_cast<double>(i + 1) << "\n";
  return os.str();
}

TranslationCurve translation_length_estimate(const ActionContext& ctx,
                                             const ModifiedDistances& d,
                                             const CoreParams& params,
                                             const ProjectionComplex& complex,
                                             const GroupElement& g, int k_max) {
  TranslationCurve curve;
  curve.word = g.word;

  const auto n = static_cast<Vertex>(ctx.instance().inst.system->size());
  std::optional<Vertex> base;
  for (Vertex v = 0; v < n && !base; ++v) {
    const auto image = ctx.apply(g, v);
    if (image && *image != v) base = v;
  }
  if (!base) {
    curve.truncated = true;  // the element moves nothing the window can see
    return curve;
  }
  curve.basepoint = *base;

  for (int k = 1; k <= k_max; ++k) {
    const auto yk = ctx.apply(ctx.element(word_power(g.word, k)), *base);
    if (!yk) {
      curve.truncated = true;
      break;
    }
    curve.distances.push_back(complex.graph_distance(*base, *yk));
  }
  if (!curve.distances.empty())
    curve.tau_hat = static_cast<double>(curve.distances.back()) /
                    static_cast<double>(curve.distances.size());
  curve.positive = !curve.distances.empty() &&
                   std::all_of(curve.distances.begin(), curve.distances.end(),
                               [](unsigned v) { return v > 0; });

  for (int N = 1; N <= k_max && !curve.hypothesis_witnessed; ++N) {
    const auto fwd = ctx.apply(ctx.element(word_power(g.word, N)), *base);
    const auto bwd = ctx.apply(ctx.element(word_power(g.word, -N)), *base);
    if (!fwd || !bwd || *fwd == *base || *bwd == *base || *fwd == *bwd) continue;
    if (d(*base, *bwd, *fwd) > params.Kprime) curve.hypothesis_witnessed = true;
  }
  return curve;
}

json CombinatorialAxis::to_json() const {
  json els = json::array();
  for (Vertex v : elements) els.push_back(v);
  return json{{"statement", "combinatorial-axis"},
              {"word", word},
              {"threshold", threshold},
              {"elements", els},
              {"order_consistent", order_consistent},
              {"betweenness_ok", betweenness_ok},
              {"shift_ok", shift_ok},
              {"shift", shift},
              {"invariance_skips", invariance_skips}};
}

CombinatorialAxis combinatorial_axis(const ActionContext& ctx, const ModifiedDistances& d,
                                     const CoreParams& params, const GroupElement& g,
                                     double threshold, int max_power) {
  CombinatorialAxis axis;
  axis.word = g.word;
  axis.threshold = threshold;
  const auto n = static_cast<Vertex>(d.size());
  const double xi = d.xi();

  std::vector<Vertex> members;
  for (Vertex y = 0; y < n; ++y) {
    for (int N = 1; N <= max_power; ++N) {
      const auto fwd = ctx.apply(ctx.element(word_power(g.word, N)), y);
      const auto bwd = ctx.apply(ctx.element(word_power(g.word, -N)), y);
      if (!fwd || !bwd || *fwd == y || *bwd == y || *fwd == *bwd) continue;
      if (d(y, *bwd, *fwd) > threshold) {
        members.push_back(y);
        break;
      }
    }
  }
  if (members.empty()) return axis;  // empty axis is legal

  // Order relative to a far-negative reference translate of the first member.
  Vertex ref = members.front();
  for (int N = max_power; N >= 1; --N) {
    const auto bwd = ctx.apply(ctx.element(word_power(g.word, -N)), members.front());
    if (bwd && *bwd != members.front()) {
      ref = *bwd;
      break;
    }
  }
  auto less = [&](Vertex v, Vertex w) {
    if (v == w) return false;
    if (v == ref) return true;
    if (w == ref) return false;
    return d(v, ref, w) > xi;
  };
  for (Vertex v : members)
    for (Vertex w : members)
      if (v < w && less(v, w) == less(w, v)) axis.order_consistent = false;
  std::vector<Vertex> sorted = members;
  std::sort(sorted.begin(), sorted.end(), less);
  axis.elements = sorted;

  for (std::size_t i = 0; i < sorted.size() && axis.betweenness_ok; ++i)
    for (std::size_t k = i + 2; k < sorted.size() && axis.betweenness_ok; ++k)
      for (std::size_t j = i + 1; j < k; ++j)
        if (!(d(sorted[j], sorted[i], sorted[k]) > params.K)) axis.betweenness_ok = false;

  std::optional<int> shift;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto image = ctx.apply(g, sorted[i]);
    if (!image) {
      ++axis.invariance_skips;
      continue;
    }
    const auto it = std::find(sorted.begin(), sorted.end(), *image);
    if (it == sorted.end()) {
      // The image exists in the window but its own witness powers may not.
      ++axis.invariance_skips;
      continue;
    }
    const int delta = static_cast<int>(it - sorted.begin()) - static_cast<int>(i);
    if (!shift)
      shift = delta;
    else if (*shift != delta)
      axis.shift_ok = false;
  }
  axis.shift = shift.value_or(0);
  if (!shift || *shift == 0) axis.shift_ok = false;
  return axis;
}

json WpdProbe::to_json() const {
  return json{{"statement", "wpd-finiteness-probe"},
              {"word", word},
              {"D", D},
              {"M", M},
              {"word_radius", word_radius},
              {"count", count},
              {"skipped", skipped},
              {"ball", ball}};
}

WpdProbe wpd_probe(const ActionContext& ctx, const ModifiedDistances& d,
                   const ProjectionComplex& complex, const GroupElement& g, double D, int M,
                   int word_radius) {
  WpdProbe probe;
  probe.word = g.word;
  probe.D = D;
  probe.M = M;
  probe.word_radius = word_radius;
  (void)d;

  const auto n = static_cast<Vertex>(ctx.instance().inst.system->size());
  std::optional<Vertex> base;
  for (Vertex v = 0; v < n && !base; ++v) {
    const auto image = ctx.apply(g, v);
    if (image && *image != v) base = v;
  }
  if (!base) return probe;

  const auto fwd = ctx.apply(ctx.element(word_power(g.word, M)), *base);
  const auto bwd = ctx.apply(ctx.element(word_power(g.word, -M)), *base);
  if (!fwd || !bwd) return probe;

  for (const auto& w : ctx.word_ball(word_radius)) {
    ++probe.ball;
    const GroupElement phi = ctx.element(w);
    const auto pf = ctx.apply(phi, *fwd);
    const auto pb = ctx.apply(phi, *bwd);
    if (!pf || !pb) {
      ++probe.skipped;
      continue;
    }
    if (complex.graph_distance(*pf, *fwd) <= D && complex.graph_distance(*pb, *bwd) <= D)
      ++probe.count;
  }
  return probe;
}

}  // namespace projcx
