#include "projcx/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace projcx {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

bool wants(const ExperimentConfig& cfg, const char* suite,
           const std::vector<std::string>& repertoire) {
  bool any_relevant = false;
  for (const auto& s : cfg.suites)
    if (std::find(repertoire.begin(), repertoire.end(), s) != repertoire.end())
      any_relevant = true;
  if (!any_relevant) return true;  // no relevant selection: run the command default
  return std::find(cfg.suites.begin(), cfg.suites.end(), suite) != cfg.suites.end();
}

PointRef sample_point(const BlowupSpace& b, SplitMix64& rng) {
  const auto& spaces = b.spaces();
  const Vertex s = static_cast<Vertex>(rng.below(spaces.size()));
  const long c = spaces[s].lo + static_cast<long>(rng.below(spaces[s].node_count()));
  return {s, c};
}

}  // namespace

PreparedInstance prepare_instance(const ExperimentConfig& cfg) {
  PreparedInstance out;
  if (cfg.instance == "schottky-default") {
    auto sch = make_schottky_instance(default_schottky_generators(), cfg.radius);
    out.loaded.system = sch.inst.system;
    out.loaded.geodesics = sch.inst;
    out.loaded.schottky = std::move(sch);
  } else if (cfg.instance == "chain-synthetic") {
    out.loaded.system = make_synthetic_chain(8, 70.0);
  } else if (cfg.instance == "chain-tangent") {
    auto inst = make_tangent_chain(8, 0.02);
    out.loaded.system = inst.system;
    out.loaded.geodesics = std::move(inst);
  } else {
    std::ifstream in(cfg.instance);
    if (!in) throw std::invalid_argument("cannot open instance file: " + cfg.instance);
    json j = json::parse(in);
    out.loaded = load_instance_json(j);
  }

  if (cfg.xi) {
    if (out.loaded.geodesics) {
      auto rebuilt = make_geodesic_instance(
          out.loaded.geodesics->geodesics, [&] {
            std::vector<std::string> labels;
            for (Vertex v = 0; v < out.loaded.system->size(); ++v)
              labels.push_back(out.loaded.system->label(v));
            return labels;
          }(),
          "xi-override", cfg.xi);
      out.loaded.geodesics->system = rebuilt.system;
      out.loaded.system = rebuilt.system;
      if (out.loaded.schottky) out.loaded.schottky->inst.system = rebuilt.system;
    } else {
      throw std::invalid_argument("--xi override is only supported for geometric instances");
    }
  }

  const double xi = out.loaded.system->xi();
  CoreParams p = CoreParams::defaults(xi);
  if (cfg.theta) p.theta = *cfg.theta;
  if (cfg.K) {
    p = p.with_K(*cfg.K);
  }
  if (cfg.Kprime) p.Kprime = *cfg.Kprime;
  if (cfg.L) p.L = *cfg.L;
  p.validate();
  out.params = p;

  out.provenance = json{{"instance", cfg.instance},
                        {"radius", cfg.radius},
                        {"instance_hash", hex64(out.loaded.system->content_hash())},
                        {"params", p.to_json()},
                        {"metric", cfg.metric == MetricMode::modified ? "modified" : "raw"},
                        {"seed", cfg.seed},
                        {"pairs", cfg.pairs}};
  return out;
}

namespace {

/// Applies --auto-K: doubles K until the order relation is consistent at K.
void resolve_auto_K(const ExperimentConfig& cfg, const ModifiedDistances& d,
                    CoreParams& params, json& provenance) {
  if (!cfg.auto_K) return;
  const double k = auto_select_K(d, params);
  if (k != params.K) {
    CoreParams next = params.with_K(k);
    if (cfg.Kprime) next.Kprime = *cfg.Kprime;
    if (cfg.L) next.L = *cfg.L;
    params = next;
  }
  provenance["params"] = params.to_json();
  provenance["auto_K"] = params.K;
}

}  // namespace

ExperimentResult cmd_validate(const ExperimentConfig& cfg) {
  PreparedInstance pi = prepare_instance(cfg);
  ModifiedDistances d(pi.loaded.system);
  resolve_auto_K(cfg, d, pi.params, pi.provenance);

  ExperimentResult res;
  res.report["provenance"] = pi.provenance;

  if (wants(cfg, "axioms", {"axioms", "theorem-main"})) {
    const AxiomReport ar = validate_axioms(*pi.loaded.system);
    res.report["axioms"] = ar.to_json();
    if (!ar.ok) res.failed = true;
  }
  if (wants(cfg, "theorem-main", {"axioms", "theorem-main"})) {
    const TheoremMainReport tr = check_theorem_main(d, pi.params);
    res.report["theorem_main"] = tr.to_json();
    if (!tr.all_pass()) res.failed = true;
    for (const auto& c : tr.clauses)
      if (c.flagged) res.flagged = true;
  }
  return res;
}

ExperimentResult cmd_build(const ExperimentConfig& cfg) {
  PreparedInstance pi = prepare_instance(cfg);
  ModifiedDistances d(pi.loaded.system);
  resolve_auto_K(cfg, d, pi.params, pi.provenance);

  ExperimentResult res;
  res.report["provenance"] = pi.provenance;

  const auto complex =
      ProjectionComplex::build(d, pi.params, pi.params.K, MetricMode::modified);
  res.files.emplace_back("projection_complex.dot", to_dot(complex, *pi.loaded.system));
  res.report["complex"] = {{"vertices", complex.size()},
                           {"connected", complex.connected()},
                           {"diameter", complex_diameter(complex).diameter}};

  if (cfg.metric == MetricMode::raw) {
    const auto raw = ProjectionComplex::build(d, pi.params, pi.params.K, MetricMode::raw);
    res.files.emplace_back("projection_complex_raw.dot", to_dot(raw, *pi.loaded.system));
    res.report["raw_complex"] = {{"connected", raw.connected()}};
  }

  const auto* anchored = dynamic_cast<const AnchoredSystem*>(pi.loaded.system.get());
  if (anchored) {
    auto shared = std::dynamic_pointer_cast<const AnchoredSystem>(pi.loaded.system);
    const auto blow = BlowupSpace::build(shared, d, pi.params, complex);
    res.files.emplace_back("blowup_edges.csv", blow.edge_list_csv());
    res.report["blowup"] = {{"nodes", blow.node_count()},
                            {"bridges", blow.bridge_count()},
                            {"L", blow.bridge_length()}};
  } else {
    res.report["blowup"] = "skipped: instance carries no geometry";
  }
  return res;
}

ExperimentResult cmd_analyze(const ExperimentConfig& cfg) {
  PreparedInstance pi = prepare_instance(cfg);
  ModifiedDistances d(pi.loaded.system);
  resolve_auto_K(cfg, d, pi.params, pi.provenance);

  ExperimentResult res;
  res.report["provenance"] = pi.provenance;
  const std::vector<std::string> repertoire{"complex", "blowup", "raw-question"};

  const auto complex =
      ProjectionComplex::build(d, pi.params, pi.params.K, MetricMode::modified);

  if (wants(cfg, "complex", repertoire)) {
    json suite;
    const auto bounds = distance_bounds(d, pi.params, complex);
    suite["distance_bounds"] = bounds.to_json();
    res.files.emplace_back("distance_bounds.csv", bounds.to_csv());
    if (!bounds.all_ok) res.failed = true;

    const auto containment = check_geodesic_containment_all(d, pi.params, complex);
    suite["geodesic_containment"] = containment.to_json();
    if (!containment.pass) res.failed = true;

    const auto separation = check_midpath_separation_all(d, pi.params, complex);
    suite["midpath_separation"] = separation.to_json();
    if (!separation.all_pass) res.failed = true;

    const auto bottleneck = bottleneck_delta(complex.graph());
    suite["bottleneck"] = bottleneck.to_json();
    res.files.emplace_back("bottleneck.json", bottleneck.to_json().dump(2) + "\n");

    suite["diameter"] = complex_diameter(complex).to_json();
    res.report["complex"] = suite;
  }

  const auto shared = std::dynamic_pointer_cast<const AnchoredSystem>(pi.loaded.system);
  if (wants(cfg, "blowup", repertoire)) {
    if (!shared) {
      res.report["blowup"] = "skipped: instance carries no geometry";
    } else {
      json suite;
      const auto blow = BlowupSpace::build(shared, d, pi.params, complex);
      suite["nodes"] = blow.node_count();

      SplitMix64 rng(cfg.seed);
      std::size_t sandwich_fail = 0, trace_fail = 0, trace_flag = 0;
      double max_ratio_upper = 0, max_endpoint_defect = 0, max_hausdorff = 0;
      std::size_t nonvacuous_lower = 0;
      const std::size_t hausdorff_budget = std::min<std::size_t>(cfg.pairs, 12);
      for (std::size_t i = 0; i < cfg.pairs; ++i) {
        const PointRef x = sample_point(blow, rng);
        const PointRef z = sample_point(blow, rng);
        const SandwichResult sw = distance_formula_bounds(blow, d, x, z);
        if (!sw.ok) ++sandwich_fail;
        if (sw.lower > 0) ++nonvacuous_lower;
        if (sw.actual > 0) max_ratio_upper = std::max(max_ratio_upper, sw.upper / sw.actual);

        const StandardPath sp = standard_path(blow, d, x, z);
        if (!sp.within_bound) ++sandwich_fail;
        if (sp.length + 1e-9 < blow.distance(x, z)) ++sandwich_fail;

        const TraceReport tr = geodesic_trace(blow, d, x, z);
        if (!tr.contiguous || !tr.covers_forced || !tr.in_order) ++trace_fail;
        if (tr.defects_flagged) ++trace_flag;
        max_endpoint_defect = std::max(max_endpoint_defect, tr.max_endpoint_defect);

        if (i < hausdorff_budget && !sp.nodes.empty()) {
          std::vector<PointRef> traced;
          for (const auto& v : tr.visits)
            for (long c = std::min(v.entry, v.exit); c <= std::max(v.entry, v.exit); ++c)
              traced.push_back({v.space, c});
          max_hausdorff =
              std::max(max_hausdorff, hausdorff_distance(blow, sp.nodes, traced));
        }
      }
      suite["sandwich"] = {{"pairs", cfg.pairs},
                          {"failures", sandwich_fail},
                          {"nonvacuous_lower", nonvacuous_lower},
                          {"max_upper_ratio", max_ratio_upper}};
      suite["trace"] = {{"pairs", cfg.pairs},
                       {"failures", trace_fail},
                       {"flagged", trace_flag},
                       {"max_endpoint_defect", max_endpoint_defect}};
      suite["hausdorff_standard_vs_geodesic"] = max_hausdorff;
      if (sandwich_fail || trace_fail) res.failed = true;
      if (trace_flag) res.flagged = true;

      // nearest-point sweep
      std::size_t np_flagged = 0;
      double max_defect = 0;
      for (std::size_t i = 0; i < std::min<std::size_t>(cfg.pairs, 64); ++i) {
        const PointRef x = sample_point(blow, rng);
        const Vertex zs = static_cast<Vertex>(rng.below(blow.spaces().size()));
        if (zs == x.space) continue;
        const NearestPointResult np = nearest_point_check(blow, d, x, zs);
        max_defect = std::max(max_defect, np.projection_defect);
        if (np.flagged) ++np_flagged;
      }
      suite["nearest_point"] = {{"max_defect", max_defect},
                               {"bound_2K", 2.0 * pi.params.K},
                               {"flagged", np_flagged}};
      if (np_flagged) res.flagged = true;

      const DeltaEstimate delta = estimate_delta(blow, cfg.pairs, cfg.seed);
      suite["delta"] = delta.to_json();
      res.files.emplace_back("delta_estimate.json", delta.to_json().dump(2) + "\n");
      res.report["blowup"] = suite;
    }
  }

  if (wants(cfg, "raw-question", repertoire)) {
    // Reported only, never failed: the raw-distance complex may not satisfy
    // the modified-distance structure theory.
    json suite;
    if (pi.params.K >= pi.params.xi) {
      const auto raw = ProjectionComplex::build(d, pi.params, pi.params.K, MetricMode::raw);
      suite["connected"] = raw.connected();
      std::size_t edges = 0;
      for (Vertex v = 0; v < raw.size(); ++v) edges += raw.graph().adj[v].size();
      suite["edges"] = edges / 2;
      if (raw.connected()) {
        suite["diameter"] = complex_diameter(raw).diameter;
        suite["bottleneck"] = bottleneck_delta(raw.graph()).to_json();
      }
    } else {
      suite["skipped"] = "K below xi";
    }
    res.report["raw_question"] = suite;
  }
  return res;
}

ExperimentResult cmd_action(const ExperimentConfig& cfg) {
  ExperimentConfig augmented = cfg;
  PreparedInstance pi;
  if (cfg.instance == "schottky-default") {
    // Let a-powers up to 8 stay in-window for the translation curve. Deep
    // b-power translates of axis(a) contract below the dedupe resolution and
    // are deliberately not enumerated.
    std::vector<std::string> extras;
    for (int k = cfg.radius + 1; k <= 8; ++k)
      for (char c : {'a', 'A'}) extras.push_back(std::string(k, c));
    auto sch = make_schottky_instance(default_schottky_generators(), cfg.radius, extras);
    pi.loaded.system = sch.inst.system;
    pi.loaded.geodesics = sch.inst;
    pi.loaded.schottky = std::move(sch);
    pi.params = CoreParams::defaults(pi.loaded.system->xi());
    if (cfg.theta) pi.params.theta = *cfg.theta;
    if (cfg.K) pi.params = pi.params.with_K(*cfg.K);
    if (cfg.Kprime) pi.params.Kprime = *cfg.Kprime;
    if (cfg.L) pi.params.L = *cfg.L;
    pi.params.validate();
    pi.provenance = json{{"instance", cfg.instance},
                         {"radius", cfg.radius},
                         {"instance_hash", hex64(pi.loaded.system->content_hash())},
                         {"params", pi.params.to_json()},
                         {"seed", cfg.seed},
                         {"window_extras", "generator powers to 8"}};
  } else {
    pi = prepare_instance(augmented);
  }
  if (!pi.loaded.schottky)
    throw std::invalid_argument("cmd_action requires a group instance");

  ModifiedDistances d(pi.loaded.system);
  resolve_auto_K(cfg, d, pi.params, pi.provenance);
  const auto complex =
      ProjectionComplex::build(d, pi.params, pi.params.K, MetricMode::modified);
  ActionContext ctx(*pi.loaded.schottky);

  ExperimentResult res;
  res.report["provenance"] = pi.provenance;

  const EquivarianceReport eq =
      check_equivariance(ctx, std::max<std::size_t>(cfg.pairs, 500), cfg.seed);
  res.report["equivariance"] = eq.to_json();
  if (!eq.pass) res.failed = true;

  json curves = json::array();
  for (const std::string word : {"a", "b", "ab"}) {
    const TranslationCurve curve = translation_length_estimate(
        ctx, d, pi.params, complex, ctx.element(word), 8);
    curves.push_back({{"word", word},
                      {"basepoint", curve.basepoint},
                      {"distances", curve.distances},
                      {"tau_hat", curve.tau_hat},
                      {"truncated", curve.truncated},
                      {"hypothesis_witnessed", curve.hypothesis_witnessed},
                      {"positive", curve.positive}});
    res.files.emplace_back("translation_" + word + ".csv", curve.to_csv());
    if (!curve.positive && !curve.distances.empty()) res.failed = true;
  }
  res.report["translation_curves"] = curves;

  // Combinatorial axis of ab: the formula threshold (reported) and an
  // empirical threshold below the witnessed self-projections.
  const GroupElement ab = ctx.element("ab");
  double witness = 0;
  for (Vertex y = 0; y < d.size(); ++y)
    for (int N = 1; N <= 2; ++N) {
      const auto fwd = ctx.apply(ctx.element(word_power("ab", N)), y);
      const auto bwd = ctx.apply(ctx.element(word_power("ab", -N)), y);
      if (!fwd || !bwd || *fwd == y || *bwd == y || *fwd == *bwd) continue;
      witness = std::max(witness, d(y, *bwd, *fwd));
    }
  const double empirical_threshold = witness > 0 ? witness * 0.8 : pi.params.Kprime;
  const CombinatorialAxis formula_axis =
      combinatorial_axis(ctx, d, pi.params, ab, pi.params.Kprime, 2);
  const CombinatorialAxis axis =
      combinatorial_axis(ctx, d, pi.params, ab, empirical_threshold, 2);
  res.report["combinatorial_axis"] = {{"formula_threshold", pi.params.Kprime},
                                      {"formula_size", formula_axis.elements.size()},
                                      {"max_witness", witness},
                                      {"empirical", axis.to_json()}};
  if (!axis.elements.empty() && (!axis.order_consistent || !axis.shift_ok))
    res.failed = true;

  json probes = json::array();
  for (double D : {0.0, 1.0, 2.0})
    for (int radius : {1, 2}) {
      const WpdProbe probe = wpd_probe(ctx, d, complex, ab, D, 1, radius);
      probes.push_back(probe.to_json());
    }
  res.report["wpd_probes"] = probes;
  return res;
}

void write_result(const ExperimentConfig& cfg, const std::string& command,
                  const ExperimentResult& result, double elapsed_seconds) {
  write_json_file(cfg.out_dir + "/" + command + "_report.json", result.report);
  for (const auto& [name, contents] : result.files)
    write_text_file(cfg.out_dir + "/" + name, contents);
  std::ostringstream os;
  os << command << " elapsed_seconds " << elapsed_seconds << "\n";
  write_text_file(cfg.out_dir + "/timing.txt", os.str());
}

}  // namespace projcx
