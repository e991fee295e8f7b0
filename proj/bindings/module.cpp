#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "projcx/action.hpp"
#include "projcx/blowup.hpp"
#include "projcx/complex.hpp"
#include "projcx/core.hpp"
#include "projcx/experiment.hpp"
#include "projcx/system.hpp"

namespace py = pybind11;
using namespace projcx;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(json_to_py(e));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

Geodesic geodesic_from(py::object a, py::object b) {
  auto pt = [](py::object o) {
    if (o.is_none()) return BoundaryPoint::infinity();
    return BoundaryPoint::at(o.cast<double>());
  };
  return {pt(a), pt(b)};
}

py::object endpoint_to_py(const BoundaryPoint& p) {
  if (p.infinite) return py::none();
  return py::float_(p.value);
}

ExperimentConfig config_from(const py::dict& kw) {
  ExperimentConfig cfg;
  if (kw.contains("instance")) cfg.instance = kw["instance"].cast<std::string>();
  if (kw.contains("radius")) cfg.radius = kw["radius"].cast<int>();
  if (kw.contains("xi")) cfg.xi = kw["xi"].cast<double>();
  if (kw.contains("theta")) cfg.theta = kw["theta"].cast<double>();
  if (kw.contains("K")) cfg.K = kw["K"].cast<double>();
  if (kw.contains("auto_K")) cfg.auto_K = kw["auto_K"].cast<bool>();
  if (kw.contains("Kprime")) cfg.Kprime = kw["Kprime"].cast<double>();
  if (kw.contains("L")) cfg.L = kw["L"].cast<double>();
  if (kw.contains("metric"))
    cfg.metric = kw["metric"].cast<std::string>() == "raw" ? MetricMode::raw
                                                           : MetricMode::modified;
  if (kw.contains("suites")) cfg.suites = kw["suites"].cast<std::vector<std::string>>();
  if (kw.contains("pairs")) cfg.pairs = kw["pairs"].cast<std::size_t>();
  if (kw.contains("seed")) cfg.seed = kw["seed"].cast<std::uint64_t>();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_projcx, m) {
  m.doc() = "projection complexes and quasi-trees of metric spaces";

  py::class_<CoreParams>(m, "CoreParams")
      .def(py::init([](double xi) { return CoreParams::defaults(xi); }), py::arg("xi"))
      .def_readwrite("xi", &CoreParams::xi)
      .def_readwrite("theta", &CoreParams::theta)
      .def_readwrite("K", &CoreParams::K)
      .def_readwrite("Kprime", &CoreParams::Kprime)
      .def_readwrite("L", &CoreParams::L)
      .def("with_K", &CoreParams::with_K)
      .def("validate", &CoreParams::validate);

  py::class_<ProjectionSystem, std::shared_ptr<ProjectionSystem>>(m, "ProjectionSystem")
      .def("__len__", &ProjectionSystem::size)
      .def_property_readonly("xi", &ProjectionSystem::xi)
      .def("dpi", &ProjectionSystem::dpi, py::arg("y"), py::arg("x"), py::arg("z"))
      .def("label", &ProjectionSystem::label)
      .def("validate_axioms",
           [](const ProjectionSystem& sys) { return json_to_py(validate_axioms(sys).to_json()); });

  py::class_<SchottkyInstance>(m, "SchottkyInstance")
      .def_property_readonly(
          "system",
          [](const SchottkyInstance& s) {
            return std::static_pointer_cast<ProjectionSystem>(s.inst.system);
          })
      .def_property_readonly("nu", [](const SchottkyInstance& s) { return s.inst.nu; })
      .def("axis_endpoints", [](const SchottkyInstance& s, Vertex v) {
        const Geodesic& g = s.inst.geodesics.at(v);
        return py::make_tuple(endpoint_to_py(g.a), endpoint_to_py(g.b));
      });

  m.def(
      "schottky_instance",
      [](int radius, const std::vector<std::string>& extras) {
        return make_schottky_instance(default_schottky_generators(), radius, extras);
      },
      py::arg("radius") = 3, py::arg("extra_words") = std::vector<std::string>{});
  m.def(
      "random_instance",
      [](int count, std::uint64_t seed, double lo, double hi, double min_gap) {
        RandomGeodesicSpec spec{count, seed, lo, hi, min_gap};
        return std::static_pointer_cast<ProjectionSystem>(make_random_instance(spec).system);
      },
      py::arg("count") = 30, py::arg("seed") = 1, py::arg("endpoint_lo") = -10.0,
      py::arg("endpoint_hi") = 10.0, py::arg("min_gap") = 0.05);
  m.def(
      "synthetic_chain",
      [](int count, double big) {
        return std::static_pointer_cast<ProjectionSystem>(make_synthetic_chain(count, big));
      },
      py::arg("count") = 8, py::arg("big") = 70.0);
  m.def(
      "tangent_chain",
      [](int count, double delta) {
        return std::static_pointer_cast<ProjectionSystem>(make_tangent_chain(count, delta).system);
      },
      py::arg("count") = 8, py::arg("delta") = 0.02);

  m.def("hyp_distance", [](double x1, double y1, double x2, double y2) {
    return hyp_distance({x1, y1}, {x2, y2});
  });
  m.def(
      "dpi_geodesics",
      [](py::object ya, py::object yb, py::object xa, py::object xb, py::object za,
         py::object zb) {
        return dpi_geodesics(geodesic_from(ya, yb), geodesic_from(xa, xb),
                             geodesic_from(za, zb));
      },
      "diam of the union of two endpoint projections, all geodesics given by "
      "endpoint pairs (None = infinity)");
  m.def("axis_of", [](double m11, double m12, double m21, double m22) {
    const AxisResult r = axis_of(MoebiusMap::from_entries(m11, m12, m21, m22));
    return py::make_tuple(endpoint_to_py(r.axis.a), endpoint_to_py(r.axis.b),
                          r.translation_length);
  });

  py::class_<ModifiedDistances>(m, "ModifiedDistances")
      .def(py::init([](std::shared_ptr<ProjectionSystem> sys) {
             return ModifiedDistances(std::move(sys));
           }),
           py::keep_alive<1, 2>())
      .def("__call__", &ModifiedDistances::operator(), py::arg("y"), py::arg("x"),
           py::arg("z"))
      .def("large_set",
           [](const ModifiedDistances& d, Vertex x, Vertex z, double t) {
             return large_set(d, x, z, t);
           })
      .def("order_interval",
           [](const ModifiedDistances& d, Vertex x, Vertex z, double t) {
             return order_interval(d, x, z, t).elements;
           })
      .def("theorem_main", [](const ModifiedDistances& d, const CoreParams& params) {
        return json_to_py(check_theorem_main(d, params).to_json());
      });

  py::class_<ProjectionComplex>(m, "ProjectionComplex")
      .def("__len__", &ProjectionComplex::size)
      .def_property_readonly("connected", &ProjectionComplex::connected)
      .def_property_readonly("K", &ProjectionComplex::K)
      .def("distance", &ProjectionComplex::graph_distance)
      .def("adjacent", &ProjectionComplex::adjacent)
      .def("diameter",
           [](const ProjectionComplex& c) { return complex_diameter(c).diameter; })
      .def("bottleneck",
           [](const ProjectionComplex& c) {
             return json_to_py(bottleneck_delta(c.graph()).to_json());
           })
      .def("distance_bounds",
           [](const ProjectionComplex& c, const ModifiedDistances& d,
              const CoreParams& params) {
             return json_to_py(distance_bounds(d, params, c).to_json());
           })
      .def("to_dot", [](const ProjectionComplex& c, const ProjectionSystem& sys) {
        return to_dot(c, sys);
      });

  m.def(
      "build_complex",
      [](const ModifiedDistances& d, const CoreParams& params, double K,
         const std::string& metric) {
        return ProjectionComplex::build(
            d, params, K > 0 ? K : params.K,
            metric == "raw" ? MetricMode::raw : MetricMode::modified);
      },
      py::arg("d"), py::arg("params"), py::arg("K") = -1.0,
      py::arg("metric") = "modified");

  py::class_<BlowupSpace>(m, "BlowupSpace")
      .def_property_readonly("node_count", &BlowupSpace::node_count)
      .def_property_readonly("bridge_count", &BlowupSpace::bridge_count)
      .def_property_readonly("L", &BlowupSpace::bridge_length)
      .def("window",
           [](const BlowupSpace& b, Vertex space) {
             const auto& vs = b.spaces().at(space);
             return py::make_tuple(vs.lo, vs.hi);
           })
      .def("distance",
           [](const BlowupSpace& b, std::pair<Vertex, long> p, std::pair<Vertex, long> q) {
             return b.distance({p.first, p.second}, {q.first, q.second});
           })
      .def("sandwich",
           [](const BlowupSpace& b, const ModifiedDistances& d, std::pair<Vertex, long> p,
              std::pair<Vertex, long> q) {
             const SandwichResult r =
                 distance_formula_bounds(b, d, {p.first, p.second}, {q.first, q.second});
             return py::make_tuple(r.lower, r.actual, r.upper, r.ok);
           })
      .def("trace",
           [](const BlowupSpace& b, const ModifiedDistances& d, std::pair<Vertex, long> p,
              std::pair<Vertex, long> q) {
             const TraceReport t =
                 geodesic_trace(b, d, {p.first, p.second}, {q.first, q.second});
             py::dict out;
             out["length"] = t.length;
             out["contiguous"] = t.contiguous;
             out["covers_forced"] = t.covers_forced;
             out["in_order"] = t.in_order;
             py::list visits;
             for (const auto& v : t.visits)
               visits.append(py::make_tuple(v.space, v.entry, v.exit));
             out["visits"] = visits;
             return out;
           })
      .def("estimate_delta",
           [](const BlowupSpace& b, std::size_t samples, std::uint64_t seed) {
             return json_to_py(estimate_delta(b, samples, seed).to_json());
           })
      .def("edge_list_csv", &BlowupSpace::edge_list_csv);

  m.def(
      "build_blowup",
      [](std::shared_ptr<ProjectionSystem> sys, const ModifiedDistances& d,
         const CoreParams& params, const ProjectionComplex& complex) {
        auto anchored = std::dynamic_pointer_cast<const AnchoredSystem>(sys);
        if (!anchored) throw std::invalid_argument("instance carries no geometry");
        return BlowupSpace::build(anchored, d, params, complex);
      },
      py::keep_alive<0, 4>());  // the blowup refers back to the complex

  py::class_<ActionContext>(m, "ActionContext")
      .def(py::init<const SchottkyInstance&>(), py::keep_alive<1, 2>())
      .def("apply",
           [](const ActionContext& ctx, const std::string& word, Vertex y) {
             return ctx.apply(ctx.element(word), y);
           })
      .def("equivariance",
           [](const ActionContext& ctx, std::size_t samples, std::uint64_t seed) {
             return json_to_py(check_equivariance(ctx, samples, seed).to_json());
           })
      .def("translation_curve",
           [](const ActionContext& ctx, const ModifiedDistances& d,
              const CoreParams& params, const ProjectionComplex& complex,
              const std::string& word, int k_max) {
             const TranslationCurve c =
                 translation_length_estimate(ctx, d, params, complex, ctx.element(word), k_max);
             py::dict out;
             out["distances"] = c.distances;
             out["tau_hat"] = c.tau_hat;
             out["positive"] = c.positive;
             out["truncated"] = c.truncated;
             return out;
           })
      .def("combinatorial_axis",
           [](const ActionContext& ctx, const ModifiedDistances& d, const CoreParams& params,
              const std::string& word, double threshold, int max_power) {
             return json_to_py(
                 combinatorial_axis(ctx, d, params, ctx.element(word), threshold, max_power)
                     .to_json());
           })
      .def("wpd_probe", [](const ActionContext& ctx, const ModifiedDistances& d,
                           const ProjectionComplex& complex, const std::string& word,
                           double D, int M, int radius) {
        return json_to_py(wpd_probe(ctx, d, complex, ctx.element(word), D, M, radius).to_json());
      });

  // whole-experiment entry points mirroring the CLI subcommands
  m.def("run_validate",
        [](const py::kwargs& kw) { return json_to_py(cmd_validate(config_from(kw)).report); });
  m.def("run_build",
        [](const py::kwargs& kw) { return json_to_py(cmd_build(config_from(kw)).report); });
  m.def("run_analyze",
        [](const py::kwargs& kw) { return json_to_py(cmd_analyze(config_from(kw)).report); });
  m.def("run_action",
        [](const py::kwargs& kw) { return json_to_py(cmd_action(config_from(kw)).report); });
}
