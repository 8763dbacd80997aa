#include "gcsf/cli.hpp"
#include "gcsf/diagnostics.hpp"
#include "gcsf/errors.hpp"
#include "gcsf/flow.hpp"
#include "gcsf/geometry.hpp"
#include "gcsf/oracle.hpp"
#include "gcsf/speed_law.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace gcsf;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

py::dict summary_dict(const GeometrySummary& s) {
    py::dict d;
    d["t"] = s.t;
    d["L"] = s.L;
    d["A"] = s.A;
    d["r_in"] = s.r_in;
    d["r_out"] = s.r_out;
    d["k_min"] = s.k_min;
    d["k_max"] = s.k_max;
    d["closure_residual"] = s.closure_residual;
    d["iso_ratio"] = s.iso_ratio;
    d["bonnesen_gap"] = s.bonnesen_gap;
    d["gage_deficit"] = s.gage_deficit;
    d["hausdorff"] = s.hausdorff;
    d["total_curvature_sq"] = s.total_curvature_sq;
    return d;
}

py::dict monitor_dict(const MonitorReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["status"] = to_string(r.status);
    d["asserted"] = r.asserted;
    d["worst_margin"] = r.worst_margin;
    d["tolerance"] = r.tolerance;
    d["first_violation_time"] = r.first_violation_time ? py::cast(*r.first_violation_time) : py::none();
    d["note"] = r.note;
    d["times"] = to_array(r.times);
    d["values"] = to_array(r.values);
    d["details"] = r.details;
    return d;
}

SpatialScheme scheme_from(const std::string& s) {
    if (s == "fourier") return SpatialScheme::fourier;
    if (s == "fd4") return SpatialScheme::fd4;
    throw std::invalid_argument("spatial scheme must be 'fourier' or 'fd4'");
}

}  // namespace

PYBIND11_MODULE(_gcsf, m) {
    m.doc() = "Generalized curve shortening flow v = G(k) k on convex plane curves";

    auto base = py::register_exception<Error>(m, "GcsfError", PyExc_RuntimeError);
    py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
    py::register_exception<ConvexityLossError>(m, "ConvexityLossError", base.ptr());
    py::register_exception<NotClosedError>(m, "NotClosedError", base.ptr());
    py::register_exception<DegenerateProfileError>(m, "DegenerateProfileError", base.ptr());
    py::register_exception<HypothesisError>(m, "HypothesisError", base.ptr());

    py::class_<SpeedLaw>(m, "SpeedLaw")
        .def(py::init<std::string, SpeedLaw::Fn, SpeedLaw::Fn, SpeedLaw::Fn>(), py::arg("label"), py::arg("g"),
             py::arg("dg"), py::arg("d2g"),
             "Law from Python callables for G, G' and G''. Slow; meant for experiments.")
        .def_property_readonly("label", &SpeedLaw::label)
        .def_property_readonly("power_exponent", &SpeedLaw::power_exponent)
        .def("g", &SpeedLaw::g)
        .def("phi", &SpeedLaw::phi)
        .def("phi_prime", &SpeedLaw::phi_prime)
        .def("phi_double_prime", &SpeedLaw::phi_double_prime)
        .def("tail_integral", &SpeedLaw::tail_integral)
        .def("__repr__", [](const SpeedLaw& l) { return "<SpeedLaw " + l.label() + ">"; });
    m.def("power_law", &power_law, py::arg("p"));
    m.def("parse_law", &parse_law, py::arg("name"));

    py::class_<HypothesisReport>(m, "HypothesisReport")
        .def_readonly("h1_ok", &HypothesisReport::h1_ok)
        .def_readonly("h2_convexity_ok", &HypothesisReport::h2_convexity_ok)
        .def_readonly("h2_growth_ok", &HypothesisReport::h2_growth_ok)
        .def_readonly("witness_C0", &HypothesisReport::witness_C0)
        .def_readonly("x_lo", &HypothesisReport::x_lo)
        .def_readonly("x_hi", &HypothesisReport::x_hi)
        .def_readonly("worst_violation", &HypothesisReport::worst_violation)
        .def_readonly("witness_abscissa", &HypothesisReport::witness_abscissa)
        .def("all_ok", &HypothesisReport::all_ok);
    m.def("check_hypotheses", &check_hypotheses, py::arg("law"), py::arg("x_lo"), py::arg("x_hi"),
          py::arg("n_probes") = 256);

    py::class_<AngleGrid>(m, "AngleGrid")
        .def(py::init<std::size_t>(), py::arg("n"))
        .def("__len__", &AngleGrid::size)
        .def_property_readonly("spacing", &AngleGrid::spacing)
        .def_property_readonly("theta", [](const AngleGrid& g) {
            std::vector<double> t(g.size());
            for (std::size_t j = 0; j < t.size(); ++j) t[j] = g.theta(j);
            return to_array(t);
        });

    py::class_<CurvatureProfile>(m, "CurvatureProfile")
        .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& k, double t) {
                 auto v = from_array(k);
                 return CurvatureProfile(AngleGrid(v.size()), std::move(v), t);
             }),
             py::arg("k"), py::arg("t") = 0.0)
        .def_property_readonly("k", [](const CurvatureProfile& p) { return to_array(p.k); })
        .def_readonly("t", &CurvatureProfile::t)
        .def("__len__", [](const CurvatureProfile& p) { return p.k.size(); });

    py::class_<SupportProfile>(m, "SupportProfile")
        .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& h, double t) {
                 auto v = from_array(h);
                 return SupportProfile(AngleGrid(v.size()), std::move(v), t);
             }),
             py::arg("h"), py::arg("t") = 0.0)
        .def_property_readonly("h", [](const SupportProfile& p) { return to_array(p.h); })
        .def_readonly("t", &SupportProfile::t)
        .def("__len__", [](const SupportProfile& p) { return p.h.size(); });

    m.def("circle_profile", [](double R, std::size_t n) { return circle_profile(R, AngleGrid(n)); },
          py::arg("R"), py::arg("n"));
    m.def("ellipse_profile", [](double a, double b, std::size_t n) { return ellipse_profile(a, b, AngleGrid(n)); },
          py::arg("a"), py::arg("b"), py::arg("n"));
    m.def("ellipse_support", [](double a, double b, std::size_t n) { return ellipse_support(a, b, AngleGrid(n)); },
          py::arg("a"), py::arg("b"), py::arg("n"));
    m.def("k_from_support", [](const SupportProfile& sp) { return k_from_support(sp); }, py::arg("support"));
    m.def("support_from_curvature", &support_from_curvature, py::arg("curvature"), py::arg("rel_tol") = 1e-6);
    m.def("length", &length_of, py::arg("curvature"));
    m.def("area", &area_from_support, py::arg("support"));
    m.def("summarize", [](const SupportProfile& sp) { return summary_dict(summarize(k_from_support(sp), sp)); },
          py::arg("support"));
    m.def(
        "radii",
        [](const SupportProfile& sp) {
            const Radii r = radii(sp);
            return py::make_tuple(r.r_in, r.r_out);
        },
        py::arg("support"), "(r_in, r_out): largest inscribed and smallest circumscribed radii.");
    m.def("hausdorff_to_unit_disk", &hausdorff_to_unit_disk, py::arg("support"));
    m.def(
        "boundary_points",
        [](const SupportProfile& sp) {
            const PlaneCurve c = curve_from_support(sp);
            py::array_t<double> out({c.points.size(), std::size_t{2}});
            auto w = out.mutable_unchecked<2>();
            for (std::size_t j = 0; j < c.points.size(); ++j) {
                w(j, 0) = c.points[j].x;
                w(j, 1) = c.points[j].y;
            }
            return out;
        },
        py::arg("support"), "Boundary points as an (n, 2) array.");

    py::class_<BlowUpEstimate>(m, "BlowUpEstimate")
        .def_readonly("t_ref", &BlowUpEstimate::t_ref)
        .def_readonly("omega_lo", &BlowUpEstimate::omega_lo)
        .def_readonly("omega_mid", &BlowUpEstimate::omega_mid)
        .def_readonly("omega_hi", &BlowUpEstimate::omega_hi)
        .def_readonly("method", &BlowUpEstimate::method)
        .def_property_readonly("width", &BlowUpEstimate::width);
    m.def("bracket_blowup", &bracket_blowup, py::arg("t"), py::arg("k_min"), py::arg("k_max"), py::arg("law"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("law_label", &Trajectory::law_label)
        .def_property_readonly("stop_reason", [](const Trajectory& t) { return to_string(t.stop_reason); })
        .def_readonly("stop_detail", &Trajectory::stop_detail)
        .def_readonly("omega", &Trajectory::omega)
        .def_readonly("asymptotic", &Trajectory::asymptotic)
        .def_readonly("max_formulation_gap", &Trajectory::max_formulation_gap)
        .def_property_readonly("accepted_steps", [](const Trajectory& t) { return t.stats.accepted; })
        .def_property_readonly("rejected_steps", [](const Trajectory& t) { return t.stats.rejected; })
        .def("__len__", [](const Trajectory& t) { return t.snapshots.size(); })
        .def_property_readonly("times",
                               [](const Trajectory& t) {
                                   std::vector<double> v;
                                   for (const auto& s : t.snapshots) v.push_back(s.t());
                                   return to_array(v);
                               })
        .def("summary", [](const Trajectory& t, std::size_t i) { return summary_dict(t.snapshots.at(i).summary); },
             py::arg("index"))
        .def("curvature", [](const Trajectory& t, std::size_t i) { return t.snapshots.at(i).curvature; },
             py::arg("index"))
        .def("support", [](const Trajectory& t, std::size_t i) { return t.snapshots.at(i).support; },
             py::arg("index"))
        .def("series",
             [](const Trajectory& t, const std::string& key) {
                 std::vector<double> v;
                 for (const auto& s : t.snapshots) v.push_back(summary_dict(s.summary)[key.c_str()].cast<double>());
                 return to_array(v);
             },
             py::arg("key"), "One summary field across all snapshots.");

    m.def(
        "run",
        [](const SpeedLaw& law, const py::object& initial, double area_fraction,
           std::optional<double> k_cap, std::uint64_t max_steps, double c_cfl, const std::string& formulation,
           const std::string& spatial, bool dealias, std::uint64_t snapshot_every, double snapshot_area_ratio,
           bool require_hypotheses) {
            FlowConfig cfg = py::isinstance<SupportProfile>(initial)
                                 ? FlowConfig(law, initial.cast<SupportProfile>())
                                 : FlowConfig(law, initial.cast<CurvatureProfile>());
            cfg.control.area_fraction = area_fraction;
            cfg.control.k_cap = k_cap;
            cfg.control.max_steps = max_steps;
            cfg.control.c_cfl = c_cfl;
            cfg.control.scheme = scheme_from(spatial);
            cfg.control.dealias = dealias;
            cfg.control.snapshot_every = snapshot_every;
            cfg.control.snapshot_area_ratio = snapshot_area_ratio;
            cfg.formulation = parse_formulation(formulation);
            cfg.require_hypotheses = require_hypotheses;
            py::gil_scoped_release release;
            return run(cfg);
        },
        py::arg("law"), py::arg("initial"), py::arg("area_fraction") = 1e-3, py::arg("k_cap") = py::none(),
        py::arg("max_steps") = 100'000'000, py::arg("c_cfl") = 0.4, py::arg("formulation") = "curvature",
        py::arg("spatial") = "fourier", py::arg("dealias") = false, py::arg("snapshot_every") = 0,
        py::arg("snapshot_area_ratio") = 0.98, py::arg("require_hypotheses") = true,
        "Integrate until a stop criterion fires and return the trajectory.");

    m.def(
        "monitors",
        [](const Trajectory& traj, const SpeedLaw& law) {
            py::list out;
            for (const auto& r : run_all_monitors(traj, law)) out.append(monitor_dict(r));
            return out;
        },
        py::arg("trajectory"), py::arg("law"), "Every diagnostic monitor, as a list of dicts.");

    m.def(
        "containment_run",
        [](const SupportProfile& outer, const SupportProfile& inner, const SpeedLaw& law, double area_fraction) {
            RunControl ctl;
            ctl.area_fraction = area_fraction;
            const ContainmentResult r = containment_run(outer, inner, law, ctl);
            py::dict d;
            d["times"] = to_array(r.times);
            d["min_gap"] = to_array(r.min_gap);
            d["tolerance"] = r.tolerance;
            d["contained"] = r.contained;
            d["stop_reason"] = to_string(r.stop_reason);
            d["stopped_by"] = r.stopped_by;
            return d;
        },
        py::arg("outer"), py::arg("inner"), py::arg("law"), py::arg("area_fraction") = 1e-3);

    py::class_<CircleSolution>(m, "CircleSolution")
        .def(py::init<double, double>(), py::arg("R0"), py::arg("p"))
        .def_readonly("R0", &CircleSolution::R0)
        .def_readonly("p", &CircleSolution::p)
        .def_property_readonly("omega", &CircleSolution::omega)
        .def("state", [](const CircleSolution& s, double t) {
            const CircleState c = circle_state(s, t);
            py::dict d;
            d["R"] = c.R;
            d["k"] = c.k;
            d["L"] = c.L;
            d["A"] = c.A;
            return d;
        });

    m.def(
        "polygon_brute_force",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pts) {
            if (pts.ndim() != 2 || pts.shape(1) != 2) throw std::invalid_argument("expected an (n, 2) array");
            std::vector<Vec2> v(static_cast<std::size_t>(pts.shape(0)));
            auto r = pts.unchecked<2>();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = {r(i, 0), r(i, 1)};
            const PolygonMeasures pm = polygon_brute_force(v);
            py::dict d;
            d["L"] = pm.L;
            d["A"] = pm.A;
            d["r_in"] = pm.r_in;
            d["r_out"] = pm.r_out;
            d["hausdorff"] = pm.hausdorff;
            return d;
        },
        py::arg("points"));

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"gcsf"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
