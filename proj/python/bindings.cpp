#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gho/classical.hpp"
#include "gho/cli.hpp"
#include "gho/errors.hpp"
#include "gho/oracle.hpp"
#include "gho/propagator.hpp"
#include "gho/states.hpp"

namespace py = pybind11;
using namespace gho;

namespace {

py::array_t<Complex> samples(const WavePacket& p) { return py::array_t<Complex>(p.samples.size(), p.samples.data()); }

WavePacket packet_from(const GridSpec& g, double t, const py::array_t<Complex, py::array::c_style | py::array::forcecast>& psi) {
    if (psi.ndim() != 1 || psi.shape(0) != g.n_points)
        throw std::invalid_argument("samples must be a 1-D array with one value per grid node");
    WavePacket p = make_packet(g, t);
    std::copy(psi.data(), psi.data() + psi.shape(0), p.samples.begin());
    return p;
}

}  // namespace

PYBIND11_MODULE(_gho, m) {
    m.doc() = "Generalized harmonic oscillator propagators, modes and oracles";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<DegenerateBasis>(m, "DegenerateBasis", error);
    py::register_exception<CausticEncountered>(m, "CausticEncountered", error);
    py::register_exception<GridTooNarrow>(m, "GridTooNarrow", error);
    py::register_exception<GridMismatch>(m, "GridMismatch", error);

    py::class_<InitialData>(m, "InitialData")
        .def(py::init<double, double>(), py::arg("x"), py::arg("x_dot"))
        .def_readwrite("x", &InitialData::x)
        .def_readwrite("x_dot", &InitialData::x_dot);

    py::class_<BasisInitialData>(m, "BasisInitialData")
        .def(py::init<InitialData, InitialData>(), py::arg("u"), py::arg("v"))
        .def_readwrite("u", &BasisInitialData::u)
        .def_readwrite("v", &BasisInitialData::v);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("dimension", &Scenario::dimension)
        .def_readonly("hbar", &Scenario::hbar)
        .def_readonly("t0", &Scenario::t0)
        .def_readonly("t1", &Scenario::t1)
        .def("to_yaml", &serialize_scenario)
        .def("hash", &scenario_hash);
    m.def("load_scenario", [](const std::string& text) { return load_scenario(text); }, py::arg("text"));
    m.def("load_scenario_file", &load_scenario_file, py::arg("path"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double x_min, double x_max, int n) {
                 GridSpec g{x_min, x_max, n};
                 validate(g);
                 return g;
             }),
             py::arg("x_min"), py::arg("x_max"), py::arg("n_points"))
        .def_readonly("x_min", &GridSpec::x_min)
        .def_readonly("x_max", &GridSpec::x_max)
        .def_readonly("n_points", &GridSpec::n_points)
        .def_property_readonly("dx", &GridSpec::dx)
        .def("nodes", [](const GridSpec& g) {
            const auto x = g.nodes();
            return py::array_t<double>(static_cast<py::ssize_t>(x.size()), x.data());
        });

    py::class_<WavePacket>(m, "WavePacket")
        .def(py::init(&packet_from), py::arg("grid"), py::arg("t"), py::arg("samples"))
        .def_readonly("grid", &WavePacket::grid)
        .def_readonly("t", &WavePacket::t)
        .def_property_readonly("samples", &samples)
        .def("norm", &norm)
        .def("moments", [](const WavePacket& p) {
            const auto mo = position_moments(p);
            return py::make_tuple(mo.mean, mo.variance);
        });
    m.def("l2_distance", &l2_distance);
    m.def("inner_product", py::overload_cast<const WavePacket&, const WavePacket&>(&inner_product));

    py::class_<BasisPoint>(m, "BasisPoint")
        .def_readonly("t", &BasisPoint::t)
        .def_readonly("u", &BasisPoint::u)
        .def_readonly("u_dot", &BasisPoint::u_dot)
        .def_readonly("v", &BasisPoint::v)
        .def_readonly("v_dot", &BasisPoint::v_dot)
        .def_readonly("tau", &BasisPoint::tau)
        .def_readonly("phase", &BasisPoint::phase);

    py::class_<ParticularPoint>(m, "ParticularPoint")
        .def_readonly("t", &ParticularPoint::t)
        .def_readonly("x", &ParticularPoint::x)
        .def_readonly("x_dot", &ParticularPoint::x_dot)
        .def_readonly("xi", &ParticularPoint::xi);

    py::class_<ClassicalBasis>(m, "ClassicalBasis")
        .def("at", &ClassicalBasis::at)
        .def_property_readonly("omega", &ClassicalBasis::omega)
        .def("rho", [](const ClassicalBasis& b, double t) { return rho(b, t).rho; })
        .def("max_wronskian_drift", &ClassicalBasis::max_wronskian_drift);
    py::class_<ParticularSolution>(m, "ParticularSolution").def("at", &ParticularSolution::at);

    m.def(
        "solve_homogeneous_basis",
        [](const Scenario& s, std::optional<BasisInitialData> ics) {
            return solve_homogeneous_basis(s, ics.value_or(default_basis_ics(s)));
        },
        py::arg("scenario"), py::arg("ics") = py::none());
    m.def(
        "solve_particular",
        [](const Scenario& s, std::optional<InitialData> ics) {
            return solve_particular(s, ics.value_or(default_particular_ics(s)));
        },
        py::arg("scenario"), py::arg("ics") = py::none());
    m.def(
        "caustic_times", [](const ClassicalBasis& b, double t_a) { return caustic_times(b, t_a).times; },
        py::arg("basis"), py::arg("t_a"));

    m.def(
        "kernel",
        [](const ClassicalBasis& b, const ParticularSolution& p, double t_b, std::vector<double> r_b, double t_a,
           std::vector<double> r_a) { return kernel(b, p, {t_a, t_b, std::move(r_a), std::move(r_b)}); },
        py::arg("basis"), py::arg("part"), py::arg("t_b"), py::arg("r_b"), py::arg("t_a"), py::arg("r_a"));
    m.def("propagate", [](const WavePacket& w, const ClassicalBasis& b, const ParticularSolution& p,
                          double t_b) { return propagate(w, b, p, t_b); });

    m.def("hermite_function", &hermite_function, py::arg("n"), py::arg("y"));
    m.def("eigenmode", py::overload_cast<const ClassicalBasis&, const ParticularSolution&, int, double, double>(&eigenmode),
          py::arg("basis"), py::arg("part"), py::arg("n"), py::arg("t"), py::arg("x"));
    m.def("eigenmode_packet", &eigenmode_packet, py::arg("basis"), py::arg("part"), py::arg("n"), py::arg("t"),
          py::arg("grid"));
    m.def("coherent_state", &build_generalized_coherent_state, py::arg("basis"), py::arg("part"), py::arg("n"),
          py::arg("t"), py::arg("grid"));
    m.def(
        "invariant_expectation",
        [](const WavePacket& w, const ClassicalBasis& b, const ParticularSolution& p) {
            return invariant_expectation(w, b, p).value;
        },
        py::arg("packet"), py::arg("basis"), py::arg("part"));

    m.def(
        "evolve_tdse",
        [](const Scenario& s, const WavePacket& w, double t_end, double dt) {
            return evolve_tdse(s, w, t_end, {dt, w.grid});
        },
        py::arg("scenario"), py::arg("packet"), py::arg("t_end"), py::arg("dt") = 1e-3);
    m.def(
        "path_integral",
        [](const ClassicalBasis& b, const ParticularSolution& p, double t_b, double x_b, double t_a, double x_a,
           int n_slices) {
            std::vector<double> times(static_cast<std::size_t>(n_slices) + 1);
            for (int k = 0; k <= n_slices; ++k) times[k] = t_a + (t_b - t_a) * k / n_slices;
            return path_integral_oracle(b, p, {t_a, t_b, {x_a}, {x_b}}, n_slices, default_contour(b, p, times));
        },
        py::arg("basis"), py::arg("part"), py::arg("t_b"), py::arg("x_b"), py::arg("t_a"), py::arg("x_a"),
        py::arg("n_slices"));

    m.def(
        "verify",
        [](const std::string& path) {
            cli::ExperimentSpec spec;
            spec.command = "verify";
            spec.scenario_path = path;
            std::ostringstream report;
            const auto results = cli::run_verify(load_scenario_file(path), spec, report);
            py::list out;
            for (const auto& r : results) {
                const char* status = r.status == cli::Status::Pass ? "PASS" : r.status == cli::Status::Fail ? "FAIL" : "SKIP";
                out.append(py::make_tuple(r.name, r.value, r.tolerance, status, r.reason));
            }
            return out;
        },
        py::arg("scenario_path"), "Property suite as (name, value, tolerance, status, reason) tuples.");
}
