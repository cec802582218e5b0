#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "nlkg/cli.hpp"
#include "nlkg/config.hpp"
#include "nlkg/errors.hpp"
#include "nlkg/nonlinearity.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/scattering.hpp"

namespace py = pybind11;
using namespace nlkg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const Field& field) {
    const auto n = static_cast<py::ssize_t>(field.grid()->points());
    Array out({n, n});
    std::memcpy(out.mutable_data(), field.values().data(), field.size() * sizeof(double));
    return out;
}

Field from_array(const GridPtr& grid, const Array& a) {
    const auto n = static_cast<py::ssize_t>(grid->points());
    if (a.ndim() != 2 || a.shape(0) != n || a.shape(1) != n) throw InvalidInput("expected an (n, n) array");
    return Field(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

StateH to_state(int points, double box_length, const Array& f, const Array& g) {
    const auto grid = Grid2D::create(points, box_length);
    return {from_array(grid, f), from_array(grid, g)};
}

// Result JSON as text; the Python layer decodes it.
std::string with_exit_code(nlohmann::json j, int code) {
    j["exit_code"] = code;
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Windowed nonlinear Klein-Gordon scattering and Taylor-coefficient reconstruction";

    static py::exception<Error> base_error(m, "NlkgError");
    static py::exception<ConfigError> config_error(m, "ConfigError", base_error.ptr());
    static py::exception<ProbeRejected> probe_error(m, "ProbeRejected", base_error.ptr());
    static py::exception<SolverError> solver_error(m, "SolverError", base_error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const ProbeRejected& e) {
            py::set_error(probe_error, e.what());
        } catch (const SolverError& e) {
            py::set_error(solver_error, e.what());
        } catch (const InvalidInput& e) {
            py::set_error(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    m.def(
        "expand",
        [](int order, bool tilde, bool cubic) {
            return expand_text(order, cubic ? ExpandKind::Cubic : tilde ? ExpandKind::WTilde : ExpandKind::W);
        },
        py::arg("order"), py::arg("tilde") = false, py::arg("cubic") = false,
        "Canonical text of the order-N correction functional.");

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("polynomial", [](std::vector<double> c) { return Nonlinearity::polynomial(std::move(c)); },
                    py::arg("coefficients"), "N(y) = P(y) y^3 with P given by its coefficients.")
        .def_static("exponential", [](double c1, double c2) { return Nonlinearity::exponential(c1, c2); },
                    py::arg("c1"), py::arg("c2"), "N(y) = c1 y (exp(c2 y^2) - 1).")
        .def_static("cubic", [](double a) { return Nonlinearity::cubic(a); }, py::arg("a"), "N(y) = a y^3 / 6.")
        .def_static("zero", [] { return Nonlinearity::zero(); })
        .def("derivative", &Nonlinearity::derivative, py::arg("k"), py::arg("y"))
        .def("taylor_coefficient", &Nonlinearity::taylor_coefficient, py::arg("n"))
        .def("__repr__", [](const Nonlinearity& n) { return "<Nonlinearity " + n.describe() + ">"; });

    m.def(
        "gaussian_probe",
        [](int points, double box_length, double amplitude, double sigma, std::pair<double, double> center,
           double velocity_amplitude) {
            const auto grid = Grid2D::create(points, box_length);
            const StateH s =
                make_gaussian_probe(grid, {amplitude, sigma, center.first, center.second, velocity_amplitude});
            return py::make_tuple(to_array(s.f), to_array(s.g));
        },
        py::arg("points"), py::arg("box_length"), py::arg("amplitude") = 1.0, py::arg("sigma") = 0.0,
        py::arg("center") = std::pair<double, double>{0.0, 0.0}, py::arg("velocity_amplitude") = 0.0,
        "Band-limited Gaussian Cauchy pair (f, g) as (n, n) arrays.");

    m.def(
        "energy_norm",
        [](double box_length, const Array& f, const Array& g) {
            return energy_norm(to_state(static_cast<int>(f.shape(0)), box_length, f, g));
        },
        py::arg("box_length"), py::arg("f"), py::arg("g"));

    m.def(
        "k_functional",
        [](double box_length, const Array& f, const Array& g, double lambda, const Nonlinearity& spec,
           double half_width, int steps, double tolerance) {
            const StateH phi = to_state(static_cast<int>(f.shape(0)), box_length, f, g);
            SolverOptions opts;
            opts.tolerance = tolerance;
            return K_functional(phi, lambda, spec, TimeWindow(half_width, steps), opts);
        },
        py::arg("box_length"), py::arg("f"), py::arg("g"), py::arg("lam"), py::arg("nonlinearity"),
        py::arg("half_width"), py::arg("steps"), py::arg("tolerance") = 1e-11,
        "K = <S(lam phi) - lam phi, J phi>_H on the window [-T, T].");

    m.def(
        "resolve_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); },
        py::arg("text"), "Fully resolved config as JSON text.");
    m.def(
        "simulate_json",
        [](const std::string& text) {
            const SimulateResult r = run_simulate(parse_config(text));
            return with_exit_code(r.payload, r.exit_code);
        },
        py::arg("text"));
    m.def(
        "reconstruct_json",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            const ReconstructResult r = run_reconstruct(c);
            return with_exit_code(report_json(c, r), r.exit_code);
        },
        py::arg("text"));
    m.def(
        "gateaux_json",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            const GateauxResult r = run_gateaux(c);
            return with_exit_code(gateaux_json(c, r), r.exit_code);
        },
        py::arg("text"));
}
