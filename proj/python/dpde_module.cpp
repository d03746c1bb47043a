#include "dpde/config.hpp"
#include "dpde/diagnostics.hpp"
#include "dpde/errors.hpp"
#include "dpde/run.hpp"
#include "dpde/synthesis.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dpde;

namespace {

ModelConfig model_from_text(const std::string& text) {
    return build_model(parse_config(text));
}

py::dict trajectory_to_dict(const Trajectory& traj) {
    py::dict out;
    out["times"] = traj.times;
    out["norm_l2"] = traj.norm_l2;
    out["norm_h1"] = traj.norm_h1;
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(traj.fields.size());
    for (const auto& f : traj.fields) coeffs.push_back(f.coeffs);
    out["coeffs"] = coeffs;
    return out;
}

} // namespace

PYBIND11_MODULE(_dpde, m) {
    m.doc() = "spectral Galerkin solver for a parabolic PDE with "
              "state-dependent distributed delay";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InvalidState>(m, "InvalidStateError", PyExc_RuntimeError);
    py::register_exception<BlowupError>(m, "BlowupError", PyExc_RuntimeError);

    m.def("canonical_config",
          [](const std::string& text) { return emit_config(parse_config(text)); },
          py::arg("text"),
          "Parse a config text and re-emit it in canonical form.");

    m.def("eigenvalues",
          [](double L, int modes) {
              return build_basis(L, modes, 4 * modes).lambda;
          },
          py::arg("L"), py::arg("modes"),
          "Dirichlet-Laplacian eigenvalues (k pi / L)^2, k = 1..modes.");

    m.def("fractional_norm",
          [](const std::vector<double>& coeffs, double s, double L) {
              Basis b = build_basis(L, static_cast<int>(coeffs.size()),
                                    4 * static_cast<int>(coeffs.size()));
              SpectralField f;
              f.coeffs = coeffs;
              return fractional_norm(f, s, b);
          },
          py::arg("coeffs"), py::arg("s"), py::arg("L") = 1.0,
          "||A^s u|| for a coefficient vector in the sine basis.");

    m.def("simulate",
          [](const std::string& text, const std::vector<double>& u0_coeffs) {
              ModelConfig mc = model_from_text(text);
              if (static_cast<int>(u0_coeffs.size()) != mc.m)
                  throw InvalidInput("u0 must have exactly m coefficients");
              Discretization disc(mc);
              SpectralField u0;
              u0.coeffs = u0_coeffs;
              RunConfig rc = parse_config(text);
              Trajectory traj =
                  simulate(disc, u0, [&](double) { return u0; }, rc.T);
              return trajectory_to_dict(traj);
          },
          py::arg("config_text"), py::arg("u0"),
          "Integrate from u0 with a constant history equal to u0; returns "
          "times, norms and the coefficient history.");

    m.def("certify",
          [](const std::string& text) {
              RunConfig rc = parse_config(text);
              ModelConfig mc = build_model(rc);
              Basis basis = build_basis(rc.L, rc.m, rc.quad_order);
              ThetaQuad tq = make_theta_quad(rc.r, rc.theta_panels);
              CertificateReport rep =
                  certify_kernel(*mc.kernel, basis, tq, rc.certify_states,
                                 rc.certify_radius, rc.seed);
              return rep.to_json().dump();
          },
          py::arg("config_text"),
          "Measure the kernel constants; returns the certificate as JSON.");

    m.def("run",
          [](const std::string& text, const std::string& out_dir) {
              return run_config(parse_config(text), out_dir);
          },
          py::arg("config_text"), py::arg("out_dir"),
          "Full artifact-writing run (simulate/synthesize/certify/probe); "
          "returns the process exit code.");
}
