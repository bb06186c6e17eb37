#include "minidx/errors.hpp"
#include "minidx/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace minidx;

namespace {

struct Ambient {
  AmbientPtr model;
  std::string spec;
};

SpectralOptions spectral_options(const std::string& discretization, int degree, const std::string& parity) {
  SpectralOptions o;
  if (discretization == "p1") o.discretization = Discretization::P1;
  else if (discretization != "ritz") throw IncompatibleKind("discretization is 'ritz' or 'p1'");
  o.basis_degree = degree;
  if (parity == "even") o.parity = ParityRestriction::Even;
  else if (parity == "odd") o.parity = ParityRestriction::Odd;
  else if (parity != "none") throw IncompatibleKind("parity is 'none', 'even' or 'odd'");
  return o;
}

py::dict margin_dict(const MarginReport& r) {
  py::dict d;
  d["id"] = r.id;
  d["min"] = r.min;
  d["max"] = r.max;
  d["mean"] = r.mean;
  d["samples"] = r.samples;
  d["pass"] = r.pass;
  d["values"] = r.values;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_minidx, m) {
  m.doc() = "Morse index bounds for minimal hypersurfaces from harmonic one-forms";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NotHarmonic>(m, "NotHarmonic", PyExc_ValueError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  py::class_<Ambient>(m, "Ambient")
      .def_property_readonly("label", [](const Ambient& a) { return a.model->label(); })
      .def_property_readonly("spec", [](const Ambient& a) { return a.spec; })
      .def_property_readonly("dim", [](const Ambient& a) { return a.model->intrinsic_dim(); })
      .def_property_readonly("embed_dim", [](const Ambient& a) { return a.model->embed_dim(); })
      .def_property_readonly("einstein_constant", [](const Ambient& a) { return a.model->einstein_constant(); })
      .def(
          "verify_identities",
          [](const Ambient& a, int samples, std::uint64_t seed) {
            IdentityReport r = verify_model_identities(*a.model, samples, seed);
            py::dict d;
            d["residuals"] = r.residuals;
            d["min_sectional"] = r.min_sectional;
            d["max_sectional"] = r.max_sectional;
            d["max_residual"] = r.max_residual();
            return d;
          },
          py::arg("samples") = 1000, py::arg("seed") = 1234)
      .def("__repr__", [](const Ambient& a) { return "<minidx.Ambient " + a.spec + ">"; });

  m.def(
      "ambient",
      [](const std::string& spec) {
        AmbientSpec s = parse_ambient_spec(spec);
        return Ambient{s.build(), s.text};
      },
      py::arg("spec"), "Builds an ambient from a spec such as 'sphere(3)', 'cp(2)' or 'ellipsoid(1,1,1,2)'.");

  py::class_<DiscreteHypersurface>(m, "Hypersurface")
      .def_property_readonly("kind", [](const DiscreteHypersurface& h) { return to_string(h.kind); })
      .def_property_readonly("dim", &DiscreteHypersurface::dim)
      .def_property_readonly("node_count", &DiscreteHypersurface::node_count)
      .def_readonly("resolution", &DiscreteHypersurface::resolution)
      .def_property_readonly("volume", &DiscreteHypersurface::volume)
      .def_property_readonly("betti1", [](const DiscreteHypersurface& h) { return h.chart.betti1; })
      .def_property_readonly("mean_curvature_residual", &DiscreteHypersurface::mean_curvature_residual)
      .def_property_readonly("positions",
                             [](const DiscreteHypersurface& h) {
                               Mat p(h.embed_dim(), h.node_count());
                               for (int a = 0; a < h.node_count(); ++a) p.col(a) = h.position(a);
                               return p;
                             })
      .def_readonly("normal", &DiscreteHypersurface::normal)
      .def_readonly("weights", &DiscreteHypersurface::weights)
      .def_readonly("shape_norm2", &DiscreteHypersurface::shape_norm2)
      .def_readonly("potential", &DiscreteHypersurface::potential);

  m.def(
      "hypersurface",
      [](const Ambient& a, const std::string& kind, int n, double radius, int axis, std::vector<int> resolution) {
        CatalogParams p;
        p.n = n;
        p.radius = radius;
        p.axis_index = axis;
        const CatalogKind k = catalog_kind_from_string(kind);
        if (resolution.empty()) {
          CatalogParams eff = p;
          eff.n = make_chart(*a.model, k, p).dim;
          resolution = default_resolution(k, eff);
        }
        return build_hypersurface(a.model, k, p, resolution);
      },
      py::arg("ambient"), py::arg("kind"), py::arg("n") = 2, py::arg("radius") = 0.0, py::arg("axis") = 0,
      py::arg("resolution") = std::vector<int>{});

  py::class_<DiscreteOneForm>(m, "OneForm")
      .def_readonly("label", &DiscreteOneForm::label)
      .def_property_readonly("provenance", [](const DiscreteOneForm& f) { return to_string(f.provenance); })
      .def_readonly("components", &DiscreteOneForm::components);

  m.def(
      "spectrum",
      [](const DiscreteHypersurface& h, const std::string& discretization, int basis_degree,
         const std::string& parity, int count) {
        SpectralSystem sys = assemble_jacobi(h, spectral_options(discretization, basis_degree, parity));
        SpectrumReport r = spectrum(sys, count);
        py::dict d;
        d["eigenvalues"] = r.eigenvalues;
        d["residuals"] = r.residuals;
        d["index"] = r.morse_index;
        d["multiplicities"] = r.multiplicities();
        d["complete"] = r.complete;
        return d;
      },
      py::arg("hypersurface"), py::arg("discretization") = "ritz", py::arg("basis_degree") = 4,
      py::arg("parity") = "none", py::arg("count") = 0);

  m.def(
      "harmonic_forms",
      [](const DiscreteHypersurface& h) {
        HodgeResult r = harmonic_one_forms(h);
        py::dict d;
        d["basis"] = r.basis;
        d["kernel_dimension"] = r.kernel_dimension;
        d["expected_betti"] = r.expected_betti;
        d["eigenvalues"] = r.eigenvalues;
        d["from_solver"] = r.from_solver;
        return d;
      },
      py::arg("hypersurface"));
  m.def("catalog_forms", &catalog_harmonic_forms, py::arg("hypersurface"));

  m.def(
      "q_identity",
      [](const DiscreteHypersurface& h, const DiscreteOneForm& f, const std::string& mode) {
        SpectralSystem sys = assemble_jacobi(h);
        QIdentityReport r = q_identity_report(sys, f, test_mode_from_string(mode));
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["mass"] = r.mass;
        d["residual"] = r.residual;
        d["bochner"] = r.bochner;
        return d;
      },
      py::arg("hypersurface"), py::arg("form"), py::arg("mode") = "wedge");

  m.def(
      "certificate",
      [](const DiscreteHypersurface& h, double eta, const std::string& mode, const std::string& parity) {
        SpectralSystem sys = assemble_jacobi(h, spectral_options("ritz", 4, parity));
        SpectrumReport sp = spectrum(sys, 0);
        CertificateReport c =
            concentration_certificate(h, harmonic_one_forms(h).basis, eta, certificate_mode_from_string(mode), sp);
        py::dict d;
        d["eta"] = c.eta;
        d["q"] = c.q;
        d["d"] = c.d;
        d["required"] = c.required;
        d["actual"] = c.actual;
        d["margin"] = c.hypothesis_margin;
        d["verdict"] = c.verdict();
        return d;
      },
      py::arg("hypersurface"), py::arg("eta") = 0.0, py::arg("mode") = "wedge", py::arg("parity") = "none");

  m.def(
      "index_bound",
      [](const DiscreteHypersurface& h) {
        const int index = spectrum(assemble_jacobi(h), 0).morse_index;
        IndexBoundReport r = index_bound_report(h, harmonic_one_forms(h).kernel_dimension, index);
        py::dict d;
        d["betti"] = r.betti;
        d["bound"] = r.bound;
        d["index"] = r.index;
        d["consistent"] = r.consistent;
        d["tight"] = r.tight;
        return d;
      },
      py::arg("hypersurface"));

  m.def(
      "theorem_constant",
      [](const Ambient& a, bool totally_geodesic) {
        TheoremConstant c = theorem_constant(*a.model, totally_geodesic);
        return py::make_tuple(c.stated.numerator(), c.stated.denominator(), c.d);
      },
      py::arg("ambient"), py::arg("totally_geodesic") = false,
      "Returns (numerator, denominator, d) of the family constant.");

  m.def("geodesic_sphere_minimal_radius", &geodesic_sphere_minimal_radius, py::arg("m"), py::arg("tol") = 1e-12);
  m.def("product_q", &product_q, py::arg("theta"), py::arg("phi"));
  m.def(
      "product_q_margin", [](int grid, int samples, unsigned seed) { return margin_dict(product_q_margin(grid, samples, seed)); },
      py::arg("grid") = 2001, py::arg("samples") = 10000, py::arg("seed") = 1234);
  m.def(
      "cross_margin",
      [](const Ambient& a, int samples, unsigned seed) { return margin_dict(cross_margin(*a.model, samples, seed)); },
      py::arg("ambient"), py::arg("samples") = 1000, py::arg("seed") = 1234);

  m.def(
      "run_config",
      [](const std::string& path, const std::string& out, double resolution_scale, double tol_scale) {
        RunOptions o;
        o.out_dir = out;
        o.resolution_scale = resolution_scale;
        o.tol_scale = tol_scale;
        std::ostringstream log;
        const int code = run_config(load_config(path), o, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("path"), py::arg("out") = "minidx-out", py::arg("resolution_scale") = 1.0, py::arg("tol_scale") = 1.0,
      "Runs a scenario config; returns (exit_status, log).");
}
