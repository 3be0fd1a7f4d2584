#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "faberinv/error.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/inversion.hpp"
#include "faberinv/io.hpp"
#include "faberinv/layerpot.hpp"
#include "faberinv/optim.hpp"

namespace py = pybind11;
using namespace faberinv;

namespace {

const char* provenance_name(FptMatrices::Provenance p) {
  return p == FptMatrices::Provenance::Grunsky ? "grunsky" : "quadrature";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polarization tensors and shape reconstruction for 2D conductivity inclusions";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "FaberinvError", PyExc_RuntimeError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object inst = type(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<Contrast>(m, "Contrast")
      .def_static("from_sigma0", &Contrast::from_sigma0, py::arg("sigma0"))
      .def_static("from_lambda", &Contrast::from_lambda, py::arg("lam"))
      .def_property_readonly("sigma0", &Contrast::sigma0)
      .def_property_readonly("lam", &Contrast::lambda)
      .def_property_readonly("extreme", &Contrast::extreme)
      .def("__repr__", [](const Contrast& c) {
        return "Contrast(sigma0=" + io::fmt(c.sigma0()) + ", lam=" + io::fmt(c.lambda()) + ")";
      });

  py::class_<ConformalMap>(m, "ConformalMap")
      .def(py::init<double, std::vector<cplx>>(), py::arg("gamma"), py::arg("coeffs") = std::vector<cplx>{})
      .def_static("identity", &ConformalMap::identity, py::arg("gamma") = 1.0)
      .def_property_readonly("gamma", &ConformalMap::gamma)
      .def_property_readonly("coeffs", &ConformalMap::coeffs)
      .def_property_readonly("order", &ConformalMap::order)
      .def("coeff", &ConformalMap::coeff, py::arg("n"))
      .def("__call__", &ConformalMap::operator(), py::arg("w"))
      .def("__call__", [](const ConformalMap& f, const Eigen::VectorXcd& w) -> Eigen::VectorXcd { return w.unaryExpr(f); })
      .def("derivative", &ConformalMap::derivative, py::arg("w"))
      .def("transformed", &ConformalMap::transformed, py::arg("shift"), py::arg("angle"), py::arg("scale") = 1.0)
      .def("invert", [](const ConformalMap& f, cplx z) { return invert_map(f, z); }, py::arg("z"));

  py::class_<BoundaryMesh>(m, "BoundaryMesh")
      .def_readonly("theta", &BoundaryMesh::theta)
      .def_readonly("points", &BoundaryMesh::points)
      .def_readonly("normals", &BoundaryMesh::normals)
      .def_readonly("curvature", &BoundaryMesh::curvature)
      .def_readonly("weights", &BoundaryMesh::weights)
      .def_property_readonly("size", &BoundaryMesh::size)
      .def_property_readonly("perimeter", &BoundaryMesh::perimeter)
      .def_property_readonly("signed_area", &BoundaryMesh::signed_area)
      .def_property_readonly("diameter", &BoundaryMesh::diameter)
      .def("__len__", &BoundaryMesh::size);

  m.def("mesh_from_map", &mesh_from_map, py::arg("map"), py::arg("n"));
  m.def(
      "mesh_from_shape",
      [](const std::string& kind, const ShapeParams& params, int n) { return mesh_from_parametric(parse_shape_kind(kind), params, n); },
      py::arg("kind"), py::arg("params") = ShapeParams{}, py::arg("n") = 256,
      "Mesh of a built-in curve: 'ellipse', 'kite', 'perturbed_circle' or 'cap'.");
  m.def("default_shape_params", [](const std::string& kind) { return default_shape_params(parse_shape_kind(kind)); });
  m.def(
      "fit_exterior_map", [](const BoundaryMesh& mesh, int order) { return fit_exterior_map(mesh, order).map; }, py::arg("mesh"),
      py::arg("order"));

  py::class_<GptTable>(m, "GptTable")
      .def_readonly("lam", &GptTable::lambda)
      .def_readonly("sigma0", &GptTable::sigma0)
      .def_readonly("order", &GptTable::order)
      .def_readonly("N1", &GptTable::N1)
      .def_readonly("N2", &GptTable::N2)
      .def_readonly("M", &GptTable::M)
      .def_readonly("radius", &GptTable::radius)
      .def_property_readonly("indices",
                             [](const GptTable& t) {
                               std::vector<std::pair<int, int>> out;
                               for (const auto& a : t.indices) out.emplace_back(a.a1, a.a2);
                               return out;
                             })
      .def("first_order", &GptTable::first_order)
      .def("to_json", [](const GptTable& t, const std::string& hash) { return io::table_to_json(t, hash).dump(); },
           py::arg("config_hash") = "")
      .def_static("from_json", [](const std::string& s) { return io::table_from_json(io::json::parse(s)); });

  m.def("compute_gpt_table", &compute_gpt_table, py::arg("mesh"), py::arg("contrast"), py::arg("order"),
        py::arg("with_real") = true);
  m.def("perturb_table", &perturb_table, py::arg("table"), py::arg("noise"), py::arg("seed"));

  py::class_<FptMatrices>(m, "FptMatrices")
      .def_readonly("order", &FptMatrices::order)
      .def_readonly("F1", &FptMatrices::F1)
      .def_readonly("F2", &FptMatrices::F2)
      .def_readonly("truncation", &FptMatrices::truncation)
      .def_property_readonly("provenance", [](const FptMatrices& f) { return provenance_name(f.provenance); });

  m.def("compute_fpt_quadrature", &compute_fpt_quadrature, py::arg("mesh"), py::arg("map"), py::arg("contrast"), py::arg("order"));
  m.def(
      "compute_fpt_grunsky",
      [](const ConformalMap& map, const Contrast& c, int order) { return compute_fpt_grunsky(map, c, order); }, py::arg("map"),
      py::arg("contrast"), py::arg("order"));

  py::class_<EquivalentEllipse>(m, "EquivalentEllipse")
      .def_readonly("a", &EquivalentEllipse::a)
      .def_readonly("b", &EquivalentEllipse::b)
      .def_readonly("theta", &EquivalentEllipse::theta)
      .def_readonly("center", &EquivalentEllipse::center)
      .def_readonly("p", &EquivalentEllipse::p)
      .def_readonly("q", &EquivalentEllipse::q)
      .def("as_map", &EquivalentEllipse::as_map);

  py::class_<RecoveredMap>(m, "RecoveredMap")
      .def_readonly("map", &RecoveredMap::map)
      .def_readonly("sign", &RecoveredMap::sign)
      .def_readonly("tail", &RecoveredMap::tail)
      .def_readonly("consistency", &RecoveredMap::consistency)
      .def_readonly("contrast_mismatch", &RecoveredMap::contrast_mismatch)
      .def_readonly("simple", &RecoveredMap::simple)
      .def_readonly("fallback", &RecoveredMap::fallback);

  m.def("exact_recover", &exact_recover, py::arg("table"), py::arg("order"), py::arg("sign") = std::nullopt);
  m.def(
      "equivalent_ellipse", [](const GptTable& t, double sigma0) { return equivalent_ellipse(t, sigma0); }, py::arg("table"),
      py::arg("sigma0"));
  m.def("reference_shape", &reference_shape, py::arg("table"), py::arg("sigma0"), py::arg("order"));

  m.def("cost", &cost, py::arg("mesh"), py::arg("contrast"), py::arg("target"), py::arg("order"));

  py::class_<ReconResult>(m, "ReconResult")
      .def_property_readonly("mesh", [](const ReconResult& r) { return r.state.mesh; })
      .def_property_readonly("cost_history", [](const ReconResult& r) { return r.state.cost_history; })
      .def_property_readonly("iterations", [](const ReconResult& r) { return r.state.iteration; })
      .def_property_readonly("converged", [](const ReconResult& r) { return r.state.converged; })
      .def_readonly("init_map", &ReconResult::init_map);

  m.def(
      "reconstruct",
      [](const GptTable& target, const Contrast& c, int order, const std::string& init, int max_iter, int mesh_n) {
        ReconOptions opts;
        opts.max_iter = max_iter;
        opts.mesh_n = mesh_n;
        return reconstruct(target, c, order, parse_init_kind(init), opts);
      },
      py::arg("target"), py::arg("contrast"), py::arg("order"), py::arg("init") = "reference", py::arg("max_iter") = 50,
      py::arg("mesh_n") = 256, py::call_guard<py::gil_scoped_release>());

  m.def("config_hash", &io::config_hash, py::arg("text"));
}
