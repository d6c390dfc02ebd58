#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polyvol/flow.hpp"
#include "polyvol/io.hpp"
#include "polyvol/rectify.hpp"
#include "polyvol/volume.hpp"

namespace py = pybind11;
using namespace polyvol;

namespace {

std::vector<Vec4> normals(const Polyhedron& p) {
  std::vector<Vec4> out;
  for (const auto& pl : p.planes()) out.push_back(pl.normal());
  return out;
}

std::vector<Vec3> charts(const Polyhedron& p) {
  std::vector<Vec3> out;
  for (const auto& v : p.vertices()) out.push_back(v.chart());
  return out;
}

Polyhedron fromNormals(const std::vector<Vec4>& ns, const PlanarGraph& g) {
  std::vector<OrientedPlane> planes;
  for (const auto& n : ns) planes.push_back(OrientedPlane::fromNormal(n));
  return buildPolyhedron(planes, g);
}

VolumeOptions volumeOptions(double tolerance, long budget) {
  VolumeOptions vo;
  vo.tolerance = tolerance;
  vo.max_evaluations = budget;
  return vo;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Volumes of generalized hyperbolic polyhedra in the Klein model";

  // Message is "<code>: <detail>".
  py::register_exception<Error>(m, "PolyvolError");

  py::enum_<PointKind>(m, "PointKind")
      .value("Real", PointKind::Real)
      .value("Ideal", PointKind::Ideal)
      .value("Hyperideal", PointKind::Hyperideal);
  py::enum_<VertexStatus>(m, "VertexStatus")
      .value("Proper", VertexStatus::Proper)
      .value("AlmostProper", VertexStatus::AlmostProper)
      .value("Improper", VertexStatus::Improper);
  py::enum_<Properness>(m, "Properness")
      .value("Proper", Properness::Proper)
      .value("AlmostProper", Properness::AlmostProper)
      .value("Improper", Properness::Improper);
  py::enum_<AdmissibilityStatus>(m, "AdmissibilityStatus")
      .value("Admissible", AdmissibilityStatus::Admissible)
      .value("AdmissibleBoundary", AdmissibilityStatus::AdmissibleBoundary)
      .value("ViolatedClosedCurve", AdmissibilityStatus::ViolatedClosedCurve)
      .value("ViolatedArc", AdmissibilityStatus::ViolatedArc);
  py::enum_<VolumeMethod>(m, "VolumeMethod")
      .value("IdealDecomposition", VolumeMethod::IdealDecomposition)
      .value("KleinQuadrature", VolumeMethod::KleinQuadrature);

  m.def("classify_point", [](const Vec3& x, double tau) { return classifyPoint(ProjectivePoint(x), tau); },
        py::arg("x"), py::arg("tau") = kIdealTolerance);
  m.def("lobachevsky", &lobachevsky);

  py::class_<PlanarGraph>(m, "PlanarGraph")
      .def_static("from_faces", &PlanarGraph::fromFaces, py::arg("vertex_count"), py::arg("faces"))
      .def_property_readonly("vertex_count", &PlanarGraph::vertexCount)
      .def_property_readonly("edge_count", &PlanarGraph::edgeCount)
      .def_property_readonly("face_count", &PlanarGraph::faceCount)
      .def_property_readonly("faces", &PlanarGraph::faces)
      .def_property_readonly("edges",
                             [](const PlanarGraph& g) {
                               std::vector<std::pair<int, int>> out;
                               for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
                               return out;
                             })
      .def("__repr__", [](const PlanarGraph& g) {
        return "<PlanarGraph V=" + std::to_string(g.vertexCount()) + " E=" + std::to_string(g.edgeCount()) +
               " F=" + std::to_string(g.faceCount()) + ">";
      });

  m.def("is_polyhedral", &isPolyhedral);
  m.def("dual_graph", &dualGraph);
  m.def("medial_graph", &medialGraph);
  m.def("isomorphic", &isomorphic);
  m.def("skeleton_hash", &skeletonHash);
  m.def("edge_collapse", [](const PlanarGraph& g, int e) {
    auto r = edgeCollapse(g, e);
    return py::make_tuple(r.graph, r.three_connected);
  });
  m.def("face_collapse", [](const PlanarGraph& g, int f, int arc_start, int arc_length) {
    auto r = faceCollapse(g, f, arc_start, arc_length);
    return py::make_tuple(r.graph, r.three_connected);
  });

  py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
      .def_readonly("status", &AdmissibilityReport::status)
      .def_readonly("witness_edges", &AdmissibilityReport::witness_edges)
      .def_readonly("witness_faces", &AdmissibilityReport::witness_faces)
      .def_readonly("witness_sum", &AdmissibilityReport::witness_sum)
      .def_readonly("witness_bound", &AdmissibilityReport::witness_bound)
      .def_property_readonly("admissible", &AdmissibilityReport::admissible);
  m.def("check_bao_bonahon", &checkBaoBonahon, py::arg("graph"), py::arg("angles"), py::arg("tol") = 1e-12);

  auto corpus = m.def_submodule("corpus", "sample polyhedral graphs");
  corpus.def("tetrahedron", &corpus::tetrahedron);
  corpus.def("cube", &corpus::cube);
  corpus.def("octahedron", &corpus::octahedron);
  corpus.def("pyramid", &corpus::pyramid);
  corpus.def("prism", &corpus::prism);
  corpus.def("antiprism", &corpus::antiprism);
  corpus.def("cuboctahedron", &corpus::cuboctahedron);

  py::class_<Polyhedron>(m, "Polyhedron")
      .def_static("from_normals", &fromNormals, py::arg("normals"), py::arg("skeleton"))
      .def_static("from_vertices",
                  [](const PlanarGraph& g, const std::vector<Vec3>& xs) { return polyhedronFromVertices(g, xs); })
      .def_property_readonly("normals", &normals)
      .def_property_readonly("vertices", &charts)
      .def_property_readonly("skeleton", &Polyhedron::skeleton)
      .def_property_readonly("rectified", &Polyhedron::rectified)
      .def("__repr__", [](const Polyhedron& p) {
        return "<Polyhedron V=" + std::to_string(p.vertexCount()) + " F=" + std::to_string(p.faceCount()) + ">";
      });

  auto shapes = m.def_submodule("shapes", "sample polyhedra");
  shapes.def("regular_tetrahedron", &shapes::regularTetrahedron);
  shapes.def("cube", &shapes::cube);
  shapes.def("pyramid", &shapes::pyramid, py::arg("n"), py::arg("base_r"), py::arg("base_z"), py::arg("apex_z"));
  shapes.def("triangular_prism", &shapes::triangularPrism);

  py::class_<PropernessReport>(m, "PropernessReport")
      .def_readonly("kinds", &PropernessReport::kinds)
      .def_readonly("status", &PropernessReport::status)
      .def_readonly("witness", &PropernessReport::witness)
      .def_readonly("overall", &PropernessReport::overall);
  m.def("classify_vertices", &classifyVertices, py::arg("p"), py::arg("tau") = kIdealTolerance);
  m.def("dihedral_angles", &dihedralAngles);
  m.def("edge_lengths", &edgeLengths, py::arg("p"), py::arg("tau") = kIdealTolerance);

  py::class_<VolumeResult>(m, "VolumeResult")
      .def_readonly("value", &VolumeResult::value)
      .def_readonly("error_estimate", &VolumeResult::error_estimate)
      .def_readonly("method", &VolumeResult::method)
      .def_readonly("budget_exceeded", &VolumeResult::budget_exceeded)
      .def_readonly("evaluations", &VolumeResult::evaluations);
  m.def(
      "volume",
      [](const Polyhedron& p, double tolerance, long budget) { return volume(p, volumeOptions(tolerance, budget)); },
      py::arg("p"), py::arg("tolerance") = 1e-5, py::arg("budget") = 10'000'000L);

  m.def("rectification", py::overload_cast<const PlanarGraph&>(&rectification));
  m.def("rectification_volume", &rectificationVolume);
  m.def("tangency_residual", &tangencyResidual);

  m.def(
      "realize_from_angles",
      [](const PlanarGraph& g, const AngleVector& theta, const Polyhedron& seed) {
        return realizeFromAngles(g, theta, seed);
      },
      py::arg("graph"), py::arg("angles"), py::arg("seed"));
  m.def("canonical_gauge", &canonicalGauge);
  m.def("nudge_ideal_vertices", py::overload_cast<const Polyhedron&>(&nudgeIdealVertices));

  py::class_<FlowTrace>(m, "FlowTrace")
      .def_readonly("sup_estimate", &FlowTrace::sup_estimate)
      .def_readonly("final_skeleton", &FlowTrace::final_skeleton)
      .def_readonly("seed", &FlowTrace::seed)
      .def_property_readonly("t", [](const FlowTrace& tr) {
        std::vector<double> out;
        for (const auto& s : tr.samples) out.push_back(s.t);
        return out;
      })
      .def_property_readonly("volumes", [](const FlowTrace& tr) {
        std::vector<double> out;
        for (const auto& s : tr.samples) out.push_back(s.volume.value);
        return out;
      })
      .def_property_readonly("events", [](const FlowTrace& tr) {
        std::vector<std::tuple<std::string, int, double>> out;
        for (const auto& e : tr.events) out.emplace_back(flowEventName(e.kind), e.element, e.t);
        return out;
      })
      .def("csv", [](const FlowTrace& tr) {
        std::ostringstream out;
        writeTraceCsv(out, tr);
        return out.str();
      });
  m.def(
      "run_flow",
      [](const Polyhedron& p, std::uint64_t seed, double tolerance) {
        FlowOptions fo;
        fo.seed = seed;
        fo.final_tolerance = tolerance;
        return runFlow(p, fo);
      },
      py::arg("p"), py::arg("seed") = 1, py::arg("tolerance") = 1e-5);
  m.def(
      "sup_volume", [](const PlanarGraph& g, const Polyhedron& seed) { return supVolume(g, seed); },
      py::arg("graph"), py::arg("seed"));

  m.def("parse", [](const std::string& text) -> py::object {
    std::istringstream in(text);
    Input input = parseInput(in);
    if (auto* g = std::get_if<PlanarGraph>(&input)) return py::cast(*g);
    return py::cast(std::get<Polyhedron>(input));
  });
  m.def("dumps", [](const Polyhedron& p) {
    std::ostringstream out;
    writePolyhedron(out, p);
    return out.str();
  });
  m.def("dumps", [](const PlanarGraph& g) {
    std::ostringstream out;
    writeGraph(out, g);
    return out.str();
  });
}
