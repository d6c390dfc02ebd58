#pragma once

// Plane-tuple polyhedra in the Klein model together with their skeleton.

#include <optional>
#include <vector>

#include "polyvol/graph.hpp"
#include "polyvol/mink.hpp"

namespace polyvol {

struct BuildOptions {
  // Rectifications have every edge tangent to the sphere; the edge/ball test
  // is skipped for them.
  bool rectified = false;
  double residual_tol = 1e-8;
  double convex_slack = 1e-9;
};

class Polyhedron {
 public:
  Polyhedron() = default;

  const std::vector<OrientedPlane>& planes() const { return planes_; }
  const OrientedPlane& plane(int f) const { return planes_[f]; }
  // Face cycles are counter-clockwise seen from outside.
  const PlanarGraph& skeleton() const { return skeleton_; }
  const std::vector<ProjectivePoint>& vertices() const { return vertices_; }
  const ProjectivePoint& vertex(int v) const { return vertices_[v]; }
  bool rectified() const { return rectified_; }

  int vertexCount() const { return skeleton_.vertexCount(); }
  int edgeCount() const { return skeleton_.edgeCount(); }
  int faceCount() const { return skeleton_.faceCount(); }

 private:
  friend Polyhedron buildPolyhedron(const std::vector<OrientedPlane>&, const PlanarGraph&,
                                    const BuildOptions&);
  std::vector<OrientedPlane> planes_;
  PlanarGraph skeleton_;
  std::vector<ProjectivePoint> vertices_;
  bool rectified_ = false;
};

Polyhedron buildPolyhedron(const std::vector<OrientedPlane>& planes,
                           const PlanarGraph& expected_skeleton, const BuildOptions& opts = {});

// Face planes fitted through prescribed vertex positions.
Polyhedron polyhedronFromVertices(const PlanarGraph& g, const std::vector<Vec3>& positions,
                                  const BuildOptions& opts = {});

Polyhedron transformed(const Polyhedron& p, const Isometry& iso);
Polyhedron transformed(const Polyhedron& p, const AffineDeformation& d);

enum class VertexStatus { Proper, AlmostProper, Improper };
enum class Properness { Proper, AlmostProper, Improper };

const char* vertexStatusName(VertexStatus s);
const char* propernessName(Properness p);

struct PropernessReport {
  std::vector<PointKind> kinds;
  std::vector<VertexStatus> status;
  // Hyperideal vertex whose polar plane is touched or crossed; -1 otherwise.
  std::vector<int> witness;
  Properness overall = Properness::Proper;
  // Edges with both endpoints real and on the same polar plane.
  std::vector<int> edges_in_truncation_plane;

  bool hasKind(PointKind k) const;
};

PropernessReport classifyVertices(const Polyhedron& p, double tau = kIdealTolerance);

PointKind classifyVertexByAngles(const std::vector<double>& incident_angles,
                                 double tau = kIdealTolerance);

// Dihedral angles at the edges around v.
std::vector<double> incidentAngles(const Polyhedron& p, const AngleVector& theta, int v);

struct TruncatedPolyhedron {
  // Original planes first, then one polar plane per hyperideal vertex.
  std::vector<OrientedPlane> planes;
  std::vector<bool> truncation_face;
  // Hyperideal vertex behind each truncation plane, -1 for original faces.
  std::vector<int> source_vertex;
  // Distinct corner points of the truncated body.
  std::vector<Vec3> points;
  // Boundary polygon per plane as indices into points, counter-clockwise
  // seen from outside; empty when the plane no longer carries a face.
  std::vector<std::vector<int>> faces;
  // Skeleton of the truncation when the faces form a simple sphere map.
  std::optional<PlanarGraph> skeleton;

  bool empty() const;
  // Original planes, in order (the truncation faces removed).
  std::vector<OrientedPlane> stripTruncation() const;
};

TruncatedPolyhedron truncate(const Polyhedron& p, double tau = kIdealTolerance);

AngleVector dihedralAngles(const Polyhedron& p);

// Lengths of the truncated edges; +inf at ideal ends.
std::vector<double> edgeLengths(const Polyhedron& p, double tau = kIdealTolerance);

// Sample polyhedra used across tests and the CLI.
namespace shapes {
// Regular tetrahedron with vertices at distance r from the origin.
Polyhedron regularTetrahedron(double r);
// Cube with vertices at distance r from the origin.
Polyhedron cube(double r);
// Pyramid over a regular n-gon of circumradius base_r in the plane z = base_z,
// apex at height apex_z on the axis.
Polyhedron pyramid(int n, double base_r, double base_z, double apex_z);
// Prism cut from the pyramid over a triangle; the top triangle sits at
// fraction s of the way to the apex.
Polyhedron triangularPrism(double base_r, double base_z, double apex_z, double s);
}  // namespace shapes

}  // namespace polyvol
