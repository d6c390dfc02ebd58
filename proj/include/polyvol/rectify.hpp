#pragma once

// Rectification of a polyhedral graph: the projective polyhedron with the
// given skeleton and every edge tangent to the unit sphere.

#include <vector>

#include "polyvol/polyhedron.hpp"
#include "polyvol/volume.hpp"

namespace polyvol {

// Circle {x in S^2 : axis.x = offset}, |axis| = 1.
struct SphereCircle {
  Vec3 axis = Vec3::UnitZ();
  double offset = 0.0;
};

struct MidspherePacking {
  PlanarGraph graph;
  std::vector<SphereCircle> vertex_circles;
  // Axes point away from the polyhedron.
  std::vector<SphereCircle> face_circles;
  // Tangency point of every edge with the sphere, by edge id.
  std::vector<Vec3> tangency;
  int iterations = 0;
  double angle_defect = 0.0;
  // Largest deviation of a tangency point from its circles.
  double circle_residual = 0.0;
};

struct MidsphereOptions {
  double defect_tol = 1e-10;
  int max_iterations = 10000;
};

MidspherePacking solveMidsphere(const PlanarGraph& g, const MidsphereOptions& opts = {});

// Plane tuple of the rectification; the result is marked rectified.
Polyhedron rectification(const PlanarGraph& g);
Polyhedron rectification(const MidspherePacking& packing);

// Largest | distance(origin, edge line) - 1 | over the edges.
double tangencyResidual(const Polyhedron& p);

VolumeResult rectificationVolume(const PlanarGraph& g);

}  // namespace polyvol
