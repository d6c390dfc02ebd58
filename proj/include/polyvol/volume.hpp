#pragma once

// Hyperbolic volumes of truncated polyhedra.

#include <array>
#include <functional>

#include "polyvol/polyhedron.hpp"

namespace polyvol {

enum class VolumeMethod { IdealDecomposition, KleinQuadrature };

const char* volumeMethodName(VolumeMethod m);

struct VolumeResult {
  double value = 0.0;
  VolumeMethod method = VolumeMethod::KleinQuadrature;
  double error_estimate = 0.0;
  // Set when the quadrature ran out of evaluations; value is the best estimate.
  bool budget_exceeded = false;
  long evaluations = 0;
};

struct VolumeOptions {
  // Absolute target for the quadrature error.
  double tolerance = 1e-5;
  long max_evaluations = 10'000'000;
  // Apex of the cone decomposition (index into the truncation's points), or
  // -1 for the first ideal point.
  int apex = -1;
};

// Lobachevsky function -int_0^x log|2 sin t| dt.
double lobachevsky(double x);

double idealTetrahedronVolume(const ProjectivePoint& p1, const ProjectivePoint& p2,
                              const ProjectivePoint& p3, const ProjectivePoint& p4,
                              double tau = kIdealTolerance);

VolumeResult volume(const Polyhedron& p, const VolumeOptions& opts = {});
VolumeResult volume(const TruncatedPolyhedron& t, const VolumeOptions& opts = {});

// Volume of a convex region {x : a_i.x <= b_i} inside the closed ball, given
// by its boundary polygons (counter-clockwise seen from outside) and the
// matching outward unit normals and offsets. Always integrates.
VolumeResult kleinQuadrature(const std::vector<std::vector<Vec3>>& polygons,
                             const std::vector<Vec3>& normals, const std::vector<double>& offsets,
                             const VolumeOptions& opts = {});

using PolyhedronPath = std::function<Polyhedron(double)>;

// |dVol/dt + 1/2 sum l_i dtheta_i/dt| at t0 by central differences.
double schlafliResidual(const PolyhedronPath& path, double t0, double h = 1e-4);

}  // namespace polyvol
