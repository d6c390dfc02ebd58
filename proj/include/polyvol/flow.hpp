#pragma once

// Realization from dihedral angles and the angle-scaling deformation t -> t theta.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polyvol/polyhedron.hpp"
#include "polyvol/volume.hpp"

namespace polyvol {

// Real vertex `vertex` held on the polar plane of hyperideal vertex `pole`.
struct AlmostProperPair {
  int vertex = -1;
  int pole = -1;
  friend bool operator==(const AlmostProperPair&, const AlmostProperPair&) = default;
};

struct RealizeOptions {
  double tolerance = 1e-12;
  int max_iterations = 30;
  // Incidences replacing the angle equation of the edge joining the pair.
  std::vector<AlmostProperPair> stratum;
  // Put the result in the canonical gauge.
  bool gauge_fix = true;
};

Polyhedron realizeFromAngles(const PlanarGraph& g, const AngleVector& theta, const Polyhedron& seed,
                             const RealizeOptions& opts = {});

// Isometric copy with the truncation centred at the origin, face 0 facing +z
// and the first edge of face 0 above the positive x axis.
Polyhedron canonicalGauge(const Polyhedron& p);

enum class FlowEventKind {
  EdgeCollapsed,
  FaceCollapsed,
  VertexBecameIdeal,
  AlmostProperOnset,
  BecameHyperidealOnly,
};

const char* flowEventName(FlowEventKind k);

struct FlowEvent {
  FlowEventKind kind = FlowEventKind::VertexBecameIdeal;
  // Edge, face or vertex id in the skeleton current before the event.
  int element = -1;
  // Pole of an almost-proper onset, -1 otherwise.
  int witness = -1;
  double t = 0.0;
  double volume = 0.0;
  // Skeleton after the event (changes only on collapses).
  PlanarGraph skeleton;
};

struct FlowSample {
  double t = 0.0;
  AngleVector angles;
  Polyhedron polyhedron;
  VolumeResult volume;
  // Names of the events the sample closes, ';'-separated; empty otherwise.
  std::string event;
  std::uint64_t skeleton_hash = 0;
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  std::vector<FlowEvent> events;
  PlanarGraph final_skeleton;
  double sup_estimate = 0.0;
  std::uint64_t seed = 0;
  // Largest volume drop allowed by the deformations applied at events.
  double deformation_loss = 0.0;
};

struct FlowOptions {
  std::uint64_t seed = 1;
  double perturbation = 1e-7;
  double dt_initial = 1e-2;
  double dt_min = 1e-7;
  // The run stops once every vertex is hyperideal and the largest angle is
  // below this.
  double final_max_angle = 1e-2;
  // 0 means 10 * E.
  int max_events = 0;
  double trace_tolerance = 1e-3;
  double final_tolerance = 1e-5;
  double collapse_length = 1e-6;
  // Volume the escape and nudge deformations may cost.
  double deformation_volume = 1e-4;
};

FlowTrace runFlow(const Polyhedron& p0, const FlowOptions& opts = {});

// Homothety by 1 + delta about an interior point making the ideal vertices hyperideal.
Polyhedron nudgeIdealVertices(const Polyhedron& p, double delta);
// Same, halving delta from 1e-2 until properness survives.
Polyhedron nudgeIdealVertices(const Polyhedron& p);

// Translation pushing the near-ideal real vertex v onto or just past the sphere,
// keeping the polyhedron proper. Throws NoSeparatingPlane when no such move is found.
Polyhedron escapeDeformation(const Polyhedron& p, int v, double max_volume_loss = 1e-4);
// Explicit translation; magnitude zero gives back p.
Polyhedron escapeDeformation(const Polyhedron& p, const Vec3& translation);

// Random proper polyhedron with the skeleton of `base` and no ideal vertex:
// base scaled about the origin by a factor in [scale_lo, scale_hi], its angles
// jittered by log-normal factors of width `jitter`, realized again.
Polyhedron randomProperPolyhedron(const Polyhedron& base, std::mt19937_64& rng, double scale_lo = 0.5,
                                  double scale_hi = 2.0, double jitter = 0.08);

double supVolume(const PlanarGraph& g, const Polyhedron& seed, const FlowOptions& opts = {});

}  // namespace polyvol
