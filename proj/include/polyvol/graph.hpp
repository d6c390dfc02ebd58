#pragma once

// Combinatorics of polyhedral 1-skeleta. A PlanarGraph is given by its face
// cycles on S^2; edges, rotations and duals are derived from them.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polyvol/errors.hpp"

namespace polyvol {

struct Edge {
  int u = 0;  // u < v
  int v = 0;
  int left = -1;   // face whose boundary runs u -> v
  int right = -1;  // face whose boundary runs v -> u
};

// Dihedral angles indexed by edge id.
using AngleVector = std::vector<double>;

class PlanarGraph {
 public:
  PlanarGraph() = default;

  // Builds the map from face cycles. Faces are re-oriented coherently (face 0
  // keeps the given order); throws NotPolyhedral when the faces do not form a
  // simple map on the sphere.
  static PlanarGraph fromFaces(int vertex_count, std::vector<std::vector<int>> faces);

  int vertexCount() const { return vertex_count_; }
  int edgeCount() const { return static_cast<int>(edges_.size()); }
  int faceCount() const { return static_cast<int>(faces_.size()); }

  const std::vector<std::vector<int>>& faces() const { return faces_; }
  const std::vector<int>& face(int f) const { return faces_[f]; }
  // Edges sorted lexicographically by (u, v).
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  int degree(int v) const { return static_cast<int>(rotation_[v].size()); }
  // Neighbours of v in cyclic order, starting from the smallest index.
  const std::vector<int>& neighbors(int v) const { return rotation_[v]; }
  // Edge ids at v, parallel to neighbors(v).
  std::vector<int> vertexEdges(int v) const;
  // Faces around v; entry i lies between neighbors(v)[i] and neighbors(v)[i+1].
  std::vector<int> vertexFaces(int v) const;
  // Edge ids along face f; entry i joins face(f)[i] and face(f)[i+1].
  std::vector<int> faceEdges(int f) const;
  // -1 when u and v are not adjacent.
  int edgeId(int u, int v) const;
  // Faces sharing edge e.
  int otherFace(int e, int f) const { return edges_[e].left == f ? edges_[e].right : edges_[e].left; }

  int maxDegree() const;
  bool faceHasVertex(int f, int v) const;

 private:
  int vertex_count_ = 0;
  std::vector<std::vector<int>> faces_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> rotation_;
};

bool is3Connected(const PlanarGraph& g);
// Brute force over vertex pairs on a plain edge list.
bool is3Connected(int vertex_count, const std::vector<std::pair<int, int>>& edges);

// Polyhedral means simple, 3-connected, all degrees and face sizes >= 3.
bool isPolyhedral(const PlanarGraph& g);

PlanarGraph dualGraph(const PlanarGraph& g);

// Vertex per edge of g; faces are the vertex stars of g (first) followed by
// the faces of g.
PlanarGraph medialGraph(const PlanarGraph& g);

struct CollapseResult {
  PlanarGraph graph;
  bool three_connected = false;
  // For every vertex of the input, its image in the output (-1 if absorbed).
  std::vector<int> vertex_map;
  // For every face of the input, its index in the output (-1 if it vanished).
  std::vector<int> face_map;
};

CollapseResult edgeCollapse(const PlanarGraph& g, int edge);

// Face f degenerates to an edge: the arc of `arc_length` consecutive boundary
// vertices starting at position `arc_start` collapses to one endpoint and the
// remaining arc to the other.
CollapseResult faceCollapse(const PlanarGraph& g, int f, int arc_start, int arc_length);

// Map isomorphism up to mirror; equals graph isomorphism for 3-connected graphs.
bool isomorphic(const PlanarGraph& a, const PlanarGraph& b);
std::uint64_t skeletonHash(const PlanarGraph& g);

// Angle admissibility for hyperideal polyhedra.
enum class AdmissibilityStatus {
  Admissible,
  // Admissible, with some closed curve at equality around a shared vertex.
  AdmissibleBoundary,
  ViolatedClosedCurve,
  ViolatedArc,
};

const char* admissibilityName(AdmissibilityStatus s);

struct AdmissibilityReport {
  AdmissibilityStatus status = AdmissibilityStatus::Admissible;
  // Crossed edges of the offending (or boundary) curve, and the faces it visits.
  std::vector<int> witness_edges;
  std::vector<int> witness_faces;
  double witness_sum = 0.0;
  double witness_bound = 0.0;

  bool admissible() const {
    return status == AdmissibilityStatus::Admissible ||
           status == AdmissibilityStatus::AdmissibleBoundary;
  }
};

AdmissibilityReport checkBaoBonahon(const PlanarGraph& g, const AngleVector& theta,
                                    double tol = 1e-12);

bool edgesShareVertex(const PlanarGraph& g, const std::vector<int>& edges);

// Small corpus of polyhedral graphs.
namespace corpus {
PlanarGraph tetrahedron();
PlanarGraph cube();
PlanarGraph octahedron();
PlanarGraph pyramid(int n);
PlanarGraph prism(int n);
PlanarGraph antiprism(int n);
PlanarGraph cuboctahedron();
}  // namespace corpus

}  // namespace polyvol
