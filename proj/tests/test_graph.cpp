#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include "polyvol/graph.hpp"

using namespace polyvol;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<PlanarGraph> corpusGraphs() {
  std::vector<PlanarGraph> out{corpus::tetrahedron(), corpus::cube(), corpus::octahedron(), corpus::prism(3)};
  for (int n = 3; n <= 8; ++n) out.push_back(corpus::pyramid(n));
  return out;
}

std::vector<std::pair<int, int>> edgeList(const PlanarGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

// Connectivity after deleting a set of vertices, by flood fill.
bool connectedWithout(int n, const std::vector<std::pair<int, int>>& edges, const std::set<int>& removed) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int start = 0;
  while (removed.count(start)) ++start;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int y : adj[x]) {
      if (!seen[y] && !removed.count(y)) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!removed.count(v) && !seen[v]) return false;
  }
  return true;
}

// Octahedron graph built by hand from the cube's faces: two faces adjacent
// iff they share an edge.
PlanarGraph octahedronFromCubeFaces() {
  const PlanarGraph c = corpus::cube();
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < c.faceCount(); ++a) {
    for (int b = a + 1; b < c.faceCount(); ++b) {
      int shared = 0;
      for (int v : c.face(a)) shared += c.faceHasVertex(b, v);
      if (shared == 2) edges.emplace_back(a, b);
    }
  }
  EXPECT_EQ(edges.size(), 12u);
  // Faces of the octahedron are the cube's vertices: the three faces around each.
  std::vector<std::vector<int>> faces;
  for (int v = 0; v < c.vertexCount(); ++v) {
    std::vector<int> around;
    for (int f = 0; f < c.faceCount(); ++f) {
      if (c.faceHasVertex(f, v)) around.push_back(f);
    }
    faces.push_back(around);
  }
  return PlanarGraph::fromFaces(6, faces);
}

}  // namespace

TEST(PlanarGraph, CountsAndEuler) {
  for (const auto& g : corpusGraphs()) {
    EXPECT_EQ(g.vertexCount() - g.edgeCount() + g.faceCount(), 2);
    int degree_sum = 0;
    for (int v = 0; v < g.vertexCount(); ++v) degree_sum += g.degree(v);
    EXPECT_EQ(degree_sum, 2 * g.edgeCount());
    for (int e = 0; e < g.edgeCount(); ++e) {
      EXPECT_LT(g.edge(e).u, g.edge(e).v);
      EXPECT_NE(g.edge(e).left, g.edge(e).right);
      EXPECT_EQ(g.edgeId(g.edge(e).u, g.edge(e).v), e);
      EXPECT_EQ(g.edgeId(g.edge(e).v, g.edge(e).u), e);
    }
  }
}

TEST(PlanarGraph, FaceEdgesAndVertexFacesConsistent) {
  for (const auto& g : corpusGraphs()) {
    for (int f = 0; f < g.faceCount(); ++f) {
      const auto es = g.faceEdges(f);
      const auto& cyc = g.face(f);
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        const Edge& e = g.edge(es[i]);
        const int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
        EXPECT_TRUE((e.u == a && e.v == b) || (e.u == b && e.v == a));
        EXPECT_EQ(a < b ? e.left : e.right, f);
      }
    }
    for (int v = 0; v < g.vertexCount(); ++v) {
      const auto fs = g.vertexFaces(v);
      EXPECT_EQ(static_cast<int>(fs.size()), g.degree(v));
      for (int f : fs) EXPECT_TRUE(g.faceHasVertex(f, v));
    }
  }
}

TEST(PlanarGraph, RejectsNonSpheres) {
  EXPECT_THROW(PlanarGraph::fromFaces(3, {{0, 1, 2}}), Error);
  EXPECT_THROW(PlanarGraph::fromFaces(4, {{0, 1, 2}, {0, 1, 3}}), Error);
  EXPECT_THROW(PlanarGraph::fromFaces(4, {{0, 1}, {1, 2, 3}}), Error);
  EXPECT_THROW(PlanarGraph::fromFaces(4, {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 5}}), Error);
}

TEST(ThreeConnected, Examples) {
  EXPECT_TRUE(is3Connected(corpus::tetrahedron()));
  EXPECT_FALSE(is3Connected(4, {{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_TRUE(is3Connected(corpus::cube()));
}

TEST(ThreeConnected, MatchesPairRemovalOracle) {
  std::vector<PlanarGraph> graphs = corpusGraphs();
  graphs.push_back(corpus::antiprism(4));
  graphs.push_back(corpus::cuboctahedron());
  for (const auto& g : graphs) {
    const auto edges = edgeList(g);
    bool oracle = g.vertexCount() >= 4;
    int pairs = 0;
    for (int a = 0; a < g.vertexCount(); ++a) {
      for (int b = a + 1; b < g.vertexCount(); ++b, ++pairs) {
        oracle = oracle && connectedWithout(g.vertexCount(), edges, {a, b});
      }
    }
    if (g.vertexCount() == 8) EXPECT_EQ(pairs, 28);
    EXPECT_EQ(is3Connected(g), oracle);
    EXPECT_EQ(is3Connected(g.vertexCount(), edges), oracle);
  }
  // A 2-connected graph: cycle with one chord.
  const std::vector<std::pair<int, int>> ring{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}};
  EXPECT_FALSE(is3Connected(6, ring));
}

TEST(Dual, Examples) {
  EXPECT_TRUE(isomorphic(dualGraph(corpus::tetrahedron()), corpus::tetrahedron()));
  EXPECT_TRUE(isomorphic(dualGraph(corpus::cube()), octahedronFromCubeFaces()));
  EXPECT_TRUE(isomorphic(dualGraph(corpus::cube()), corpus::octahedron()));
  for (int n = 3; n <= 8; ++n) EXPECT_TRUE(isomorphic(dualGraph(corpus::pyramid(n)), corpus::pyramid(n)));
}

TEST(Dual, Involution) {
  for (const auto& g : corpusGraphs()) {
    const auto d = dualGraph(g);
    EXPECT_EQ(d.vertexCount(), g.faceCount());
    EXPECT_EQ(d.faceCount(), g.vertexCount());
    EXPECT_TRUE(is3Connected(d));
    EXPECT_TRUE(isomorphic(dualGraph(d), g));
  }
}

TEST(Medial, Examples) {
  EXPECT_TRUE(isomorphic(medialGraph(corpus::tetrahedron()), corpus::octahedron()));
  for (int n = 3; n <= 8; ++n) EXPECT_TRUE(isomorphic(medialGraph(corpus::pyramid(n)), corpus::antiprism(n)));
  const auto m = medialGraph(corpus::cube());
  EXPECT_EQ(m.faceCount(), 14);
  EXPECT_TRUE(isomorphic(m, corpus::cuboctahedron()));
}

TEST(Medial, Properties) {
  for (const auto& g : corpusGraphs()) {
    const auto m = medialGraph(g);
    EXPECT_EQ(m.vertexCount(), g.edgeCount());
    EXPECT_EQ(m.faceCount(), g.vertexCount() + g.faceCount());
    for (int v = 0; v < m.vertexCount(); ++v) EXPECT_EQ(m.degree(v), 4);
    EXPECT_TRUE(isomorphic(m, medialGraph(dualGraph(g))));
    // Adjacent medial vertices: edges sharing a vertex and a face.
    for (const auto& me : m.edges()) {
      const Edge& a = g.edge(me.u);
      const Edge& b = g.edge(me.v);
      const bool share_vertex = a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
      const bool share_face = a.left == b.left || a.left == b.right || a.right == b.left || a.right == b.right;
      EXPECT_TRUE(share_vertex && share_face);
    }
  }
}

TEST(Isomorphism, DistinguishesAndIgnoresLabels) {
  EXPECT_FALSE(isomorphic(corpus::cube(), corpus::prism(4 + 1)));
  EXPECT_FALSE(isomorphic(corpus::pyramid(4), corpus::prism(3)));
  EXPECT_TRUE(isomorphic(corpus::prism(4), corpus::cube()));
  // Relabel the cube and reverse every face.
  const PlanarGraph c = corpus::cube();
  const std::vector<int> perm{5, 2, 7, 0, 3, 6, 1, 4};
  std::vector<std::vector<int>> faces;
  for (auto f : c.faces()) {
    for (int& v : f) v = perm[v];
    std::reverse(f.begin(), f.end());
    faces.push_back(f);
  }
  const auto relabelled = PlanarGraph::fromFaces(8, faces);
  EXPECT_TRUE(isomorphic(c, relabelled));
  EXPECT_EQ(skeletonHash(c), skeletonHash(relabelled));
  EXPECT_NE(skeletonHash(c), skeletonHash(corpus::octahedron()));
}

TEST(EdgeCollapse, Examples) {
  EXPECT_THROW(edgeCollapse(corpus::tetrahedron(), 0), Error);
  // A base edge of the square pyramid gives K4.
  const PlanarGraph p = corpus::pyramid(4);
  const auto r = edgeCollapse(p, p.edgeId(0, 1));
  EXPECT_TRUE(r.three_connected);
  EXPECT_TRUE(isomorphic(r.graph, corpus::tetrahedron()));
  EXPECT_EQ(r.vertex_map[0], r.vertex_map[1]);
}

TEST(EdgeCollapse, CountsDrop) {
  for (const auto& g : {corpus::cube(), corpus::prism(5), corpus::cuboctahedron(), corpus::antiprism(5)}) {
    for (int e = 0; e < g.edgeCount(); ++e) {
      try {
        const auto r = edgeCollapse(g, e);
        EXPECT_LE(r.graph.edgeCount(), g.edgeCount() - 1);
        EXPECT_EQ(r.graph.vertexCount() - r.graph.edgeCount() + r.graph.faceCount(), 2);
        EXPECT_EQ(r.three_connected, is3Connected(r.graph));
        EXPECT_EQ(r.face_map.size(), static_cast<std::size_t>(g.faceCount()));
        for (int f = 0; f < g.faceCount(); ++f) {
          if (r.face_map[f] < 0) continue;
          // Surviving faces keep their vertices, up to the identification.
          std::set<int> image;
          for (int v : g.face(f)) image.insert(r.vertex_map[v]);
          for (int v : r.graph.face(r.face_map[f])) EXPECT_TRUE(image.count(v));
        }
      } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::CollapseMakesDegenerate);
      }
    }
  }
}

TEST(FaceCollapse, Examples) {
  const auto prism = corpus::prism(3);
  for (int arc = 1; arc <= 2; ++arc) {
    const auto r = faceCollapse(prism, 0, 0, arc);
    EXPECT_TRUE(isomorphic(r.graph, corpus::tetrahedron()));
    EXPECT_EQ(r.face_map[0], -1);
  }
  const auto cube = corpus::cube();
  const auto half = faceCollapse(cube, 0, 0, 2);
  EXPECT_EQ(half.graph.vertexCount(), 6);
  EXPECT_EQ(half.graph.edgeCount(), 9);
  EXPECT_EQ(half.graph.faceCount(), 5);
  EXPECT_TRUE(isomorphic(half.graph, corpus::prism(3)));
  const auto corner = faceCollapse(cube, 0, 0, 1);
  EXPECT_EQ(corner.graph.vertexCount() - corner.graph.edgeCount() + corner.graph.faceCount(), 2);
  EXPECT_TRUE(isomorphic(corner.graph, corpus::pyramid(4)));
  EXPECT_THROW(faceCollapse(cube, 0, 0, 4), Error);
  EXPECT_THROW(faceCollapse(cube, 0, 0, 0), Error);
}

TEST(FaceCollapse, ReducesFaceCount) {
  for (const auto& g : {corpus::cube(), corpus::prism(5), corpus::cuboctahedron()}) {
    for (int f = 0; f < g.faceCount(); ++f) {
      const int k = static_cast<int>(g.face(f).size());
      for (int start = 0; start < k; ++start) {
        for (int len = 1; len < k; ++len) {
          try {
            EXPECT_LT(faceCollapse(g, f, start, len).graph.faceCount(), g.faceCount());
          } catch (const Error& err) {
            EXPECT_EQ(err.code(), ErrorCode::CollapseMakesDegenerate);
          }
        }
      }
    }
  }
}

TEST(BaoBonahon, Examples) {
  const auto k4 = corpus::tetrahedron();
  EXPECT_EQ(checkBaoBonahon(k4, AngleVector(6, 0.2)).status, AdmissibilityStatus::Admissible);
  const auto right = checkBaoBonahon(k4, AngleVector(6, kPi / 2));
  EXPECT_EQ(right.status, AdmissibilityStatus::ViolatedClosedCurve);
  EXPECT_EQ(right.witness_edges.size(), 3u);
  EXPECT_TRUE(edgesShareVertex(k4, right.witness_edges));
  EXPECT_NEAR(right.witness_sum, 1.5 * kPi, 1e-12);
  const auto cube = corpus::cube();
  const auto r = checkBaoBonahon(cube, AngleVector(12, 2 * kPi / 3));
  EXPECT_EQ(r.status, AdmissibilityStatus::ViolatedClosedCurve);
  EXPECT_NEAR(r.witness_sum, 2 * kPi, 1e-12);
  EXPECT_THROW(checkBaoBonahon(k4, AngleVector(6, 0.0)), Error);
  EXPECT_THROW(checkBaoBonahon(k4, AngleVector(5, 0.2)), Error);
}

TEST(BaoBonahon, IdealBoundaryIsReported) {
  // pi/3 everywhere on K4: every vertex curve at equality around its vertex.
  const auto r = checkBaoBonahon(corpus::tetrahedron(), AngleVector(6, kPi / 3));
  EXPECT_EQ(r.status, AdmissibilityStatus::AdmissibleBoundary);
  EXPECT_TRUE(r.admissible());
}

TEST(BaoBonahon, SmallUniformAnglesAdmissible) {
  for (const auto& g : corpusGraphs()) {
    const double limit = kPi / g.maxDegree();
    for (double frac : {0.1, 0.5, 0.99}) {
      EXPECT_TRUE(checkBaoBonahon(g, AngleVector(g.edgeCount(), frac * limit)).admissible());
    }
  }
}

TEST(BaoBonahon, ScalingPreservesAdmissibility) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 1.2);
  for (const auto& g : {corpus::tetrahedron(), corpus::cube(), corpus::pyramid(5)}) {
    int found = 0;
    for (int i = 0; i < 2000 && found < 20; ++i) {
      AngleVector t(g.edgeCount());
      for (auto& x : t) x = u(rng);
      if (checkBaoBonahon(g, t).status != AdmissibilityStatus::Admissible) continue;
      ++found;
      for (double s : {0.9, 0.5, 0.1}) {
        AngleVector scaled = t;
        for (auto& x : scaled) x *= s;
        EXPECT_EQ(checkBaoBonahon(g, scaled).status, AdmissibilityStatus::Admissible);
      }
    }
    EXPECT_GT(found, 0);
  }
}

TEST(BaoBonahon, VertexStarOracle) {
  // Every vertex-linking curve is one of the closed curves; a violated star is always caught.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.01, kPi - 0.01);
  const auto g = corpus::cube();
  for (int i = 0; i < 200; ++i) {
    AngleVector t(g.edgeCount());
    for (auto& x : t) x = u(rng);
    bool star = false;
    for (int v = 0; v < g.vertexCount(); ++v) {
      double s = 0.0;
      for (int e : g.vertexEdges(v)) s += t[e];
      star = star || s > (g.degree(v) - 2) * kPi;
    }
    if (star) EXPECT_FALSE(checkBaoBonahon(g, t).admissible());
  }
}
