#include "polyvol/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>

namespace polyvol {

namespace {

[[noreturn]] void notPolyhedral(const std::string& why) { throw Error(ErrorCode::NotPolyhedral, why); }

std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

PlanarGraph PlanarGraph::fromFaces(int vertex_count, std::vector<std::vector<int>> faces) {
  if (vertex_count <= 0 || faces.empty()) notPolyhedral("empty graph");
  for (const auto& f : faces) {
    if (f.size() < 3) notPolyhedral("face with fewer than 3 vertices");
    std::set<int> seen;
    for (int v : f) {
      if (v < 0 || v >= vertex_count) notPolyhedral("vertex index out of range");
      if (!seen.insert(v).second) notPolyhedral("face boundary repeats a vertex");
    }
  }

  // Undirected edge -> occurrences (face, runs low->high).
  std::map<std::pair<int, int>, std::vector<std::pair<int, bool>>> occurrences;
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    const auto& cyc = faces[f];
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const int a = cyc[i];
      const int b = cyc[(i + 1) % cyc.size()];
      occurrences[key(a, b)].push_back({f, a < b});
    }
  }
  std::vector<std::vector<std::pair<int, int>>> face_links(faces.size());  // (other face, same dir?)
  for (const auto& [k, occ] : occurrences) {
    if (occ.size() != 2 || occ[0].first == occ[1].first) {
      notPolyhedral("edge " + std::to_string(k.first) + "-" + std::to_string(k.second) +
                    " does not border exactly two faces");
    }
    const bool same = occ[0].second == occ[1].second;
    face_links[occ[0].first].push_back({occ[1].first, same});
    face_links[occ[1].first].push_back({occ[0].first, same});
  }

  // Coherent orientation by propagation from face 0.
  std::vector<int> flip(faces.size(), -1);
  flip[0] = 0;
  std::queue<int> queue;
  queue.push(0);
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (const auto& [g, same] : face_links[f]) {
      const int want = same ? 1 - flip[f] : flip[f];
      if (flip[g] == -1) {
        flip[g] = want;
        queue.push(g);
      } else if (flip[g] != want) {
        notPolyhedral("faces cannot be oriented coherently");
      }
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (flip[f] == -1) notPolyhedral("face adjacency is disconnected");
    if (flip[f] == 1) std::reverse(faces[f].begin(), faces[f].end());
  }

  PlanarGraph g;
  g.vertex_count_ = vertex_count;
  g.faces_ = std::move(faces);
  for (const auto& [k, occ] : occurrences) {
    Edge e;
    e.u = k.first;
    e.v = k.second;
    g.edges_.push_back(e);
  }
  for (int f = 0; f < g.faceCount(); ++f) {
    const auto& cyc = g.faces_[f];
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const int a = cyc[i];
      const int b = cyc[(i + 1) % cyc.size()];
      Edge& e = g.edges_[g.edgeId(a, b)];
      (a < b ? e.left : e.right) = f;
    }
  }

  // Rotation at v: successor of u is w whenever some face reads u, v, w.
  std::vector<std::map<int, int>> next(vertex_count);
  for (const auto& cyc : g.faces_) {
    const std::size_t k = cyc.size();
    for (std::size_t i = 0; i < k; ++i) {
      next[cyc[(i + 1) % k]][cyc[i]] = cyc[(i + 2) % k];
    }
  }
  g.rotation_.resize(vertex_count);
  for (int v = 0; v < vertex_count; ++v) {
    if (next[v].empty()) notPolyhedral("isolated vertex " + std::to_string(v));
    const int start = next[v].begin()->first;
    int u = start;
    do {
      g.rotation_[v].push_back(u);
      u = next[v].at(u);
    } while (u != start && g.rotation_[v].size() <= next[v].size());
    if (g.rotation_[v].size() != next[v].size()) {
      notPolyhedral("vertex " + std::to_string(v) + " is not a manifold point");
    }
  }

  if (vertex_count - g.edgeCount() + g.faceCount() != 2) notPolyhedral("Euler characteristic is not 2");
  return g;
}

int PlanarGraph::edgeId(int u, int v) const {
  const auto k = key(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), k, [](const Edge& e, const auto& kk) {
    return std::pair{e.u, e.v} < kk;
  });
  if (it == edges_.end() || it->u != k.first || it->v != k.second) return -1;
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> PlanarGraph::vertexEdges(int v) const {
  std::vector<int> out;
  for (int u : rotation_[v]) out.push_back(edgeId(u, v));
  return out;
}

std::vector<int> PlanarGraph::vertexFaces(int v) const {
  std::vector<int> out;
  for (int u : rotation_[v]) {
    const Edge& e = edges_[edgeId(u, v)];
    out.push_back(u < v ? e.left : e.right);  // face reading u -> v
  }
  return out;
}

std::vector<int> PlanarGraph::faceEdges(int f) const {
  std::vector<int> out;
  const auto& cyc = faces_[f];
  for (std::size_t i = 0; i < cyc.size(); ++i) out.push_back(edgeId(cyc[i], cyc[(i + 1) % cyc.size()]));
  return out;
}

int PlanarGraph::maxDegree() const {
  int m = 0;
  for (int v = 0; v < vertex_count_; ++v) m = std::max(m, degree(v));
  return m;
}

bool PlanarGraph::faceHasVertex(int f, int v) const {
  return std::find(faces_[f].begin(), faces_[f].end(), v) != faces_[f].end();
}

bool is3Connected(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 4) return false;
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  auto connectedWithout = [&](int x, int y) {
    std::vector<char> seen(n, 0);
    if (x >= 0) seen[x] = 1;
    if (y >= 0) seen[y] = 1;
    int start = 0;
    while (seen[start]) ++start;
    std::vector<int> stack{start};
    seen[start] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == n - (x >= 0) - (y >= 0);
  };
  if (!connectedWithout(-1, -1)) return false;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!connectedWithout(a, b)) return false;
    }
  }
  return true;
}

bool is3Connected(const PlanarGraph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  return is3Connected(g.vertexCount(), edges);
}

bool isPolyhedral(const PlanarGraph& g) {
  for (int v = 0; v < g.vertexCount(); ++v) {
    if (g.degree(v) < 3) return false;
  }
  return is3Connected(g);
}

PlanarGraph dualGraph(const PlanarGraph& g) {
  if (!isPolyhedral(g)) notPolyhedral("dual requires a 3-connected graph");
  std::vector<std::vector<int>> faces;
  for (int v = 0; v < g.vertexCount(); ++v) faces.push_back(g.vertexFaces(v));
  return PlanarGraph::fromFaces(g.faceCount(), std::move(faces));
}

PlanarGraph medialGraph(const PlanarGraph& g) {
  if (!isPolyhedral(g)) notPolyhedral("medial graph requires a 3-connected graph");
  std::vector<std::vector<int>> faces;
  for (int v = 0; v < g.vertexCount(); ++v) faces.push_back(g.vertexEdges(v));
  for (int f = 0; f < g.faceCount(); ++f) faces.push_back(g.faceEdges(f));
  return PlanarGraph::fromFaces(g.edgeCount(), std::move(faces));
}

namespace {

[[noreturn]] void degenerate(const std::string& why) {
  throw Error(ErrorCode::CollapseMakesDegenerate, why);
}

// Rewrites faces under a vertex map, then absorbs degree-2 vertices where the
// resulting map stays simple.
CollapseResult identifyVertices(const PlanarGraph& g, std::vector<int> image) {
  std::vector<std::vector<int>> faces;
  std::vector<int> ids;
  auto cleanup = [&faces, &ids]() {
    std::vector<std::vector<int>> out;
    std::vector<int> out_ids;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      std::vector<int> c;
      for (int v : faces[i]) {
        if (c.empty() || c.back() != v) c.push_back(v);
      }
      while (c.size() > 1 && c.front() == c.back()) c.pop_back();
      if (c.size() < 3) continue;
      std::set<int> distinct(c.begin(), c.end());
      if (distinct.size() != c.size()) degenerate("a face boundary becomes pinched");
      out.push_back(std::move(c));
      out_ids.push_back(ids[i]);
    }
    faces = std::move(out);
    ids = std::move(out_ids);
  };

  for (int f = 0; f < g.faceCount(); ++f) {
    std::vector<int> c;
    for (int v : g.face(f)) c.push_back(image[v]);
    faces.push_back(std::move(c));
    ids.push_back(f);
  }
  cleanup();

  while (true) {
    std::map<int, std::set<int>> nbrs;
    for (const auto& f : faces) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        nbrs[f[i]].insert(f[(i + 1) % f.size()]);
        nbrs[f[i]].insert(f[(i + f.size() - 1) % f.size()]);
      }
    }
    int low = -1;
    for (const auto& [v, s] : nbrs) {
      if (s.size() < 3) {
        low = v;
        break;
      }
    }
    if (low < 0) break;
    if (nbrs[low].size() < 2) degenerate("a vertex loses all but one neighbour");
    for (auto& f : faces) f.erase(std::remove(f.begin(), f.end(), low), f.end());
    for (auto& v : image) {
      if (v == low) v = -1;
    }
    cleanup();
    if (faces.size() < 4) degenerate("collapse leaves fewer than four faces");
  }

  // Compact vertex numbering.
  std::set<int> used;
  for (const auto& f : faces) used.insert(f.begin(), f.end());
  std::map<int, int> renumber;
  for (int v : used) renumber.emplace(v, static_cast<int>(renumber.size()));
  for (auto& f : faces) {
    for (auto& v : f) v = renumber.at(v);
  }
  for (auto& v : image) {
    if (v >= 0) {
      auto it = renumber.find(v);
      v = it == renumber.end() ? -1 : it->second;
    }
  }
  if (renumber.size() < 4) degenerate("collapse leaves fewer than four vertices");

  CollapseResult result;
  try {
    result.graph = PlanarGraph::fromFaces(static_cast<int>(renumber.size()), std::move(faces));
  } catch (const Error& err) {
    degenerate(std::string("collapsed faces do not form a simple sphere map: ") + err.detail());
  }
  result.three_connected = isPolyhedral(result.graph);
  result.vertex_map = std::move(image);
  result.face_map.assign(g.faceCount(), -1);
  for (std::size_t i = 0; i < ids.size(); ++i) result.face_map[ids[i]] = static_cast<int>(i);
  return result;
}

}  // namespace

CollapseResult edgeCollapse(const PlanarGraph& g, int edge) {
  if (edge < 0 || edge >= g.edgeCount()) degenerate("edge id out of range");
  const Edge& e = g.edge(edge);
  std::vector<int> image(g.vertexCount());
  for (int v = 0; v < g.vertexCount(); ++v) image[v] = v;
  image[e.v] = e.u;
  return identifyVertices(g, std::move(image));
}

CollapseResult faceCollapse(const PlanarGraph& g, int f, int arc_start, int arc_length) {
  if (f < 0 || f >= g.faceCount()) degenerate("face id out of range");
  const auto& cyc = g.face(f);
  const int k = static_cast<int>(cyc.size());
  if (arc_length < 1 || arc_length >= k) degenerate("both arcs must be non-empty");
  std::vector<int> image(g.vertexCount());
  for (int v = 0; v < g.vertexCount(); ++v) image[v] = v;
  const int head_a = cyc[((arc_start % k) + k) % k];
  const int head_b = cyc[(((arc_start + arc_length) % k) + k) % k];
  for (int i = 0; i < k; ++i) {
    const int v = cyc[(((arc_start + i) % k) + k) % k];
    image[v] = i < arc_length ? head_a : head_b;
  }
  return identifyVertices(g, std::move(image));
}

namespace {

std::vector<int> rootedCode(const PlanarGraph& g, int root, int first, int dir) {
  const int n = g.vertexCount();
  std::vector<int> label(n, -1), ref(n, -1);
  std::vector<int> order;
  label[root] = 0;
  ref[root] = first;
  order.push_back(root);
  std::vector<int> code{n, g.edgeCount(), g.faceCount()};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int x = order[head];
    const auto& rot = g.neighbors(x);
    const int k = static_cast<int>(rot.size());
    const int start = static_cast<int>(std::find(rot.begin(), rot.end(), ref[x]) - rot.begin());
    for (int j = 0; j < k; ++j) {
      const int y = rot[((start + dir * j) % k + k) % k];
      if (label[y] < 0) {
        label[y] = static_cast<int>(order.size());
        ref[y] = x;
        order.push_back(y);
      }
      code.push_back(label[y]);
    }
    code.push_back(-1);
  }
  return code;
}

std::vector<int> canonicalCode(const PlanarGraph& g) {
  std::vector<int> best;
  for (int v = 0; v < g.vertexCount(); ++v) {
    for (int u : g.neighbors(v)) {
      for (int dir : {1, -1}) {
        auto c = rootedCode(g, v, u, dir);
        if (best.empty() || c < best) best = std::move(c);
      }
    }
  }
  return best;
}

}  // namespace

bool isomorphic(const PlanarGraph& a, const PlanarGraph& b) {
  if (a.vertexCount() != b.vertexCount() || a.edgeCount() != b.edgeCount() ||
      a.faceCount() != b.faceCount()) {
    return false;
  }
  return canonicalCode(a) == canonicalCode(b);
}

std::uint64_t skeletonHash(const PlanarGraph& g) {
  std::uint64_t h = 1469598103934665603ull;
  for (int x : canonicalCode(g)) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
    h *= 1099511628211ull;
  }
  return h;
}

const char* admissibilityName(AdmissibilityStatus s) {
  switch (s) {
    case AdmissibilityStatus::Admissible: return "Admissible";
    case AdmissibilityStatus::AdmissibleBoundary: return "AdmissibleBoundary";
    case AdmissibilityStatus::ViolatedClosedCurve: return "ViolatedClosedCurve";
    case AdmissibilityStatus::ViolatedArc: return "ViolatedArc";
  }
  return "?";
}

bool edgesShareVertex(const PlanarGraph& g, const std::vector<int>& edges) {
  if (edges.empty()) return false;
  for (int candidate : {g.edge(edges[0]).u, g.edge(edges[0]).v}) {
    bool all = true;
    for (int e : edges) {
      if (g.edge(e).u != candidate && g.edge(e).v != candidate) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

namespace {

struct DualWalker {
  const PlanarGraph& g;
  const AngleVector& theta;
  double tol;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (face, crossed edge)
  std::vector<int> faces, edges;
  std::vector<char> on_path;
  AdmissibilityReport report;
  bool done = false;

  DualWalker(const PlanarGraph& graph, const AngleVector& angles, double t)
      : g(graph), theta(angles), tol(t), adj(graph.faceCount()), on_path(graph.faceCount(), 0) {
    for (int e = 0; e < g.edgeCount(); ++e) {
      adj[g.edge(e).left].push_back({g.edge(e).right, e});
      adj[g.edge(e).right].push_back({g.edge(e).left, e});
    }
  }

  double sum() const {
    double s = 0.0;
    for (int e : edges) s += theta[e];
    return s;
  }

  void fail(AdmissibilityStatus status, double s, double bound) {
    report.status = status;
    report.witness_edges = edges;
    report.witness_faces = faces;
    report.witness_sum = s;
    report.witness_bound = bound;
    done = true;
  }

  void closedCurve() {
    const double h = static_cast<double>(edges.size());
    const double bound = (h - 2.0) * std::numbers::pi;
    const double s = sum();
    if (s > bound + tol) {
      fail(AdmissibilityStatus::ViolatedClosedCurve, s, bound);
    } else if (s >= bound - tol) {
      if (!edgesShareVertex(g, edges)) {
        fail(AdmissibilityStatus::ViolatedClosedCurve, s, bound);
      } else if (report.status == AdmissibilityStatus::Admissible) {
        report.status = AdmissibilityStatus::AdmissibleBoundary;
        report.witness_edges = edges;
        report.witness_faces = faces;
        report.witness_sum = s;
        report.witness_bound = bound;
      }
    }
  }

  void cycles(int start, int f) {
    for (const auto& [g2, e] : adj[f]) {
      if (done) return;
      if (g2 == start && edges.size() >= 2 && faces[1] < faces.back()) {
        edges.push_back(e);
        closedCurve();
        edges.pop_back();
        continue;
      }
      if (g2 <= start || on_path[g2]) continue;
      on_path[g2] = 1;
      faces.push_back(g2);
      edges.push_back(e);
      cycles(start, g2);
      edges.pop_back();
      faces.pop_back();
      on_path[g2] = 0;
    }
  }

  void arcs(int f, int target) {
    for (const auto& [g2, e] : adj[f]) {
      if (done) return;
      if (on_path[g2]) continue;
      faces.push_back(g2);
      edges.push_back(e);
      if (g2 == target) {
        const double h = static_cast<double>(edges.size());
        const double bound = (h - 1.0) * std::numbers::pi;
        const double s = sum();
        if (s >= bound - tol && !edgesShareVertex(g, edges)) {
          fail(AdmissibilityStatus::ViolatedArc, s, bound);
        }
      } else {
        on_path[g2] = 1;
        arcs(g2, target);
        on_path[g2] = 0;
      }
      edges.pop_back();
      faces.pop_back();
    }
  }
};

bool facesShareVertex(const PlanarGraph& g, int f1, int f2) {
  for (int v : g.face(f1)) {
    if (g.faceHasVertex(f2, v)) return true;
  }
  return false;
}

}  // namespace

AdmissibilityReport checkBaoBonahon(const PlanarGraph& g, const AngleVector& theta, double tol) {
  if (static_cast<int>(theta.size()) != g.edgeCount()) {
    throw Error(ErrorCode::AngleOutOfRange, "angle vector length differs from the edge count");
  }
  for (double t : theta) {
    if (!(t > 0.0 && t < std::numbers::pi)) {
      throw Error(ErrorCode::AngleOutOfRange, "angle " + std::to_string(t) + " outside (0, pi)");
    }
  }
  DualWalker walker(g, theta, tol);
  for (int s = 0; s < g.faceCount() && !walker.done; ++s) {
    walker.faces = {s};
    walker.edges.clear();
    walker.on_path.assign(g.faceCount(), 0);
    walker.on_path[s] = 1;
    walker.cycles(s, s);
  }
  for (int f1 = 0; f1 < g.faceCount() && !walker.done; ++f1) {
    for (int f2 = f1 + 1; f2 < g.faceCount() && !walker.done; ++f2) {
      if (!facesShareVertex(g, f1, f2)) continue;
      walker.faces = {f1};
      walker.edges.clear();
      walker.on_path.assign(g.faceCount(), 0);
      walker.on_path[f1] = 1;
      walker.arcs(f1, f2);
    }
  }
  return walker.report;
}

namespace corpus {

PlanarGraph tetrahedron() {
  return PlanarGraph::fromFaces(4, {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 3}});
}

PlanarGraph cube() {
  return PlanarGraph::fromFaces(8, {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                                    {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}});
}

PlanarGraph octahedron() {
  std::vector<std::vector<int>> faces;
  for (int sx : {0, 1}) {
    for (int sy : {2, 3}) {
      for (int sz : {4, 5}) faces.push_back({sx, sy, sz});
    }
  }
  return PlanarGraph::fromFaces(6, std::move(faces));
}

PlanarGraph pyramid(int n) {
  std::vector<std::vector<int>> faces;
  std::vector<int> base;
  for (int i = 0; i < n; ++i) base.push_back(i);
  faces.push_back(base);
  for (int i = 0; i < n; ++i) faces.push_back({(i + 1) % n, i, n});
  return PlanarGraph::fromFaces(n + 1, std::move(faces));
}

PlanarGraph prism(int n) {
  std::vector<std::vector<int>> faces;
  std::vector<int> bottom, top;
  for (int i = 0; i < n; ++i) {
    bottom.push_back(i);
    top.push_back(2 * n - 1 - i);
  }
  faces.push_back(bottom);
  faces.push_back(top);
  for (int i = 0; i < n; ++i) faces.push_back({(i + 1) % n, i, n + i, n + (i + 1) % n});
  return PlanarGraph::fromFaces(2 * n, std::move(faces));
}

PlanarGraph antiprism(int n) {
  std::vector<std::vector<int>> faces;
  std::vector<int> bottom, top;
  for (int i = 0; i < n; ++i) {
    bottom.push_back(i);
    top.push_back(2 * n - 1 - i);
  }
  faces.push_back(bottom);
  faces.push_back(top);
  for (int i = 0; i < n; ++i) {
    faces.push_back({(i + 1) % n, i, n + i});
    faces.push_back({(i + 1) % n, n + i, n + (i + 1) % n});
  }
  return PlanarGraph::fromFaces(2 * n, std::move(faces));
}

PlanarGraph cuboctahedron() { return medialGraph(cube()); }

}  // namespace corpus

}  // namespace polyvol
