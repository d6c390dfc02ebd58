#include "polyvol/rectify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace polyvol {

namespace {

constexpr double kPi = std::numbers::pi;

// Circles of the vertex-face incidence pattern: nodes 0..V-1 are vertices,
// V..V+F-1 faces. Neighbours of a vertex node are its faces, of a face node
// its vertices.
struct Pattern {
  int V = 0, F = 0;
  std::vector<std::vector<int>> nbrs;
  std::vector<int> sense;  // +1 / -1 turning direction of nbrs in the plane
  std::vector<bool> line;  // circle through the point sent to infinity

  explicit Pattern(const PlanarGraph& g) : V(g.vertexCount()), F(g.faceCount()) {
    nbrs.resize(V + F);
    sense.resize(V + F);
    for (int v = 0; v < V; ++v) {
      for (int f : g.vertexFaces(v)) nbrs[v].push_back(V + f);
      sense[v] = -1;
    }
    for (int f = 0; f < F; ++f) {
      nbrs[V + f] = g.face(f);
      sense[V + f] = 1;
    }
    const Edge& e0 = g.edge(0);
    line.assign(V + F, false);
    line[e0.u] = line[e0.v] = line[V + e0.left] = line[V + e0.right] = true;
  }
  int size() const { return V + F; }
};

// Angle-sum defects: sum of kite angles around every finite circle minus 2 pi.
Eigen::VectorXd defects(const Pattern& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
  for (int s = 0; s < p.size(); ++s) {
    if (p.line[s]) continue;
    double sum = -2.0 * kPi;
    for (int n : p.nbrs[s]) sum += p.line[n] ? kPi : 2.0 * std::atan(std::exp(x[n] - x[s]));
    out[s] = sum;
  }
  return out;
}

void solveRadii(const Pattern& p, Eigen::VectorXd& x, const MidsphereOptions& opts, int& iterations,
                double& defect) {
  std::vector<int> unknown;
  int pinned = -1;
  for (int s = 0; s < p.size(); ++s) {
    if (p.line[s]) continue;
    if (pinned < 0) {
      pinned = s;
    } else {
      unknown.push_back(s);
    }
  }
  std::vector<int> slot(p.size(), -1);
  for (std::size_t i = 0; i < unknown.size(); ++i) slot[unknown[i]] = static_cast<int>(i);
  const int m = static_cast<int>(unknown.size());

  Eigen::VectorXd d = defects(p, x);
  auto restricted = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = full[unknown[i]];
    return r;
  };
  for (iterations = 0; iterations < opts.max_iterations; ++iterations) {
    defect = d.cwiseAbs().maxCoeff();
    if (defect < opts.defect_tol) return;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      const int s = unknown[i];
      for (int n : p.nbrs[s]) {
        if (p.line[n]) continue;
        const double w = 1.0 / std::cosh(x[n] - x[s]);
        jac(i, i) -= w;
        if (slot[n] >= 0) jac(i, slot[n]) += w;
      }
    }
    const Eigen::VectorXd r = restricted(d);
    const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
    double lambda = 1.0;
    const double before = r.norm();
    for (int k = 0; k < 40; ++k) {
      Eigen::VectorXd trial = x;
      for (int i = 0; i < m; ++i) trial[unknown[i]] += lambda * step[i];
      const Eigen::VectorXd dt = defects(p, trial);
      if (restricted(dt).norm() < before || k == 39) {
        x = trial;
        d = dt;
        break;
      }
      lambda *= 0.5;
    }
  }
  defect = d.cwiseAbs().maxCoeff();
  if (defect >= opts.defect_tol) {
    throw Error(ErrorCode::SolverDiverged,
                "angle defect " + std::to_string(defect) + " after " + std::to_string(iterations) +
                    " iterations");
  }
}

Vec3 inverseStereographic(const Eigen::Vector2d& z) {
  const double q = z.squaredNorm();
  return Vec3(2.0 * z.x(), 2.0 * z.y(), q - 1.0) / (q + 1.0);
}

// Best-fit circle on S^2 through the given points.
SphereCircle circleThrough(const std::vector<Vec3>& pts, const Vec3& away_from) {
  Eigen::MatrixXd m(pts.size(), 4);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) << pts[i].transpose(), -1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  Eigen::Vector4d h = svd.matrixV().col(3);
  const double len = h.head<3>().norm();
  SphereCircle c{h.head<3>() / len, h[3] / len};
  if (c.axis.dot(away_from) > c.offset) {
    c.axis = -c.axis;
    c.offset = -c.offset;
  }
  return c;
}

}  // namespace

MidspherePacking solveMidsphere(const PlanarGraph& g, const MidsphereOptions& opts) {
  if (!isPolyhedral(g)) throw Error(ErrorCode::NotPolyhedral, "rectification needs a 3-connected graph");
  const Pattern pat(g);
  const int n = pat.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  MidspherePacking out;
  solveRadii(pat, x, opts, out.iterations, out.angle_defect);

  // Lay the finite circles out in the plane, breadth first.
  std::vector<Eigen::Vector2d> centre(n);
  std::vector<bool> placed(n, false);
  std::vector<std::vector<double>> direction(n);
  int root = 0;
  while (pat.line[root]) ++root;
  centre[root] = Eigen::Vector2d::Zero();
  placed[root] = true;

  auto radius = [&](int s) { return std::exp(x[s]); };
  auto kite = [&](int s, int k) {
    const int m = pat.nbrs[s][k];
    return pat.line[m] ? kPi / 2.0 : std::atan(radius(m) / radius(s));
  };
  auto spread = [&](int s, int ref, double phi_ref) {
    const int k = static_cast<int>(pat.nbrs[s].size());
    direction[s].assign(k, 0.0);
    direction[s][ref] = phi_ref;
    for (int j = 1; j < k; ++j) {
      const int prev = (ref + j - 1) % k;
      const int cur = (ref + j) % k;
      direction[s][cur] = direction[s][prev] + pat.sense[s] * (kite(s, prev) + kite(s, cur));
    }
  };
  spread(root, 0, 0.0);
  std::queue<int> bfs;
  bfs.push(root);
  while (!bfs.empty()) {
    const int s = bfs.front();
    bfs.pop();
    for (std::size_t k = 0; k < pat.nbrs[s].size(); ++k) {
      const int m = pat.nbrs[s][k];
      if (pat.line[m] || placed[m]) continue;
      const double phi = direction[s][k];
      const double dist = std::hypot(radius(s), radius(m));
      centre[m] = centre[s] + dist * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      placed[m] = true;
      const auto& back = pat.nbrs[m];
      const int ref = static_cast<int>(std::find(back.begin(), back.end(), s) - back.begin());
      spread(m, ref, phi + kPi);
      bfs.push(m);
    }
  }
  for (int s = 0; s < n; ++s) {
    if (!pat.line[s] && !placed[s]) {
      throw Error(ErrorCode::SolverDiverged, "circle pattern layout is disconnected");
    }
  }

  // Tangency points: where consecutive neighbours of a circle meet it.
  std::vector<Eigen::Vector2d> sum(g.edgeCount(), Eigen::Vector2d::Zero());
  std::vector<int> count(g.edgeCount(), 0);
  for (int s = 0; s < n; ++s) {
    if (pat.line[s]) continue;
    const int k = static_cast<int>(pat.nbrs[s].size());
    const auto edges = s < pat.V ? g.vertexEdges(s) : g.faceEdges(s - pat.V);
    for (int j = 0; j < k; ++j) {
      const double phi = direction[s][j] + pat.sense[s] * kite(s, j);
      const int e = s < pat.V ? edges[(j + 1) % k] : edges[j];
      sum[e] += centre[s] + radius(s) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      ++count[e];
    }
  }
  std::vector<Vec3> t(g.edgeCount());
  t[0] = Vec3::UnitZ();
  for (int e = 1; e < g.edgeCount(); ++e) {
    if (count[e] == 0) throw Error(ErrorCode::SolverDiverged, "edge without a finite circle");
    t[e] = inverseStereographic(sum[e] / count[e]);
  }

  // Centre the tangency points by hyperbolic translations.
  for (int it = 0; it < 500; ++it) {
    Vec3 bary = Vec3::Zero();
    for (const auto& p : t) bary += p;
    bary /= static_cast<double>(t.size());
    if (bary.norm() < 1e-15) break;
    const Isometry iso = Isometry::movingToOrigin(ProjectivePoint(bary));
    for (auto& p : t) p = iso.apply(ProjectivePoint(p)).chart().normalized();
  }

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : t) centroid += p;
  centroid /= static_cast<double>(t.size());
  auto faceCircle = [&](int f) {
    std::vector<Vec3> pts;
    for (int e : g.faceEdges(f)) pts.push_back(t[e]);
    return circleThrough(pts, centroid);
  };

  // Gauge: face 0 outward axis to +z, first tangency of face 0 into the xz half-plane x > 0.
  const Vec3 a0 = faceCircle(0).axis;
  Eigen::Matrix3d rot = Eigen::Quaterniond::FromTwoVectors(a0, Vec3::UnitZ()).toRotationMatrix();
  const Vec3 first = rot * t[g.faceEdges(0)[0]];
  rot = Eigen::AngleAxisd(-std::atan2(first.y(), first.x()), Vec3::UnitZ()).toRotationMatrix() * rot;
  for (auto& p : t) p = rot * p;
  centroid = rot * centroid;

  out.graph = g;
  out.tangency = t;
  for (int f = 0; f < g.faceCount(); ++f) out.face_circles.push_back(faceCircle(f));
  for (int v = 0; v < g.vertexCount(); ++v) {
    std::vector<Vec3> pts;
    for (int e : g.vertexEdges(v)) pts.push_back(t[e]);
    out.vertex_circles.push_back(circleThrough(pts, centroid));
  }
  double res = 0.0;
  for (int e = 0; e < g.edgeCount(); ++e) {
    const Edge& ed = g.edge(e);
    for (const SphereCircle* c : {&out.vertex_circles[ed.u], &out.vertex_circles[ed.v],
                                  &out.face_circles[ed.left], &out.face_circles[ed.right]}) {
      res = std::max(res, std::abs(c->axis.dot(t[e]) - c->offset));
    }
  }
  out.circle_residual = res;
  return out;
}

Polyhedron rectification(const MidspherePacking& packing) {
  std::vector<OrientedPlane> planes;
  for (const auto& c : packing.face_circles) planes.push_back(OrientedPlane::fromEquation(c.axis, c.offset));
  BuildOptions opts;
  opts.rectified = true;
  return buildPolyhedron(planes, packing.graph, opts);
}

Polyhedron rectification(const PlanarGraph& g) { return rectification(solveMidsphere(g)); }

double tangencyResidual(const Polyhedron& p) {
  double worst = 0.0;
  for (const auto& e : p.skeleton().edges()) {
    const Vec3 a = p.vertex(e.u).chart();
    const Vec3 d = (p.vertex(e.v).chart() - a).normalized();
    const Vec3 foot = a - a.dot(d) * d;
    worst = std::max(worst, std::abs(foot.norm() - 1.0));
  }
  return worst;
}

VolumeResult rectificationVolume(const PlanarGraph& g) { return volume(rectification(g)); }

}  // namespace polyvol
