#include "polyvol/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

namespace polyvol {

namespace {

std::string vertexName(int v) { return "vertex " + std::to_string(v); }

Vec3 newellNormal(const std::vector<Vec3>& poly) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) n += poly[i].cross(poly[(i + 1) % poly.size()]);
  return n;
}

}  // namespace

Polyhedron buildPolyhedron(const std::vector<OrientedPlane>& planes,
                           const PlanarGraph& expected_skeleton, const BuildOptions& opts) {
  const PlanarGraph& g = expected_skeleton;
  if (static_cast<int>(planes.size()) != g.faceCount()) {
    throw Error(ErrorCode::SkeletonMismatch, std::to_string(planes.size()) + " planes for " +
                                                 std::to_string(g.faceCount()) + " faces");
  }
  std::vector<Vec4> unit_normals;
  for (const auto& p : planes) unit_normals.push_back(lowered(p.normal()).normalized());

  std::vector<ProjectivePoint> vertices(g.vertexCount());
  std::vector<Vec4> homogeneous(g.vertexCount());
  for (int v = 0; v < g.vertexCount(); ++v) {
    const auto faces = g.vertexFaces(v);
    Eigen::MatrixXd m(faces.size(), 4);
    for (std::size_t i = 0; i < faces.size(); ++i) m.row(i) = unit_normals[faces[i]].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    Vec4 x = svd.matrixV().col(3);
    const double residual = (m * x).norm();
    if (residual > opts.residual_tol) {
      throw Error(ErrorCode::SkeletonMismatch,
                  "planes around " + vertexName(v) + " do not concur (residual " +
                      std::to_string(residual) + ")");
    }
    if (std::abs(x[0]) < 1e-12) {
      throw Error(ErrorCode::SkeletonMismatch, vertexName(v) + " lies at infinity");
    }
    if (x[0] < 0.0) x = -x;
    homogeneous[v] = x;
    vertices[v] = ProjectivePoint(Vec3(x.tail<3>() / x[0]));
  }

  for (int v = 0; v < g.vertexCount(); ++v) {
    for (int f = 0; f < g.faceCount(); ++f) {
      if (g.faceHasVertex(f, v)) continue;
      const double val = unit_normals[f].dot(homogeneous[v]);
      if (val > opts.convex_slack) {
        throw Error(ErrorCode::NonConvex,
                    vertexName(v) + " lies outside the half-space of face " + std::to_string(f));
      }
      if (val > -opts.convex_slack) {
        throw Error(ErrorCode::SkeletonMismatch,
                    vertexName(v) + " also lies on face " + std::to_string(f));
      }
    }
  }

  if (!opts.rectified) {
    for (const auto& e : g.edges()) {
      const Vec3 a = vertices[e.u].chart();
      const Vec3 b = vertices[e.v].chart();
      const Vec3 d = b - a;
      const double s = d.squaredNorm() > 0.0 ? std::clamp(-a.dot(d) / d.squaredNorm(), 0.0, 1.0) : 0.0;
      if ((a + s * d).norm() >= 1.0) {
        throw Error(ErrorCode::EdgeMissesBall, "edge " + std::to_string(e.u) + "-" +
                                                   std::to_string(e.v) + " misses H^3");
      }
    }
  }

  Polyhedron out;
  out.planes_ = planes;
  out.vertices_ = std::move(vertices);
  out.rectified_ = opts.rectified;

  // Orient face cycles counter-clockwise seen from outside.
  std::vector<Vec3> poly;
  for (int v : g.face(0)) poly.push_back(out.vertices_[v].chart());
  if (newellNormal(poly).dot(planes[0].spatialNormal()) < 0.0) {
    auto faces = g.faces();
    for (auto& f : faces) std::reverse(f.begin(), f.end());
    out.skeleton_ = PlanarGraph::fromFaces(g.vertexCount(), std::move(faces));
  } else {
    out.skeleton_ = g;
  }
  return out;
}

Polyhedron polyhedronFromVertices(const PlanarGraph& g, const std::vector<Vec3>& positions,
                                  const BuildOptions& opts) {
  if (static_cast<int>(positions.size()) != g.vertexCount()) {
    throw Error(ErrorCode::SkeletonMismatch, "position count differs from the vertex count");
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& x : positions) centroid += x;
  centroid /= static_cast<double>(positions.size());
  std::vector<OrientedPlane> planes;
  for (int f = 0; f < g.faceCount(); ++f) {
    const auto& cyc = g.face(f);
    Eigen::MatrixXd m(cyc.size(), 4);
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      m.row(i) << 1.0, positions[cyc[i]][0], positions[cyc[i]][1], positions[cyc[i]][2];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    OrientedPlane p = OrientedPlane::fromNormal(lowered(svd.matrixV().col(3)));
    if (p.pairing(ProjectivePoint(centroid)) > 0.0) p = p.flipped();
    planes.push_back(p);
  }
  return buildPolyhedron(planes, g, opts);
}

Polyhedron transformed(const Polyhedron& p, const Isometry& iso) {
  std::vector<OrientedPlane> planes;
  for (const auto& pl : p.planes()) planes.push_back(iso.apply(pl));
  BuildOptions opts;
  opts.rectified = p.rectified();
  return buildPolyhedron(planes, p.skeleton(), opts);
}

Polyhedron transformed(const Polyhedron& p, const AffineDeformation& d) {
  BuildOptions opts;
  opts.rectified = p.rectified();
  return buildPolyhedron(d.apply(std::span<const OrientedPlane>(p.planes())), p.skeleton(), opts);
}

const char* vertexStatusName(VertexStatus s) {
  switch (s) {
    case VertexStatus::Proper: return "Proper";
    case VertexStatus::AlmostProper: return "AlmostProper";
    case VertexStatus::Improper: return "Improper";
  }
  return "?";
}

const char* propernessName(Properness p) {
  switch (p) {
    case Properness::Proper: return "Proper";
    case Properness::AlmostProper: return "AlmostProper";
    case Properness::Improper: return "Improper";
  }
  return "?";
}

bool PropernessReport::hasKind(PointKind k) const {
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

PropernessReport classifyVertices(const Polyhedron& p, double tau) {
  const int n = p.vertexCount();
  PropernessReport r;
  r.kinds.resize(n);
  r.status.assign(n, VertexStatus::Proper);
  r.witness.assign(n, -1);
  std::vector<OrientedPlane> polar(n);
  for (int v = 0; v < n; ++v) {
    r.kinds[v] = classifyPoint(p.vertex(v), tau);
    if (r.kinds[v] == PointKind::Hyperideal) polar[v] = polarPlane(p.vertex(v), tau);
  }
  std::vector<std::set<int>> touching(n);
  for (int w = 0; w < n; ++w) {
    if (r.kinds[w] != PointKind::Real) continue;
    const Vec4 x = timelikeUnit(p.vertex(w));
    for (int v = 0; v < n; ++v) {
      if (v == w || r.kinds[v] != PointKind::Hyperideal) continue;
      const double s = minkowski(x, polar[v].normal());
      if (s > tau) {
        r.status[w] = VertexStatus::Improper;
        r.witness[w] = v;
      } else if (s >= -tau) {
        touching[w].insert(v);
        if (r.status[w] == VertexStatus::Proper) {
          r.status[w] = VertexStatus::AlmostProper;
          r.witness[w] = v;
        }
      }
    }
  }
  for (int w = 0; w < n; ++w) {
    if (r.status[w] == VertexStatus::Improper) {
      r.overall = Properness::Improper;
    } else if (r.status[w] == VertexStatus::AlmostProper && r.overall == Properness::Proper) {
      r.overall = Properness::AlmostProper;
    }
  }
  for (int e = 0; e < p.edgeCount(); ++e) {
    const auto& ed = p.skeleton().edge(e);
    for (int v : touching[ed.u]) {
      if (touching[ed.v].count(v)) {
        r.edges_in_truncation_plane.push_back(e);
        break;
      }
    }
  }
  return r;
}

PointKind classifyVertexByAngles(const std::vector<double>& incident_angles, double tau) {
  const int k = static_cast<int>(incident_angles.size());
  if (k < 3) throw Error(ErrorCode::TooFewAngles, std::to_string(k) + " angles at a vertex");
  double sum = 0.0;
  for (double t : incident_angles) {
    if (!(t > 0.0 && t < std::numbers::pi)) {
      throw Error(ErrorCode::AngleOutOfRange, "angle " + std::to_string(t) + " outside (0, pi)");
    }
    sum += t;
  }
  const double flat = (k - 2) * std::numbers::pi;
  if (sum < flat - tau) return PointKind::Hyperideal;
  if (sum > flat + tau) return PointKind::Real;
  return PointKind::Ideal;
}

std::vector<double> incidentAngles(const Polyhedron& p, const AngleVector& theta, int v) {
  std::vector<double> out;
  for (int e : p.skeleton().vertexEdges(v)) out.push_back(theta[e]);
  return out;
}

namespace {

// Half-space {x : a.x <= b} with |a| = 1.
struct HalfSpace {
  Vec3 a;
  double b;
  double eval(const Vec3& x) const { return a.dot(x) - b; }
};

HalfSpace halfSpaceOf(const OrientedPlane& p) {
  const Vec3 s = p.spatialNormal();
  const double len = s.norm();
  return {s / len, p.normal()[0] / len};
}

std::vector<Vec3> clip(const std::vector<Vec3>& poly, const HalfSpace& h, double eps) {
  std::vector<Vec3> out;
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % k];
    const double sa = h.eval(a);
    const double sb = h.eval(b);
    if ((sa < -eps && sb > eps) || (sa > eps && sb < -eps)) {
      out.push_back(a + (sa / (sa - sb)) * (b - a));
    }
    if (sb <= eps) out.push_back(b);
  }
  return out;
}

}  // namespace

bool TruncatedPolyhedron::empty() const {
  return std::all_of(faces.begin(), faces.end(), [](const auto& f) { return f.empty(); });
}

std::vector<OrientedPlane> TruncatedPolyhedron::stripTruncation() const {
  std::vector<OrientedPlane> out;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (!truncation_face[i]) out.push_back(planes[i]);
  }
  return out;
}

TruncatedPolyhedron truncate(const Polyhedron& p, double tau) {
  const auto report = classifyVertices(p, tau);
  if (report.overall == Properness::Improper) {
    throw Error(ErrorCode::ImproperInput, "polyhedron is not proper or almost proper");
  }
  const PlanarGraph& g = p.skeleton();
  constexpr double eps = 1e-12;

  TruncatedPolyhedron t;
  t.planes = p.planes();
  t.truncation_face.assign(p.faceCount(), false);
  t.source_vertex.assign(p.faceCount(), -1);
  std::vector<HalfSpace> cuts;
  for (int v = 0; v < p.vertexCount(); ++v) {
    if (report.kinds[v] != PointKind::Hyperideal) continue;
    const OrientedPlane pl = polarPlane(p.vertex(v), tau);
    t.planes.push_back(pl);
    t.truncation_face.push_back(true);
    t.source_vertex.push_back(v);
    cuts.push_back(halfSpaceOf(pl));
  }

  std::vector<std::vector<Vec3>> polygons;
  for (int f = 0; f < p.faceCount(); ++f) {
    std::vector<Vec3> poly;
    for (int v : g.face(f)) poly.push_back(p.vertex(v).chart());
    for (const auto& h : cuts) {
      if (poly.empty()) break;
      poly = clip(poly, h, eps);
    }
    polygons.push_back(std::move(poly));
  }
  std::vector<HalfSpace> faces_h;
  for (int f = 0; f < p.faceCount(); ++f) faces_h.push_back(halfSpaceOf(p.plane(f)));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    // Square on the polar plane enclosing its disk, then cut down to the body.
    const Vec3 n = cuts[i].a;
    const Vec3 centre = cuts[i].b * n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - cuts[i].b * cuts[i].b));
    Vec3 u = n.unitOrthogonal();
    Vec3 w = n.cross(u);
    const double s = 2.0 * rho + 1e-3;
    std::vector<Vec3> poly{centre + s * (-u - w), centre + s * (u - w), centre + s * (u + w),
                           centre + s * (-u + w)};
    for (const auto& h : faces_h) {
      if (poly.empty()) break;
      poly = clip(poly, h, eps);
    }
    for (std::size_t j = 0; j < cuts.size() && !poly.empty(); ++j) {
      if (j != i) poly = clip(poly, cuts[j], eps);
    }
    polygons.push_back(std::move(poly));
  }

  // Merge coincident corners and snap near-ideal ones onto the sphere.
  auto indexOf = [&t](Vec3 x) {
    const double r = x.norm();
    if (std::abs(r - 1.0) <= kIdealTolerance) x /= r;
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      if ((t.points[i] - x).norm() <= 1e-9) return static_cast<int>(i);
    }
    t.points.push_back(x);
    return static_cast<int>(t.points.size() - 1);
  };
  for (const auto& poly : polygons) {
    std::vector<int> idx;
    for (const auto& x : poly) {
      const int i = indexOf(x);
      if (idx.empty() || idx.back() != i) idx.push_back(i);
    }
    while (idx.size() > 1 && idx.front() == idx.back()) idx.pop_back();
    if (idx.size() >= 3) {
      std::vector<Vec3> pts;
      for (int i : idx) pts.push_back(t.points[i]);
      if (newellNormal(pts).norm() < 1e-14) idx.clear();
    } else {
      idx.clear();
    }
    t.faces.push_back(std::move(idx));
  }

  std::vector<std::vector<int>> live;
  for (const auto& f : t.faces) {
    if (!f.empty()) live.push_back(f);
  }
  if (live.size() >= 4) {
    try {
      t.skeleton = PlanarGraph::fromFaces(static_cast<int>(t.points.size()), live);
    } catch (const Error&) {
      t.skeleton.reset();
    }
  }
  return t;
}

AngleVector dihedralAngles(const Polyhedron& p) {
  AngleVector out;
  for (const auto& e : p.skeleton().edges()) {
    out.push_back(dihedralAngle(p.plane(e.left), p.plane(e.right)));
  }
  return out;
}

std::vector<double> edgeLengths(const Polyhedron& p, double tau) {
  const auto report = classifyVertices(p, tau);
  if (report.overall == Properness::Improper) {
    throw Error(ErrorCode::ImproperInput, "polyhedron is not proper or almost proper");
  }
  std::vector<Vec3> poles;
  for (int v = 0; v < p.vertexCount(); ++v) {
    if (report.kinds[v] == PointKind::Hyperideal) poles.push_back(p.vertex(v).chart());
  }
  std::vector<double> out;
  for (const auto& e : p.skeleton().edges()) {
    const Vec3 a = p.vertex(e.u).chart();
    const Vec3 d = p.vertex(e.v).chart() - a;
    double lo = 0.0, hi = 1.0;
    for (const auto& q : poles) {
      // a.q + s d.q <= 1
      const double alpha = a.dot(q) - 1.0;
      const double beta = d.dot(q);
      if (std::abs(beta) < 1e-300) continue;
      const double s = -alpha / beta;
      if (beta > 0.0) {
        hi = std::min(hi, s);
      } else {
        lo = std::max(lo, s);
      }
    }
    if (hi - lo <= 1e-14) {
      out.push_back(0.0);
      continue;
    }
    const ProjectivePoint x(Vec3(a + lo * d));
    const ProjectivePoint y(Vec3(a + hi * d));
    if (classifyPoint(x, tau) != PointKind::Real || classifyPoint(y, tau) != PointKind::Real) {
      out.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.push_back(hyperbolicDistance(x, y));
    }
  }
  return out;
}

namespace shapes {

Polyhedron regularTetrahedron(double r) {
  const double c = r / std::sqrt(3.0);
  return polyhedronFromVertices(corpus::tetrahedron(), {Vec3(c, c, c), Vec3(c, -c, -c),
                                                        Vec3(-c, c, -c), Vec3(-c, -c, c)});
}

Polyhedron cube(double r) {
  const double c = r / std::sqrt(3.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back((i & 1) ? c : -c, (i & 2) ? c : -c, (i & 4) ? c : -c);
  }
  return polyhedronFromVertices(corpus::cube(), pts);
}

Polyhedron pyramid(int n, double base_r, double base_z, double apex_z) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.emplace_back(base_r * std::cos(a), base_r * std::sin(a), base_z);
  }
  pts.emplace_back(0.0, 0.0, apex_z);
  return polyhedronFromVertices(corpus::pyramid(n), pts);
}

Polyhedron triangularPrism(double base_r, double base_z, double apex_z, double s) {
  std::vector<Vec3> pts;
  const Vec3 apex(0.0, 0.0, apex_z);
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 3;
    pts.emplace_back(base_r * std::cos(a), base_r * std::sin(a), base_z);
  }
  for (int i = 0; i < 3; ++i) pts.push_back(pts[i] + s * (apex - pts[i]));
  return polyhedronFromVertices(corpus::prism(3), pts);
}

}  // namespace shapes

}  // namespace polyvol
