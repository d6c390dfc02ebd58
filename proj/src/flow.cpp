#include "polyvol/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace polyvol {

namespace {

constexpr double kPi = std::numbers::pi;

// Generators of so(1,3): three boosts, three rotations.
const std::array<Mat4, 6>& lorentzGenerators() {
  static const std::array<Mat4, 6> gens = [] {
    std::array<Mat4, 6> out;
    for (int i = 0; i < 3; ++i) {
      Mat4 b = Mat4::Zero();
      b(0, i + 1) = b(i + 1, 0) = 1.0;
      out[i] = b;
    }
    const int pairs[3][2] = {{1, 2}, {1, 3}, {2, 3}};
    for (int k = 0; k < 3; ++k) {
      Mat4 r = Mat4::Zero();
      r(pairs[k][0], pairs[k][1]) = -1.0;
      r(pairs[k][1], pairs[k][0]) = 1.0;
      out[3 + k] = r;
    }
    return out;
  }();
  return gens;
}

void checkAngles(const PlanarGraph& g, const AngleVector& theta) {
  if (static_cast<int>(theta.size()) != g.edgeCount()) {
    throw Error(ErrorCode::AngleOutOfRange, "angle vector length differs from the edge count");
  }
  for (double t : theta) {
    if (!(t > 0.0 && t < kPi)) {
      throw Error(ErrorCode::AngleOutOfRange, "angle " + std::to_string(t) + " outside (0, pi)");
    }
  }
}

bool sameEdges(const PlanarGraph& a, const PlanarGraph& b) {
  if (a.vertexCount() != b.vertexCount() || a.edgeCount() != b.edgeCount() ||
      a.faceCount() != b.faceCount()) {
    return false;
  }
  for (int e = 0; e < a.edgeCount(); ++e) {
    if (a.edge(e).u != b.edge(e).u || a.edge(e).v != b.edge(e).v) return false;
  }
  return true;
}

}  // namespace

namespace {

// Euclidean centroid of the truncation corners (real vertices as fallback).
Vec3 chartCentroid(const Polyhedron& p) {
  Vec3 c = Vec3::Zero();
  int count = 0;
  try {
    for (const auto& x : truncate(p).points) {
      c += x;
      ++count;
    }
  } catch (const Error&) {
    c.setZero();
    count = 0;
  }
  if (count == 0) {
    for (const auto& v : p.vertices()) {
      if (v.norm() < 1.0) {
        c += v.chart();
        ++count;
      }
    }
  }
  if (count > 0) c /= count;
  if (c.norm() >= 0.999) c *= 0.999 / c.norm();
  return c;
}

}  // namespace

Polyhedron canonicalGauge(const Polyhedron& p) {
  // Boost until the centroid of the truncation corners is the origin.
  Polyhedron q = p;
  double last = 2.0;
  for (int it = 0; it < 100; ++it) {
    const Vec3 c = chartCentroid(q);
    if (c.norm() < 1e-14 || c.norm() >= last) break;
    last = c.norm();
    q = transformed(q, Isometry::movingToOrigin(ProjectivePoint(c)));
  }

  const Vec3 s = q.plane(0).spatialNormal().normalized();
  Eigen::Matrix3d rot = Eigen::Quaterniond::FromTwoVectors(s, Vec3::UnitZ()).toRotationMatrix();
  const Edge& e = q.skeleton().edge(q.skeleton().faceEdges(0)[0]);
  const Vec3 a = rot * q.vertex(e.u).chart();
  const Vec3 d = rot * q.vertex(e.v).chart() - a;
  const Vec3 foot = d.squaredNorm() > 0.0 ? Vec3(a - (a.dot(d) / d.squaredNorm()) * d) : a;
  if (std::hypot(foot.x(), foot.y()) > 1e-14) {
    rot = Eigen::AngleAxisd(-std::atan2(foot.y(), foot.x()), Vec3::UnitZ()).toRotationMatrix() * rot;
  }
  return transformed(q, Isometry::rotation(rot));
}

Polyhedron realizeFromAngles(const PlanarGraph& g, const AngleVector& theta, const Polyhedron& seed,
                             const RealizeOptions& opts) {
  const PlanarGraph& sk = seed.skeleton();
  if (!sameEdges(g, sk)) throw Error(ErrorCode::SkeletonMismatch, "seed has a different skeleton");
  checkAngles(sk, theta);
  const int F = sk.faceCount();
  const int V = sk.vertexCount();
  const int E = sk.edgeCount();
  const int n = 4 * (F + V);

  std::vector<int> replaced(E, -1);
  for (std::size_t i = 0; i < opts.stratum.size(); ++i) {
    const auto& pr = opts.stratum[i];
    const int e = sk.edgeId(pr.vertex, pr.pole);
    if (e < 0) {
      throw Error(ErrorCode::SkeletonMismatch, "almost-proper pair is not joined by an edge");
    }
    replaced[e] = static_cast<int>(i);
  }

  Eigen::VectorXd z(n);
  for (int f = 0; f < F; ++f) z.segment<4>(4 * f) = seed.plane(f).normal();
  for (int v = 0; v < V; ++v) z.segment<4>(4 * (F + v)) = seed.vertex(v).homogeneousUnit();
  const Eigen::VectorXd z0 = z;

  // Gauge rows: stay orthogonal to the Lorentz orbit through the seed.
  Eigen::MatrixXd gauge(6, n);
  for (int k = 0; k < 6; ++k) {
    const Mat4& a = lorentzGenerators()[k];
    for (int f = 0; f < F; ++f) gauge.block<1, 4>(k, 4 * f) = (a * z0.segment<4>(4 * f)).transpose();
    for (int v = 0; v < V; ++v) {
      const Vec4 x = z0.segment<4>(4 * (F + v));
      const Vec4 ax = a * x;
      gauge.block<1, 4>(k, 4 * (F + v)) = (ax - x.dot(ax) * x).transpose();
    }
  }

  std::vector<double> cosine(E), scale(E);
  for (int e = 0; e < E; ++e) {
    cosine[e] = std::cos(theta[e]);
    scale[e] = 1.0 / std::max(std::sin(theta[e]), 1e-3);
  }

  Eigen::VectorXd r(n);
  Eigen::MatrixXd jac(n, n);
  auto N = [&](int f) { return Vec4(z.segment<4>(4 * f)); };
  auto X = [&](int v) { return Vec4(z.segment<4>(4 * (F + v))); };
  auto assemble = [&]() {
    r.setZero();
    jac.setZero();
    int row = 0;
    for (int f = 0; f < F; ++f, ++row) {
      r[row] = minkowski(N(f), N(f)) - 1.0;
      jac.block<1, 4>(row, 4 * f) = 2.0 * lowered(N(f)).transpose();
    }
    for (int v = 0; v < V; ++v, ++row) {
      r[row] = X(v).squaredNorm() - 1.0;
      jac.block<1, 4>(row, 4 * (F + v)) = 2.0 * X(v).transpose();
    }
    for (int v = 0; v < V; ++v) {
      for (int f : sk.vertexFaces(v)) {
        r[row] = minkowski(X(v), N(f));
        jac.block<1, 4>(row, 4 * (F + v)) = lowered(N(f)).transpose();
        jac.block<1, 4>(row, 4 * f) = lowered(X(v)).transpose();
        ++row;
      }
    }
    for (int e = 0; e < E; ++e, ++row) {
      const Edge& ed = sk.edge(e);
      if (replaced[e] >= 0) {
        const auto& pr = opts.stratum[replaced[e]];
        r[row] = minkowski(X(pr.vertex), X(pr.pole));
        jac.block<1, 4>(row, 4 * (F + pr.vertex)) = lowered(X(pr.pole)).transpose();
        jac.block<1, 4>(row, 4 * (F + pr.pole)) = lowered(X(pr.vertex)).transpose();
        continue;
      }
      const int f = ed.left, h = ed.right;
      r[row] = (-minkowski(N(f), N(h)) - cosine[e]) * scale[e];
      jac.block<1, 4>(row, 4 * f) = -scale[e] * lowered(N(h)).transpose();
      jac.block<1, 4>(row, 4 * h) = -scale[e] * lowered(N(f)).transpose();
    }
    r.segment<6>(row) = gauge * (z - z0);
    jac.block(row, 0, 6, n) = gauge;
  };

  double previous = std::numeric_limits<double>::infinity();
  int worse = 0;
  bool converged = false;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    assemble();
    const double res = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(res)) break;
    if (res < opts.tolerance) {
      converged = true;
      break;
    }
    if (res > 0.9 * previous && ++worse > 3) break;
    previous = std::min(previous, res);
    const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
    if (!step.allFinite()) break;
    z += step;
  }
  if (!converged) throw Error(ErrorCode::NewtonDiverged, "angle realization did not converge");

  std::vector<OrientedPlane> planes;
  for (int f = 0; f < F; ++f) planes.push_back(OrientedPlane::fromNormal(N(f)));
  Polyhedron out;
  try {
    out = buildPolyhedron(planes, sk);
  } catch (const Error& err) {
    throw Error(ErrorCode::SkeletonChanged, std::string(errorCodeName(err.code())) + ": " + err.detail());
  }
  return opts.gauge_fix ? canonicalGauge(out) : out;
}

const char* flowEventName(FlowEventKind k) {
  switch (k) {
    case FlowEventKind::EdgeCollapsed: return "EdgeCollapsed";
    case FlowEventKind::FaceCollapsed: return "FaceCollapsed";
    case FlowEventKind::VertexBecameIdeal: return "VertexBecameIdeal";
    case FlowEventKind::AlmostProperOnset: return "AlmostProperOnset";
    case FlowEventKind::BecameHyperidealOnly: return "BecameHyperidealOnly";
  }
  return "?";
}

namespace {

// Events closed by one sample are listed with ';'.
void joinEvent(std::string& list, FlowEventKind k) {
  const std::string name = flowEventName(k);
  if (list.empty()) list = name;
  else if (list.find(name) == std::string::npos) list += ";" + name;
}

Vec3 interiorPoint(const Polyhedron& p) {
  const auto t = truncate(p);
  Vec3 c = Vec3::Zero();
  int count = 0;
  for (const auto& f : t.faces) {
    for (int i : f) {
      c += t.points[i];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::DegenerateDeformation, "truncation is empty");
  return c / count;
}

}  // namespace

Polyhedron nudgeIdealVertices(const Polyhedron& p, double delta) {
  const auto before = classifyVertices(p);
  if (!before.hasKind(PointKind::Ideal)) throw Error(ErrorCode::NoIdealVertices, "nothing to nudge");
  const Vec3 c = interiorPoint(p);
  Polyhedron q;
  try {
    q = transformed(p, AffineDeformation::homothety(c, 1.0 + delta));
  } catch (const Error& err) {
    throw Error(ErrorCode::PropernessLost, "homothety broke the polyhedron: " + err.detail());
  }
  const auto after = classifyVertices(q);
  if (after.overall != Properness::Proper) {
    throw Error(ErrorCode::PropernessLost, "delta " + std::to_string(delta) + " is too large");
  }
  for (int v = 0; v < p.vertexCount(); ++v) {
    if (after.kinds[v] == PointKind::Ideal ||
        (before.kinds[v] == PointKind::Ideal && after.kinds[v] != PointKind::Hyperideal)) {
      throw Error(ErrorCode::PropernessLost, "vertex " + std::to_string(v) + " is still ideal");
    }
  }
  return q;
}

Polyhedron nudgeIdealVertices(const Polyhedron& p) {
  for (double delta = 1e-2; delta > 1e-12; delta *= 0.5) {
    try {
      return nudgeIdealVertices(p, delta);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::PropernessLost) throw;
    }
  }
  throw Error(ErrorCode::PropernessLost, "no homothety keeps the polyhedron proper");
}

Polyhedron escapeDeformation(const Polyhedron& p, const Vec3& translation) {
  if (translation.squaredNorm() == 0.0) return p;
  return transformed(p, AffineDeformation::translation(translation));
}

Polyhedron escapeDeformation(const Polyhedron& p, int v, double max_volume_loss) {
  const auto before = classifyVertices(p);
  if (v < 0 || v >= p.vertexCount() || before.kinds[v] != PointKind::Real) {
    throw Error(ErrorCode::NoSeparatingPlane, "vertex " + std::to_string(v) + " is not real");
  }
  const Vec3 x = p.vertex(v).chart();
  std::vector<Vec3> directions{x.normalized()};
  // Almost-proper vertices are freed by moving off the polar plane that holds them.
  for (int w = 0; w < p.vertexCount(); ++w) {
    if (before.status[w] != VertexStatus::AlmostProper) continue;
    const Vec3 nrm = p.vertex(before.witness[w]).chart().normalized();
    for (double s : {1.0, -1.0}) {
      for (double mix : {0.25, 0.5, 1.0}) directions.push_back((x.normalized() + s * mix * nrm).normalized());
    }
  }
  const double v0 = volume(p).value;
  for (const Vec3& d : directions) {
    // |x + lambda d| = 1 + margin
    for (double margin : {1e-7, 1e-6, 1e-5}) {
      const double b = x.dot(d);
      const double c = x.squaredNorm() - (1.0 + margin) * (1.0 + margin);
      const double disc = b * b - c;
      if (disc < 0.0) continue;
      const double lambda = -b + std::sqrt(disc);
      if (!(lambda > 0.0)) continue;
      Polyhedron q;
      try {
        q = escapeDeformation(p, Vec3(lambda * d));
      } catch (const Error&) {
        continue;
      }
      const auto after = classifyVertices(q);
      if (after.overall != Properness::Proper || after.kinds[v] != PointKind::Hyperideal) continue;
      bool kept = true;
      for (int w = 0; w < p.vertexCount(); ++w) {
        if (w != v && after.kinds[w] != before.kinds[w]) kept = false;
      }
      if (!kept) continue;
      if (v0 - volume(q).value > max_volume_loss) continue;
      return q;
    }
  }
  throw Error(ErrorCode::NoSeparatingPlane,
              "no translation pushes vertex " + std::to_string(v) + " out while staying proper");
}

namespace {

struct FlowState {
  Polyhedron poly;
  AngleVector base;  // angles at scale s are s * base (stratum edges excepted)
  double s = 1.0;
  std::vector<AlmostProperPair> stratum;
};

AngleVector scaled(const AngleVector& base, double s) {
  AngleVector out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = std::clamp(s * base[i], 1e-12, kPi - 1e-12);
  return out;
}

AngleVector rebase(const Polyhedron& p, double s) {
  AngleVector a = dihedralAngles(p);
  for (auto& x : a) x /= s;
  return a;
}

// Sine of the angle between the homogeneous representatives of two points.
double separation(const ProjectivePoint& a, const ProjectivePoint& b) {
  const Vec4 x = a.homogeneousUnit();
  const Vec4 y = b.homogeneousUnit();
  const double c = std::abs(x.dot(y));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

class Flow {
 public:
  Flow(const Polyhedron& p0, const FlowOptions& opts) : opts_(opts), rng_(opts.seed) {
    const auto rep = classifyVertices(p0);
    if (rep.overall != Properness::Proper) throw Error(ErrorCode::ImproperInput, "flow needs a proper start");
    if (rep.hasKind(PointKind::Ideal)) {
      throw Error(ErrorCode::ImproperInput, "start has ideal vertices; nudge them first");
    }
    max_events_ = opts.max_events > 0 ? opts.max_events : 10 * p0.edgeCount();
    std::uniform_real_distribution<double> noise(-opts.perturbation, opts.perturbation);
    state_.base = dihedralAngles(p0);
    for (auto& a : state_.base) a += noise(rng_);
    state_.poly = realize(p0, state_.base, {});
    trace_.seed = opts.seed;
    record("", opts.trace_tolerance);
  }

  FlowTrace run() {
    double dt = opts_.dt_initial;
    while (true) {
      const auto rep = classifyVertices(state_.poly);
      const bool all_hyper = std::all_of(rep.kinds.begin(), rep.kinds.end(),
                                         [](PointKind k) { return k == PointKind::Hyperideal; });
      const auto angles = dihedralAngles(state_.poly);
      if (all_hyper && *std::max_element(angles.begin(), angles.end()) <= opts_.final_max_angle) break;

      double target = state_.s - dt;
      if (target <= 0.0) target = 0.5 * state_.s;
      int crossing = -1;
      double t_cross = 0.0;
      nextCrossing(rep, crossing, t_cross);
      if (crossing >= 0 && t_cross >= target) {
        target = std::max(t_cross - 1e-6 * state_.s, 0.5 * (t_cross + target));
      } else {
        crossing = -1;
      }

      Polyhedron next;
      try {
        next = realize(state_.poly, scaled(state_.base, target), state_.stratum);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NewtonDiverged && err.code() != ErrorCode::SkeletonChanged) throw;
        dt *= 0.5;
        if (dt < opts_.dt_min) {
          degenerate();
          dt = opts_.dt_initial;
        }
        continue;
      }

      const auto nrep = classifyVertices(next);
      if (nrep.overall == Properness::Improper) {
        if (crossing >= 0 && improperBecauseOf(nrep, crossing)) {
          escape(crossing, t_cross);
        } else {
          onset(next, target);
        }
        dt = opts_.dt_initial;
        continue;
      }
      std::string event;
      std::vector<std::pair<double, int>> crossed;
      for (int v = 0; v < state_.poly.vertexCount(); ++v) {
        if (rep.kinds[v] == PointKind::Real && nrep.kinds[v] != PointKind::Real) {
          crossed.emplace_back(std::clamp(crossingTime(v), target, state_.s), v);
        }
      }
      std::sort(crossed.rbegin(), crossed.rend());
      state_.poly = next;
      state_.s = target;
      for (const auto& [tc, v] : crossed) {
        addEvent(FlowEventKind::VertexBecameIdeal, v, -1, tc);
        joinEvent(event, FlowEventKind::VertexBecameIdeal);
      }
      if (!crossed.empty() && allHyperideal(nrep)) {
        addEvent(FlowEventKind::BecameHyperidealOnly, -1, -1, target);
        joinEvent(event, FlowEventKind::BecameHyperidealOnly);
      }
      record(event, opts_.trace_tolerance);
      dt = std::min(2.0 * dt, opts_.dt_initial);
    }
    // Final volume at the tighter tolerance.
    VolumeOptions vo;
    vo.tolerance = opts_.final_tolerance;
    trace_.samples.back().volume = volume(state_.poly, vo);
    trace_.final_skeleton = state_.poly.skeleton();
    trace_.sup_estimate = trace_.samples.back().volume.value;
    return trace_;
  }

 private:
  static bool allHyperideal(const PropernessReport& r) {
    return std::all_of(r.kinds.begin(), r.kinds.end(), [](PointKind k) { return k == PointKind::Hyperideal; });
  }

  Polyhedron realize(const Polyhedron& seed, const AngleVector& theta,
                     const std::vector<AlmostProperPair>& stratum) {
    RealizeOptions ro;
    ro.stratum = stratum;
    return realizeFromAngles(seed.skeleton(), theta, seed, ro);
  }

  void record(const std::string& event, double tol) {
    const auto rep = classifyVertices(state_.poly);
    if (rep.overall == Properness::AlmostProper && rep.hasKind(PointKind::Ideal)) {
      throw Error(ErrorCode::PropernessLost,
                  "almost proper state with an ideal vertex at t = " + std::to_string(state_.s));
    }
    FlowSample smp;
    smp.t = state_.s;
    smp.angles = dihedralAngles(state_.poly);
    smp.polyhedron = state_.poly;
    VolumeOptions vo;
    vo.tolerance = tol;
    smp.volume = volume(state_.poly, vo);
    smp.event = event;
    smp.skeleton_hash = skeletonHash(state_.poly.skeleton());
    trace_.samples.push_back(std::move(smp));
  }

  void addEvent(FlowEventKind kind, int element, int witness, double t) {
    if (static_cast<int>(trace_.events.size()) >= max_events_) {
      throw Error(ErrorCode::MaxEventsExceeded, std::to_string(max_events_) + " events");
    }
    FlowEvent ev;
    ev.kind = kind;
    ev.element = element;
    ev.witness = witness;
    ev.t = t;
    VolumeOptions vo;
    vo.tolerance = opts_.trace_tolerance;
    ev.volume = volume(state_.poly, vo).value;
    ev.skeleton = state_.poly.skeleton();
    trace_.events.push_back(std::move(ev));
  }

  // Next scale at which a real vertex's angle sum reaches (k - 2) pi.
  void nextCrossing(const PropernessReport& rep, int& vertex, double& t) const {
    vertex = -1;
    t = 0.0;
    const PlanarGraph& g = state_.poly.skeleton();
    for (int v = 0; v < g.vertexCount(); ++v) {
      if (rep.kinds[v] != PointKind::Real) continue;
      bool free_edge = false;
      double sum = 0.0;
      for (int e : g.vertexEdges(v)) {
        sum += state_.base[e];
        for (const auto& pr : state_.stratum) {
          if (g.edgeId(pr.vertex, pr.pole) == e) free_edge = true;
        }
      }
      if (free_edge) continue;
      const double tc = (g.degree(v) - 2) * kPi / sum;
      if (tc < state_.s && tc > t) {
        t = tc;
        vertex = v;
      }
    }
  }

  double crossingTime(int v) const {
    const PlanarGraph& g = state_.poly.skeleton();
    double sum = 0.0;
    for (int e : g.vertexEdges(v)) sum += state_.base[e];
    return (g.degree(v) - 2) * kPi / sum;
  }

  static bool improperBecauseOf(const PropernessReport& r, int v) {
    for (std::size_t w = 0; w < r.status.size(); ++w) {
      if (r.status[w] == VertexStatus::Improper && r.witness[w] == v) return true;
    }
    return false;
  }

  // The step across an ideal crossing broke properness: stop just short of
  // the crossing and push the vertex out by a translation.
  void escape(int v, double t_cross) {
    const double near = t_cross + 1e-6 * state_.s;
    if (near < state_.s) {
      state_.poly = realize(state_.poly, scaled(state_.base, near), state_.stratum);
      state_.s = near;
    }
    const double before = volume(state_.poly).value;
    Polyhedron q = escapeDeformation(state_.poly, v, opts_.deformation_volume);
    q = canonicalGauge(q);
    trace_.deformation_loss += std::max(0.0, before - volume(q).value);
    state_.poly = q;
    state_.stratum.clear();
    state_.s = std::min(state_.s, t_cross);
    state_.base = rebase(state_.poly, state_.s);
    addEvent(FlowEventKind::VertexBecameIdeal, v, -1, state_.s);
    std::string event = flowEventName(FlowEventKind::VertexBecameIdeal);
    if (allHyperideal(classifyVertices(state_.poly))) {
      addEvent(FlowEventKind::BecameHyperidealOnly, -1, -1, state_.s);
      joinEvent(event, FlowEventKind::BecameHyperidealOnly);
    }
    record(event, opts_.trace_tolerance);
  }

  // A real vertex crossed a polar plane between s and target: locate the
  // onset by bisection and continue in the almost-proper stratum.
  void onset(const Polyhedron& improper, double target) {
    const auto bad = classifyVertices(improper);
    int w = -1;
    for (std::size_t i = 0; i < bad.status.size(); ++i) {
      if (bad.status[i] == VertexStatus::Improper) {
        w = static_cast<int>(i);
        break;
      }
    }
    const int pole = bad.witness[w];
    double lo = state_.s, hi = target;
    Polyhedron at_lo = state_.poly;
    for (int it = 0; it < 60 && lo - hi > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      Polyhedron q = realize(at_lo, scaled(state_.base, mid), state_.stratum);
      if (classifyVertices(q).overall == Properness::Improper) {
        hi = mid;
      } else {
        at_lo = q;
        lo = mid;
      }
    }
    std::vector<AlmostProperPair> stratum = state_.stratum;
    stratum.push_back({w, pole});
    Polyhedron q = realize(at_lo, scaled(state_.base, lo), stratum);
    state_.poly = q;
    state_.s = lo;
    state_.stratum = stratum;
    addEvent(FlowEventKind::AlmostProperOnset, w, pole, lo);
    record(flowEventName(FlowEventKind::AlmostProperOnset), opts_.trace_tolerance);
  }

  // Steps keep failing: the path is running into a collapse.
  void degenerate() {
    const Polyhedron& p = state_.poly;
    const PlanarGraph& g = p.skeleton();
    int best_edge = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < g.edgeCount(); ++e) {
      const double sep = separation(p.vertex(g.edge(e).u), p.vertex(g.edge(e).v));
      if (sep < best) {
        best = sep;
        best_edge = e;
      }
    }
    int best_face = -1, arc_start = 0, arc_length = 0;
    double flat = std::numeric_limits<double>::infinity();
    for (int f = 0; f < g.faceCount(); ++f) {
      int s0 = 0, len = 0;
      const double w = faceWidth(p, f, s0, len);
      if (w < flat) {
        flat = w;
        best_face = f;
        arc_start = s0;
        arc_length = len;
      }
    }
    const double threshold = std::max(opts_.collapse_length, 1e-3);
    CollapseResult res;
    FlowEventKind kind;
    int element;
    if (best <= threshold && best <= flat) {
      res = edgeCollapse(g, best_edge);
      kind = FlowEventKind::EdgeCollapsed;
      element = best_edge;
    } else if (flat <= threshold && arc_length > 0) {
      res = faceCollapse(g, best_face, arc_start, arc_length);
      kind = FlowEventKind::FaceCollapsed;
      element = best_face;
    } else {
      throw Error(ErrorCode::StallDetected,
                  "no progress at t = " + std::to_string(state_.s) + " and no collapse in sight");
    }
    if (!res.three_connected) {
      throw Error(ErrorCode::CollapseMakesDegenerate, "collapsed skeleton is not 3-connected");
    }
    std::vector<OrientedPlane> planes(res.graph.faceCount());
    for (int f = 0; f < g.faceCount(); ++f) {
      if (res.face_map[f] >= 0) planes[res.face_map[f]] = p.plane(f);
    }
    BuildOptions loose;
    loose.residual_tol = 1e-2;
    Polyhedron limit = buildPolyhedron(planes, res.graph, loose);
    AngleVector theta = dihedralAngles(limit);
    Polyhedron q = realizeFromAngles(limit.skeleton(), theta, limit);
    state_.poly = q;
    state_.stratum.clear();
    state_.base = rebase(q, state_.s);
    addEvent(kind, element, -1, state_.s);
    record(flowEventName(kind), opts_.trace_tolerance);
  }

  // Distance of the face's vertices from their best line, relative to the
  // face diameter; also the split of the boundary into the two arcs that
  // would merge.
  static double faceWidth(const Polyhedron& p, int f, int& arc_start, int& arc_length) {
    const auto& cyc = p.skeleton().face(f);
    const int k = static_cast<int>(cyc.size());
    std::vector<Vec3> pts;
    Vec3 c = Vec3::Zero();
    for (int v : cyc) {
      pts.push_back(p.vertex(v).chart());
      c += pts.back();
    }
    c /= k;
    Eigen::MatrixXd m(k, 3);
    for (int i = 0; i < k; ++i) m.row(i) = (pts[i] - c).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    const Vec3 dir = svd.matrixV().col(0);
    std::vector<double> proj(k);
    double width = 0.0, lo = 1e300, hi = -1e300;
    for (int i = 0; i < k; ++i) {
      proj[i] = (pts[i] - c).dot(dir);
      width = std::max(width, (pts[i] - c - proj[i] * dir).norm());
      lo = std::min(lo, proj[i]);
      hi = std::max(hi, proj[i]);
    }
    const double diameter = hi - lo;
    if (diameter <= 0.0) return std::numeric_limits<double>::infinity();
    const double mid = 0.5 * (lo + hi);
    arc_start = 0;
    arc_length = 0;
    for (int i = 0; i < k; ++i) {
      if (proj[i] < mid && proj[(i + k - 1) % k] >= mid) {
        arc_start = i;
        int len = 0;
        while (len < k && proj[(i + len) % k] < mid) ++len;
        arc_length = len;
      }
    }
    int low_count = 0;
    for (double x : proj) low_count += x < mid;
    if (arc_length != low_count) arc_length = 0;
    return width / diameter;
  }

  FlowOptions opts_;
  std::mt19937_64 rng_;
  int max_events_ = 0;
  FlowState state_;
  FlowTrace trace_;
};

}  // namespace

FlowTrace runFlow(const Polyhedron& p0, const FlowOptions& opts) { return Flow(p0, opts).run(); }

Polyhedron randomProperPolyhedron(const Polyhedron& base, std::mt19937_64& rng, double scale_lo,
                                  double scale_hi, double jitter) {
  std::uniform_real_distribution<double> scale(scale_lo, scale_hi);
  std::normal_distribution<double> noise(0.0, jitter);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    try {
      const Polyhedron b = transformed(base, AffineDeformation::homothety(Vec3::Zero(), scale(rng)));
      AngleVector theta = dihedralAngles(b);
      for (auto& a : theta) a *= std::exp(noise(rng));
      Polyhedron p = realizeFromAngles(b.skeleton(), theta, b);
      const auto rep = classifyVertices(p);
      if (rep.overall == Properness::Proper && !rep.hasKind(PointKind::Ideal)) return p;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::ImproperInput, "no proper polyhedron found near the base shape");
}

double supVolume(const PlanarGraph& g, const Polyhedron& seed, const FlowOptions& opts) {
  if (!isomorphic(g, seed.skeleton())) {
    throw Error(ErrorCode::SkeletonMismatch, "seed skeleton differs from the graph");
  }
  Polyhedron start = seed;
  if (classifyVertices(seed).hasKind(PointKind::Ideal)) start = nudgeIdealVertices(seed);
  return runFlow(start, opts).sup_estimate;
}

}  // namespace polyvol
