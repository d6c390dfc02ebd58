#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "polyvol/flow.hpp"
#include "polyvol/io.hpp"
#include "polyvol/rectify.hpp"

using namespace polyvol;

namespace {

constexpr double kPi = std::numbers::pi;

double lobachevskyOracle(double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return -ts.integrate([](double t) { return std::log(std::abs(2.0 * std::sin(t))); }, 0.0, x);
}

const double kOctahedron = 8 * lobachevskyOracle(kPi / 4);

// Regular hyperideal tetrahedron with every angle eps, by continuation.
Polyhedron uniformTetrahedron(double eps) {
  Polyhedron p = shapes::regularTetrahedron(1.6);
  const double start = dihedralAngles(p)[0];
  for (int k = 1; k <= 20; ++k) {
    p = realizeFromAngles(p.skeleton(), AngleVector(6, start + k / 20.0 * (eps - start)), p);
  }
  return p;
}

void expectMonotone(const FlowTrace& trace) {
  for (std::size_t k = 1; k < trace.samples.size(); ++k) {
    const auto& a = trace.samples[k - 1];
    const auto& b = trace.samples[k];
    if (b.event.empty()) EXPECT_LT(b.t, a.t);
    else EXPECT_LE(b.t, a.t);
    EXPECT_GE(b.volume.value, a.volume.value - a.volume.error_estimate - b.volume.error_estimate -
                                  trace.deformation_loss);
    if (b.event.empty() && a.skeleton_hash == b.skeleton_hash) {
      for (std::size_t e = 0; e < a.angles.size(); ++e) EXPECT_LT(b.angles[e], a.angles[e]);
    }
  }
}

}  // namespace

TEST(Realize, OwnAnglesGiveSeedBack) {
  const auto p = shapes::pyramid(5, 0.6, -0.3, 0.5);
  RealizeOptions ro;
  ro.gauge_fix = false;
  const auto q = realizeFromAngles(p.skeleton(), dihedralAngles(p), p, ro);
  for (int f = 0; f < p.faceCount(); ++f) EXPECT_LT((q.plane(f).normal() - p.plane(f).normal()).norm(), 1e-12);
  const auto g = realizeFromAngles(p.skeleton(), dihedralAngles(p), p);
  const auto a = dihedralAngles(p), b = dihedralAngles(g);
  for (std::size_t e = 0; e < a.size(); ++e) EXPECT_NEAR(a[e], b[e], 1e-10);
  const auto la = edgeLengths(p), lb = edgeLengths(g);
  for (std::size_t e = 0; e < la.size(); ++e) EXPECT_NEAR(la[e], lb[e], 1e-9);
}

TEST(Realize, HitsTargetAngles) {
  const auto p = shapes::cube(0.5);
  AngleVector target = dihedralAngles(p);
  for (std::size_t e = 0; e < target.size(); ++e) target[e] *= 1.0 - 0.01 * (e % 3);
  const auto q = realizeFromAngles(p.skeleton(), target, p);
  const auto got = dihedralAngles(q);
  for (std::size_t e = 0; e < target.size(); ++e) EXPECT_NEAR(got[e], target[e], 1e-10);
}

TEST(Realize, SmallerAnglesMoreVolume) {
  const auto a = uniformTetrahedron(0.4), b = uniformTetrahedron(0.2);
  for (double x : dihedralAngles(b)) EXPECT_NEAR(x, 0.2, 1e-10);
  EXPECT_GT(volume(b).value, volume(a).value);
}

TEST(Realize, InadmissibleTargetNotHyperideal) {
  const auto h = shapes::regularTetrahedron(1.6);
  AngleVector theta = dihedralAngles(h);
  theta[0] = 3.0;
  EXPECT_FALSE(checkBaoBonahon(h.skeleton(), theta).admissible());
  try {
    const auto q = realizeFromAngles(h.skeleton(), theta, h);
    // Realizable, but then not in the hyperideal regime.
    const auto rep = classifyVertices(q);
    EXPECT_TRUE(rep.hasKind(PointKind::Real) || rep.overall != Properness::Proper);
  } catch (const Error& err) {
    EXPECT_TRUE(err.code() == ErrorCode::NewtonDiverged || err.code() == ErrorCode::SkeletonChanged);
  }
}

TEST(Realize, RejectsBadInput) {
  const auto h = shapes::regularTetrahedron(1.6);
  EXPECT_THROW(realizeFromAngles(h.skeleton(), AngleVector(6, 0.0), h), Error);
  EXPECT_THROW(realizeFromAngles(corpus::cube(), AngleVector(12, 1.0), h), Error);
}

TEST(Gauge, CanonicalForm) {
  const auto p = shapes::triangularPrism(0.6, -0.3, 0.6, 0.5);
  const auto moved = transformed(p, Isometry::rotation(Vec3(1, 2, 3).normalized(), 0.7)
                                        .then(Isometry::boost(Vec3(0, 1, 0), 0.2)));
  const auto a = canonicalGauge(p), b = canonicalGauge(moved);
  EXPECT_NEAR(a.plane(0).spatialNormal().normalized().z(), 1.0, 1e-12);
  for (int f = 0; f < p.faceCount(); ++f) EXPECT_LT((a.plane(f).normal() - b.plane(f).normal()).norm(), 1e-9);
  const auto c = canonicalGauge(a);
  for (int f = 0; f < p.faceCount(); ++f) EXPECT_LT((a.plane(f).normal() - c.plane(f).normal()).norm(), 1e-12);
}

TEST(Flow, HyperidealTetrahedronNoEvents) {
  const auto p0 = uniformTetrahedron(0.5);
  const auto trace = runFlow(p0);
  EXPECT_TRUE(trace.events.empty());
  expectMonotone(trace);
  EXPECT_NEAR(trace.sup_estimate, kOctahedron, 0.01 * kOctahedron);
  EXPECT_LE(trace.sup_estimate, kOctahedron + 1e-5);
  // Perturbation of the start angles stays below 1e-6.
  const auto a0 = dihedralAngles(p0);
  for (std::size_t e = 0; e < a0.size(); ++e) EXPECT_NEAR(trace.samples[0].angles[e], a0[e], 1e-6);
}

TEST(Flow, CompactTetrahedron) {
  const auto p0 = shapes::regularTetrahedron(0.5);
  for (double a : dihedralAngles(p0)) EXPECT_NEAR(a, std::acos(1.0 / 3.0), 0.05);
  const auto trace = runFlow(p0);
  int ideal = 0;
  for (const auto& e : trace.events) ideal += e.kind == FlowEventKind::VertexBecameIdeal;
  EXPECT_GE(ideal, 1);
  EXPECT_EQ(trace.events.back().kind, FlowEventKind::BecameHyperidealOnly);
  expectMonotone(trace);
  EXPECT_NEAR(trace.sup_estimate, 3.6639, 1e-3);
}

TEST(Flow, EventsMatchAngleSums) {
  const auto trace = runFlow(shapes::triangularPrism(0.6, -0.3, 0.6, 0.5));
  // Vertices cross one at a time, in decreasing t, and flip kind where their
  // angle sum passes (k - 2) pi.
  double last = 2.0;
  for (const auto& ev : trace.events) {
    EXPECT_LE(ev.t, last);
    last = ev.t;
    if (ev.kind != FlowEventKind::VertexBecameIdeal) continue;
    const FlowSample* before = nullptr;
    const FlowSample* after = nullptr;
    for (const auto& s : trace.samples) {
      if (s.t > ev.t) before = &s;
      if (s.t < ev.t && !after) after = &s;
    }
    ASSERT_TRUE(before && after);
    const auto& g = before->polyhedron.skeleton();
    const int v = ev.element;
    auto sum = [&](const FlowSample& s) {
      double x = 0.0;
      for (int e : g.vertexEdges(v)) x += s.angles[e];
      return x - (g.degree(v) - 2) * kPi;
    };
    EXPECT_GT(sum(*before), 0.0);
    EXPECT_LT(sum(*after), 0.0);
    EXPECT_EQ(classifyPoint(before->polyhedron.vertex(v)), PointKind::Real);
    EXPECT_NE(classifyPoint(after->polyhedron.vertex(v)), PointKind::Real);
    // Linear interpolation of the sum locates the crossing to within 1e-6 in t.
    const double sb = sum(*before), sa = sum(*after);
    const double t_lin = before->t + (after->t - before->t) * sb / (sb - sa);
    EXPECT_NEAR(t_lin, ev.t, 1e-6);
  }
}

TEST(Flow, HyperidealEndgameStaysAdmissible) {
  const auto trace = runFlow(shapes::pyramid(4, 0.6, -0.3, 0.5));
  bool endgame = false;
  for (const auto& s : trace.samples) {
    if (s.event.find("BecameHyperidealOnly") != std::string::npos) endgame = true;
    if (endgame) EXPECT_TRUE(checkBaoBonahon(s.polyhedron.skeleton(), s.angles).admissible());
  }
  EXPECT_TRUE(endgame);
}

TEST(Flow, PyramidWithHyperidealApex) {
  const auto p0 = shapes::pyramid(4, 0.6, -0.3, 1.3);
  const auto rep = classifyVertices(p0);
  ASSERT_EQ(rep.overall, Properness::Proper);
  ASSERT_EQ(rep.kinds[4], PointKind::Hyperideal);
  for (int v = 0; v < 4; ++v) ASSERT_EQ(rep.kinds[v], PointKind::Real);
  const auto trace = runFlow(p0);
  expectMonotone(trace);
  const double antiprism = 8 * (lobachevskyOracle(kPi / 4 + kPi / 8) + lobachevskyOracle(kPi / 4 - kPi / 8));
  EXPECT_NEAR(trace.sup_estimate, antiprism, 0.01 * antiprism);
  // Skeleton never changed: replaying no collapses gives the start graph.
  EXPECT_TRUE(isomorphic(trace.final_skeleton, p0.skeleton()));
}

TEST(Flow, CollapseRewritesSkeleton) {
  // Prism with a short top edge; the top triangle shrinks to a point.
  std::istringstream in(
      "P 5\n"
      "N 0.713453772073 -5.92581539394e-15 -1.10328413072e-15 1.22842023953\n"
      "N 1.07692605222 0.0438597651809 -0.204396144946 -1.45467118583\n"
      "N 0.331665113456 -0.729290952537 0.663090471125 -0.372085314323\n"
      "N 0.337046002592 0.919416212906 2.25774260398e-14 -0.51795157622\n"
      "N 0.41300838456 -0.818362396483 -0.567874315915 -0.422347812902\n"
      "V 6\n"
      "F 2 1 0\n"
      "F 3 4 5\n"
      "F 4 3 0 1\n"
      "F 5 4 1 2\n"
      "F 3 5 2 0\n");
  const auto p0 = parsePolyhedron(in);
  FlowOptions o;
  o.seed = 5;
  const auto trace = runFlow(p0, o);
  ASSERT_FALSE(trace.events.empty());
  const auto& ev = trace.events.front();
  ASSERT_EQ(ev.kind, FlowEventKind::EdgeCollapsed);
  // Replaying the move through the graph module gives the new skeleton.
  const auto moved = edgeCollapse(p0.skeleton(), ev.element);
  EXPECT_TRUE(moved.three_connected);
  EXPECT_TRUE(isomorphic(moved.graph, ev.skeleton));
  EXPECT_TRUE(isomorphic(trace.final_skeleton, corpus::tetrahedron()));
  expectMonotone(trace);
  EXPECT_NEAR(trace.sup_estimate, kOctahedron, 1e-3);
}

TEST(Flow, DeterministicForSeed) {
  const auto p0 = shapes::triangularPrism(0.6, -0.3, 0.6, 0.5);
  FlowOptions o;
  o.seed = 77;
  const auto a = runFlow(p0, o), b = runFlow(p0, o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_EQ(a.samples[k].t, b.samples[k].t);
    EXPECT_EQ(a.samples[k].volume.value, b.samples[k].volume.value);
  }
}

TEST(Flow, Errors) {
  FlowOptions o;
  o.max_events = 1;
  try {
    runFlow(shapes::regularTetrahedron(0.5), o);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::MaxEventsExceeded);
  }
  const auto improper = polyhedronFromVertices(
      corpus::tetrahedron(), {Vec3(2, 0, 0), Vec3(0.6, 0, 0), Vec3(-0.5, 0.5, 0.1), Vec3(-0.4, -0.3, 0.5)});
  EXPECT_THROW(runFlow(improper), Error);
  EXPECT_THROW(runFlow(shapes::regularTetrahedron(1.0)), Error);
}

TEST(Nudge, IdealTetrahedron) {
  const auto p = shapes::regularTetrahedron(1.0);
  const auto q = nudgeIdealVertices(p, 1e-3);
  for (const auto& v : q.vertices()) EXPECT_EQ(classifyPoint(v), PointKind::Hyperideal);
  EXPECT_TRUE(isomorphic(q.skeleton(), p.skeleton()));
  // Schlafli oracle along r = 1 + delta u^2: dV = -1/2 sum l dtheta.
  boost::math::quadrature::gauss_kronrod<double, 15> gk;
  auto rate = [](double r) {
    const double h = 1e-3 * (r - 1.0);
    const auto lo = dihedralAngles(shapes::regularTetrahedron(r - h));
    const auto hi = dihedralAngles(shapes::regularTetrahedron(r + h));
    const auto len = edgeLengths(shapes::regularTetrahedron(r));
    double x = 0.0;
    for (int e = 0; e < 6; ++e) x += -0.5 * len[e] * (hi[e] - lo[e]) / (2 * h);
    return x;
  };
  const double gain = gk.integrate([&](double u) { return rate(1.0 + 1e-3 * u * u) * 2e-3 * u; }, 0.0, 1.0, 0);
  VolumeOptions vo;
  vo.tolerance = 1e-9;
  const double dv = volume(q, vo).value - volume(p, vo).value;
  EXPECT_NEAR(dv, gain, 1e-5);
  // Grows like delta log(1/delta); about 1.07e-2 here.
  EXPECT_LT(std::abs(dv), 1.1e-2);
  const auto adaptive = nudgeIdealVertices(p);
  EXPECT_FALSE(classifyVertices(adaptive).hasKind(PointKind::Ideal));
  try {
    nudgeIdealVertices(shapes::regularTetrahedron(0.5));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NoIdealVertices);
  }
}

TEST(Nudge, AdaptiveOverCorpus) {
  // Ideal vertices from realizing angle sums exactly at (k - 2) pi.
  const std::vector<Polyhedron> bases{shapes::cube(0.5), shapes::pyramid(5, 0.6, -0.3, 0.5)};
  for (const auto& base : bases) {
    const auto theta = dihedralAngles(base);
    const auto& g = base.skeleton();
    double lo = 0.0, hi = 1.0;
    for (int v = 0; v < g.vertexCount(); ++v) {
      double s = 0.0;
      for (int e : g.vertexEdges(v)) s += theta[e];
      hi = std::min(hi, (g.degree(v) - 2) * kPi / s);
    }
    (void)lo;
    Polyhedron p = base;
    for (int k = 1; k <= 20; ++k) {
      AngleVector t = theta;
      for (auto& x : t) x *= 1.0 + k / 20.0 * (hi - 1.0);
      p = realizeFromAngles(g, t, p);
    }
    ASSERT_TRUE(classifyVertices(p, 1e-8).hasKind(PointKind::Ideal));
    const auto q = nudgeIdealVertices(p);
    EXPECT_FALSE(classifyVertices(q).hasKind(PointKind::Ideal));
    EXPECT_EQ(classifyVertices(q).overall, Properness::Proper);
  }
}

TEST(Escape, NearIdealVertexPushedOut) {
  const Vec3 dir = Vec3(1, 0.2, -0.1).normalized();
  const auto p = polyhedronFromVertices(corpus::tetrahedron(), {(1 - 1e-4) * dir, Vec3(-0.5, 0.4, 0.1),
                                                                 Vec3(-0.3, -0.5, 0.2), Vec3(-0.2, 0.1, -0.6)});
  const auto before = classifyVertices(p);
  const auto q = escapeDeformation(p, 0);
  const auto after = classifyVertices(q);
  EXPECT_EQ(after.kinds[0], PointKind::Hyperideal);
  for (int v = 1; v < 4; ++v) EXPECT_EQ(after.kinds[v], before.kinds[v]);
  EXPECT_EQ(after.overall, Properness::Proper);
  EXPECT_LE(volume(p).value - volume(q).value, 1e-4);
}

TEST(Escape, ZeroTranslationIsIdentity) {
  const auto p = shapes::cube(0.5);
  EXPECT_EQ(escapeDeformation(p, Vec3::Zero()).planes(), p.planes());
}

TEST(Escape, AlmostProperIncidenceFreed) {
  const auto p = polyhedronFromVertices(
      corpus::tetrahedron(), {Vec3(2, 0, 0), Vec3(0.5, 0, 0), Vec3(-0.5, 0.5, 0.1), Vec3(-0.4, -0.3, 0.5)});
  ASSERT_EQ(classifyVertices(p).overall, Properness::AlmostProper);
  // Move along the normal of the polar plane of the pole, towards its kept side.
  const Vec3 n = polarPlane(p.vertex(0)).spatialNormal().normalized();
  const auto q = escapeDeformation(p, Vec3(-0.01 * n));
  EXPECT_EQ(classifyVertices(q).overall, Properness::Proper);
}

TEST(SupVolume, PyramidAndPrism) {
  const double n5 = 10 * (lobachevskyOracle(kPi / 4 + kPi / 10) + lobachevskyOracle(kPi / 4 - kPi / 10));
  const auto pyr = shapes::pyramid(5, 0.6, -0.3, 0.5);
  EXPECT_NEAR(supVolume(pyr.skeleton(), pyr), n5, 0.01 * n5);
  const auto prism = shapes::triangularPrism(0.6, -0.3, 0.6, 0.5);
  const double target = rectificationVolume(prism.skeleton()).value;
  EXPECT_NEAR(supVolume(corpus::prism(3), prism), target, 0.01 * target);
  EXPECT_THROW(supVolume(corpus::cube(), prism), Error);
}

TEST(SupVolume, RandomTetrahedronSeeds) {
  std::mt19937_64 rng(123);
  const auto base = shapes::regularTetrahedron(0.6);
  for (int i = 0; i < 5; ++i) {
    const auto seed = randomProperPolyhedron(base, rng);
    FlowOptions o;
    o.seed = i + 1;
    EXPECT_NEAR(supVolume(corpus::tetrahedron(), seed, o), kOctahedron, 0.01 * kOctahedron);
  }
}
