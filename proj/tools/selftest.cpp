#include "selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "polyvol/flow.hpp"
#include "polyvol/graph.hpp"
#include "polyvol/io.hpp"
#include "polyvol/rectify.hpp"
#include "polyvol/volume.hpp"

namespace polyvol::selftest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOctahedron = 3.663862376708876;

// Lobachevsky function straight from its integral.
double lobachevskyByQuadrature(double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return -ts.integrate([](double t) { return std::log(std::abs(2.0 * std::sin(t))); }, 0.0, x);
}

std::string fmt(double x) { return formatNumber(x); }

struct Base {
  const char* name;
  Polyhedron poly;
};

std::vector<Base> baseShapes() {
  return {{"K4", shapes::regularTetrahedron(0.6)},
          {"pyramid4", shapes::pyramid(4, 0.6, -0.3, 0.5)},
          {"prism3", shapes::triangularPrism(0.6, -0.3, 0.6, 0.5)},
          {"pyramid5", shapes::pyramid(5, 0.6, -0.3, 0.5)},
          {"cube", shapes::cube(0.5)}};
}

Outcome octahedronValue() {
  Outcome o{1, "rectified-K4-volume"};
  const auto r = rectificationVolume(corpus::tetrahedron());
  const double err = std::abs(r.value - kOctahedron);
  o.pass = err < 1e-6 && r.method == VolumeMethod::IdealDecomposition;
  o.detail = "value=" + fmt(r.value) + " err=" + fmt(err) + " method=" + volumeMethodName(r.method);
  return o;
}

Outcome pyramidFamily() {
  Outcome o{2, "pyramid-family"};
  double worst = 0.0;
  for (int n = 3; n <= 8; ++n) {
    const double a = kPi / 4.0 + kPi / (2.0 * n);
    const double b = kPi / 4.0 - kPi / (2.0 * n);
    const double expected = 2.0 * n * (lobachevskyByQuadrature(a) + lobachevskyByQuadrature(b));
    worst = std::max(worst, std::abs(rectificationVolume(corpus::pyramid(n)).value - expected));
  }
  o.pass = worst < 1e-6;
  o.detail = "max_err=" + fmt(worst);
  return o;
}

Outcome duality() {
  Outcome o{3, "duality"};
  std::vector<PlanarGraph> graphs{corpus::tetrahedron(), corpus::cube(), corpus::octahedron(),
                                  corpus::prism(3)};
  for (int n = 3; n <= 6; ++n) graphs.push_back(corpus::pyramid(n));
  double worst = 0.0;
  for (const auto& g : graphs) {
    worst = std::max(worst, std::abs(rectificationVolume(g).value - rectificationVolume(dualGraph(g)).value));
  }
  o.pass = worst < 1e-8;
  o.detail = "graphs=" + std::to_string(graphs.size()) + " max_diff=" + fmt(worst);
  return o;
}

Vec3 randomInBall(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    Vec3 x(u(rng), u(rng), u(rng));
    if (x.norm() <= 1.0) return r * x;
  }
}

Outcome schlafli(std::uint64_t seed) {
  Outcome o{4, "schlafli-residual"};
  std::mt19937_64 rng(seed);
  const PlanarGraph k4 = corpus::tetrahedron();
  double worst = 0.0;
  int compact = 0, hyper = 0, failures = 0;
  while (compact < 20) {
    std::vector<Vec3> p(4), d(4);
    for (int i = 0; i < 4; ++i) {
      p[i] = randomInBall(rng, 0.85);
      d[i] = randomInBall(rng, 0.3);
    }
    PolyhedronPath path = [&, p, d](double t) {
      std::vector<Vec3> x(4);
      for (int i = 0; i < 4; ++i) x[i] = p[i] + t * d[i];
      return polyhedronFromVertices(k4, x);
    };
    try {
      path(-1e-3);
      path(1e-3);
      path(0.0);
    } catch (const Error&) {
      continue;
    }
    try {
      worst = std::max(worst, schlafliResidual(path, 0.0));
    } catch (const Error&) {
      ++failures;
    }
    ++compact;
  }
  const Polyhedron start = shapes::regularTetrahedron(1.6);
  const AngleVector theta_start = dihedralAngles(start);
  std::uniform_real_distribution<double> angle(0.2, 1.0), dir(-0.3, 0.3);
  while (hyper < 10) {
    AngleVector theta(6), delta(6);
    for (int e = 0; e < 6; ++e) {
      theta[e] = angle(rng);
      delta[e] = dir(rng);
    }
    bool ok = true;
    for (int v = 0; v < 4; ++v) {
      double s = 0.0;
      for (int e : k4.vertexEdges(v)) s += theta[e];
      ok = ok && s < kPi - 0.1;
    }
    if (!ok || !checkBaoBonahon(k4, theta).admissible()) continue;
    Polyhedron seed = start;
    try {
      for (int k = 1; k <= 10; ++k) {
        AngleVector mid(6);
        for (int e = 0; e < 6; ++e) mid[e] = theta_start[e] + k / 10.0 * (theta[e] - theta_start[e]);
        seed = realizeFromAngles(seed.skeleton(), mid, seed);
      }
    } catch (const Error&) {
      continue;
    }
    PolyhedronPath path = [seed, theta, delta](double t) {
      AngleVector a(6);
      for (int e = 0; e < 6; ++e) a[e] = theta[e] + t * delta[e];
      return realizeFromAngles(seed.skeleton(), a, seed);
    };
    try {
      worst = std::max(worst, schlafliResidual(path, 0.0));
    } catch (const Error&) {
      ++failures;
    }
    ++hyper;
  }
  o.pass = failures == 0 && worst < 1e-3;
  o.detail = "families=" + std::to_string(compact) + "+" + std::to_string(hyper) +
             " max_residual=" + fmt(worst) + " failures=" + std::to_string(failures);
  return o;
}

Outcome flowConvergence(std::uint64_t seed) {
  Outcome o{5, "flow-convergence"};
  std::mt19937_64 rng(seed);
  double worst_rel = 0.0, worst_drop = 0.0;
  int runs = 0, failures = 0;
  std::string failed;
  const auto bases = baseShapes();
  for (int b = 0; b < 3; ++b) {
    const double target = rectificationVolume(bases[b].poly.skeleton()).value;
    for (int i = 0; i < 5; ++i) {
      ++runs;
      try {
        const Polyhedron p0 = randomProperPolyhedron(bases[b].poly, rng);
        FlowOptions opts;
        opts.seed = rng();
        const FlowTrace trace = runFlow(p0, opts);
        worst_rel = std::max(worst_rel, std::abs(trace.sup_estimate - target) / target);
        for (std::size_t k = 1; k < trace.samples.size(); ++k) {
          const auto& a = trace.samples[k - 1].volume;
          const auto& c = trace.samples[k].volume;
          const double drop = a.value - c.value - a.error_estimate - c.error_estimate - trace.deformation_loss;
          worst_drop = std::max(worst_drop, drop);
        }
      } catch (const Error& err) {
        ++failures;
        failed += std::string(" ") + bases[b].name + ":" + std::string(errorCodeName(err.code()));
      }
    }
  }
  o.pass = failures == 0 && worst_rel < 0.01 && worst_drop <= 0.0;
  o.detail = "runs=" + std::to_string(runs) + " max_rel_err=" + fmt(worst_rel) +
             " max_unexplained_drop=" + fmt(worst_drop) + " failures=" + std::to_string(failures) + failed;
  return o;
}

Outcome collapseMonotone() {
  Outcome o{6, "collapse-monotonicity"};
  std::vector<PlanarGraph> graphs{corpus::cube(), corpus::prism(4), corpus::prism(5), corpus::antiprism(4),
                                  corpus::cuboctahedron(), corpus::octahedron(), corpus::pyramid(5),
                                  corpus::prism(6)};
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  int instances = 0;
  double worst = -1e300;
  for (const auto& g : graphs) {
    const double before = rectificationVolume(g).value;
    for (int e = 0; e < g.edgeCount() && instances < 10; ++e) {
      CollapseResult c;
      try {
        c = edgeCollapse(g, e);
      } catch (const Error& err) {
        if (err.code() == ErrorCode::CollapseMakesDegenerate) continue;
        throw;
      }
      if (!c.three_connected || !isPolyhedral(c.graph)) continue;
      if (!seen.insert({skeletonHash(g), skeletonHash(c.graph)}).second) continue;
      worst = std::max(worst, rectificationVolume(c.graph).value - before);
      ++instances;
    }
  }
  o.pass = instances == 10 && worst <= 1e-8;
  o.detail = "instances=" + std::to_string(instances) + " max_increase=" + fmt(worst);
  return o;
}

Outcome classification(std::uint64_t seed) {
  Outcome o{7, "angle-classification"};
  std::mt19937_64 rng(seed);
  const auto bases = baseShapes();
  int mismatches = 0, vertices = 0;
  for (int i = 0; i < 200; ++i) {
    const Polyhedron p = randomProperPolyhedron(bases[i % bases.size()].poly, rng, 0.4, 2.5, 0.1);
    const auto theta = dihedralAngles(p);
    const auto rep = classifyVertices(p, 1e-6);
    for (int v = 0; v < p.vertexCount(); ++v, ++vertices) {
      if (classifyVertexByAngles(incidentAngles(p, theta, v), 1e-6) != rep.kinds[v]) ++mismatches;
    }
  }
  o.pass = mismatches == 0;
  o.detail = "polyhedra=200 vertices=" + std::to_string(vertices) + " mismatches=" + std::to_string(mismatches);
  return o;
}

// Re-evaluates a violation witness from scratch: the faces must form a dual
// path or cycle through the listed edges and the angle sum must reach the bound.
bool witnessHolds(const PlanarGraph& g, const AngleVector& theta, const AdmissibilityReport& r) {
  const auto& edges = r.witness_edges;
  const auto& faces = r.witness_faces;
  const bool closed = r.status == AdmissibilityStatus::ViolatedClosedCurve;
  if (edges.empty()) return false;
  if (closed ? faces.size() != edges.size() : faces.size() != edges.size() + 1) return false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = g.edge(edges[i]);
    const int a = faces[i];
    const int b = faces[(i + 1) % faces.size()];
    if (!((e.left == a && e.right == b) || (e.left == b && e.right == a))) return false;
  }
  double sum = 0.0;
  for (int e : edges) sum += theta[e];
  const double h = static_cast<double>(edges.size());
  const double bound = closed ? (h - 2.0) * kPi : (h - 1.0) * kPi;
  if (sum > bound + 1e-12) return true;
  return sum >= bound - 1e-12 && !edgesShareVertex(g, edges);
}

Outcome admissibility(std::uint64_t seed) {
  Outcome o{8, "admissibility-convexity"};
  std::mt19937_64 rng(seed);
  const PlanarGraph graphs[2] = {corpus::tetrahedron(), corpus::cube()};
  std::uniform_real_distribution<double> small(1e-3, kPi / 2.0), any(1e-3, kPi - 1e-3);
  int pairs = 0, bad_midpoints = 0, inadmissible = 0, bad_witnesses = 0;
  auto draw = [&](const PlanarGraph& g, auto& dist) {
    AngleVector t(g.edgeCount());
    for (auto& x : t) x = dist(rng);
    return t;
  };
  while (pairs < 50) {
    const PlanarGraph& g = graphs[pairs % 2];
    const AngleVector a = draw(g, small), b = draw(g, small);
    if (!checkBaoBonahon(g, a).admissible() || !checkBaoBonahon(g, b).admissible()) continue;
    AngleVector m(a.size());
    for (std::size_t e = 0; e < a.size(); ++e) m[e] = 0.5 * (a[e] + b[e]);
    if (!checkBaoBonahon(g, m).admissible()) ++bad_midpoints;
    ++pairs;
  }
  while (inadmissible < 50) {
    const PlanarGraph& g = graphs[inadmissible % 2];
    const AngleVector t = draw(g, any);
    // Known bad: some vertex star sums past (deg - 2) pi.
    bool star = false;
    for (int v = 0; v < g.vertexCount(); ++v) {
      double s = 0.0;
      for (int e : g.vertexEdges(v)) s += t[e];
      star = star || s > (g.degree(v) - 2) * kPi;
    }
    if (!star) continue;
    const auto r = checkBaoBonahon(g, t);
    if (r.admissible() || !witnessHolds(g, t, r)) ++bad_witnesses;
    ++inadmissible;
  }
  o.pass = bad_midpoints == 0 && bad_witnesses == 0;
  o.detail = "pairs=50 bad_midpoints=" + std::to_string(bad_midpoints) +
             " inadmissible=50 bad_witnesses=" + std::to_string(bad_witnesses);
  return o;
}

Outcome roundTrip(std::uint64_t seed) {
  Outcome o{9, "truncation-round-trip"};
  std::mt19937_64 rng(seed);
  const auto bases = baseShapes();
  int done = 0, mismatches = 0, attempts = 0;
  while (done < 50 && attempts < 5000) {
    ++attempts;
    const Polyhedron p = randomProperPolyhedron(bases[attempts % bases.size()].poly, rng, 0.8, 2.5, 0.1);
    if (!classifyVertices(p).hasKind(PointKind::Hyperideal)) continue;
    const auto stripped = truncate(p).stripTruncation();
    bool same = stripped.size() == p.planes().size();
    for (std::size_t f = 0; same && f < stripped.size(); ++f) {
      same = stripped[f].normal() == p.planes()[f].normal();
    }
    mismatches += !same;
    ++done;
  }
  o.pass = done == 50 && mismatches == 0;
  o.detail = "polyhedra=" + std::to_string(done) + " mismatches=" + std::to_string(mismatches);
  return o;
}

}  // namespace

Outcome run(int id, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    switch (id) {
      case 1: o = octahedronValue(); break;
      case 2: o = pyramidFamily(); break;
      case 3: o = duality(); break;
      case 4: o = schlafli(seed); break;
      case 5: o = flowConvergence(seed); break;
      case 6: o = collapseMonotone(); break;
      case 7: o = classification(seed); break;
      case 8: o = admissibility(seed); break;
      case 9: o = roundTrip(seed); break;
      default: o = {id, "unknown", false, "no such criterion"};
    }
  } catch (const std::exception& err) {
    const char* names[10] = {"",
                             "rectified-K4-volume",
                             "pyramid-family",
                             "duality",
                             "schlafli-residual",
                             "flow-convergence",
                             "collapse-monotonicity",
                             "angle-classification",
                             "admissibility-convexity",
                             "truncation-round-trip"};
    o.id = id;
    o.name = id >= 1 && id <= 9 ? names[id] : "unknown";
    o.pass = false;
    o.detail = std::string("exception: ") + err.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Runtime budgets.
  const double budget[10] = {0, 5, 30, 600, 120, 600, 600, 600, 600, 600};
  if (id >= 1 && id <= 9 && o.seconds > budget[id]) {
    o.pass = false;
    o.detail += " over time budget";
  }
  return o;
}

std::vector<Outcome> runAll(std::ostream& out, std::uint64_t seed) {
  std::vector<Outcome> all;
  for (int id = 1; id <= 9; ++id) {
    all.push_back(run(id, seed));
    const auto& o = all.back();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << ' ' << o.id << ' ' << o.name << ' ' << o.detail << " time="
         << formatNumber(o.seconds) << "s";
    out << line.str() << std::endl;
  }
  return all;
}

}  // namespace polyvol::selftest
