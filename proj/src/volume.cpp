#include "polyvol/volume.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polyvol {

const char* volumeMethodName(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::IdealDecomposition: return "IdealDecomposition";
    case VolumeMethod::KleinQuadrature: return "KleinQuadrature";
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

struct LobachevskySeries {
  static constexpr int kTerms = 40;
  std::array<double, kTerms> coeff{};
  LobachevskySeries() {
    for (int n = 1; n <= kTerms; ++n) {
      coeff[n - 1] = boost::math::zeta(2.0 * n) / (n * (2.0 * n + 1.0));
    }
  }
};

}  // namespace

double lobachevsky(double x) {
  static const LobachevskySeries series;
  double y = x - kPi * std::round(x / kPi);
  if (y == 0.0) return 0.0;
  const double sign = y < 0.0 ? -1.0 : 1.0;
  y = std::abs(y);
  const double q = (y / kPi) * (y / kPi);
  double sum = 0.0;
  double power = q;
  for (double c : series.coeff) {
    sum += c * power;
    power *= q;
    if (power < 1e-20) break;
  }
  return sign * y * (1.0 - std::log(2.0 * y) + sum);
}

double idealTetrahedronVolume(const ProjectivePoint& p1, const ProjectivePoint& p2,
                              const ProjectivePoint& p3, const ProjectivePoint& p4, double tau) {
  std::array<Vec3, 4> pts;
  const std::array<const ProjectivePoint*, 4> in{&p1, &p2, &p3, &p4};
  for (int i = 0; i < 4; ++i) {
    if (in[i]->atInfinity() || classifyPoint(*in[i], tau) != PointKind::Ideal) {
      throw Error(ErrorCode::NotIdeal, "tetrahedron corner " + std::to_string(i) + " is off the sphere");
    }
    pts[i] = in[i]->chart().normalized();
  }
  // Stereographic projection from the first corner sends it to infinity.
  const Vec3 pole = pts[0];
  const Vec3 e1 = pole.unitOrthogonal();
  const Vec3 e2 = pole.cross(e1);
  std::array<Eigen::Vector2d, 3> z;
  for (int i = 0; i < 3; ++i) {
    const Vec3& q = pts[i + 1];
    const double denom = 1.0 - q.dot(pole);
    if (denom < 1e-14) return 0.0;
    z[i] = Eigen::Vector2d(q.dot(e1), q.dot(e2)) / denom;
  }
  const Eigen::Vector2d u = z[1] - z[0];
  const Eigen::Vector2d v = z[2] - z[0];
  const double cross = u.x() * v.y() - u.y() * v.x();
  const double scale = std::max({u.squaredNorm(), v.squaredNorm(), (z[2] - z[1]).squaredNorm()});
  if (scale == 0.0 || std::abs(cross) <= 1e-14 * scale) return 0.0;
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d a = z[(i + 1) % 3] - z[i];
    const Eigen::Vector2d b = z[(i + 2) % 3] - z[i];
    const double angle = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
    total += lobachevsky(angle);
  }
  return total;
}

namespace {

// G(r) = artanh(r) / (2r); the flux of the radial field with divergence
// (1 - |x|^2)^-2 through a face reduces to integrals of G along its edges.
double fluxG(double r) {
  if (r < 1e-8) return 0.5;
  r = std::min(r, 1.0 - 1e-16);
  return std::atanh(r) / (2.0 * r);
}

// dG/d(r^2)
double fluxGPrime(double u) {
  const double r = std::sqrt(u);
  if (r < 0.05) {
    double sum = 0.0, power = 1.0;
    for (int k = 1; k <= 10; ++k) {
      sum += k / (2.0 * (2.0 * k + 1.0)) * power;
      power *= u;
    }
    return sum;
  }
  const double rr = std::min(r, 1.0 - 1e-16);
  return (rr / (1.0 - rr * rr) - std::atanh(rr)) / (4.0 * rr * rr * rr);
}

// (G(r) - G(d)) / (r^2 - d^2)
double fluxQuotient(double r2, double d2) {
  const double du = r2 - d2;
  if (std::abs(du) > 1e-5) return (fluxG(std::sqrt(r2)) - fluxG(std::sqrt(d2))) / du;
  return fluxGPrime(0.5 * (r2 + d2));
}

}  // namespace

VolumeResult kleinQuadrature(const std::vector<std::vector<Vec3>>& polygons,
                             const std::vector<Vec3>& normals, const std::vector<double>& offsets,
                             const VolumeOptions& opts) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  VolumeResult out;
  out.method = VolumeMethod::KleinQuadrature;
  long evaluations = 0;
  double total = 0.0, error = 0.0;
  std::size_t pieces = 0;
  for (const auto& poly : polygons) pieces += poly.size();
  const double piece_tol = std::max(1e-14, opts.tolerance / std::max<std::size_t>(1, pieces));

  for (std::size_t f = 0; f < polygons.size(); ++f) {
    const auto& poly = polygons[f];
    const double d = offsets[f];
    if (poly.size() < 3 || std::abs(d) < 1e-300) continue;
    const Vec3& nu = normals[f];
    const Vec3 c = d * nu;
    const double d2 = d * d;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec3& a = poly[i];
      const Vec3& b = poly[(i + 1) % poly.size()];
      const Vec3 step = b - a;
      const double h = (a - c).cross(step).dot(nu);
      if (std::abs(h) < 1e-15 * std::max(1.0, step.squaredNorm())) continue;
      auto integrand = [&](double, double sc) {
        ++evaluations;
        const Vec3 x = sc < 0.0 ? Vec3(a - sc * step) : Vec3(b - sc * step);
        return fluxQuotient(x.squaredNorm(), d2);
      };
      double err = 0.0, l1 = 0.0;
      const double piece = integrator.integrate(integrand, 0.0, 1.0,
                                                std::max(1e-15, piece_tol / std::abs(d * h)),
                                                &err, &l1);
      total += d * h * piece;
      error += std::abs(d * h) * err * std::max(1.0, l1);
      if (evaluations > opts.max_evaluations) out.budget_exceeded = true;
    }
  }
  out.value = std::max(0.0, total);
  out.error_estimate = error + 1e-14 * std::abs(total);
  out.evaluations = evaluations;
  return out;
}

namespace {

bool allIdeal(const TruncatedPolyhedron& t) {
  for (const auto& f : t.faces) {
    for (int i : f) {
      if (std::abs(t.points[i].norm() - 1.0) > kIdealTolerance) return false;
    }
  }
  return true;
}

VolumeResult idealDecomposition(const TruncatedPolyhedron& t, int apex) {
  if (apex < 0) {
    for (const auto& f : t.faces) {
      if (!f.empty()) {
        apex = f[0];
        break;
      }
    }
  }
  const ProjectivePoint o(t.points[apex]);
  double total = 0.0;
  int count = 0;
  for (const auto& f : t.faces) {
    if (f.empty() || std::find(f.begin(), f.end(), apex) != f.end()) continue;
    const ProjectivePoint a(t.points[f[0]]);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      // Fan triangles are counter-clockwise from outside, so the apex lies
      // behind them; the unsigned volume is the right one.
      total += idealTetrahedronVolume(o, a, ProjectivePoint(t.points[f[i]]),
                                      ProjectivePoint(t.points[f[i + 1]]));
      ++count;
    }
  }
  VolumeResult out;
  out.value = total;
  out.method = VolumeMethod::IdealDecomposition;
  out.error_estimate = 1e-13 * std::max(1, count);
  return out;
}

}  // namespace

VolumeResult volume(const TruncatedPolyhedron& t, const VolumeOptions& opts) {
  if (t.empty()) return {};
  if (allIdeal(t)) return idealDecomposition(t, opts.apex);
  std::vector<std::vector<Vec3>> polygons;
  std::vector<Vec3> normals;
  std::vector<double> offsets;
  for (std::size_t f = 0; f < t.planes.size(); ++f) {
    std::vector<Vec3> poly;
    for (int i : t.faces[f]) poly.push_back(t.points[i]);
    polygons.push_back(std::move(poly));
    const Vec3 s = t.planes[f].spatialNormal();
    normals.push_back(s.normalized());
    offsets.push_back(t.planes[f].normal()[0] / s.norm());
  }
  return kleinQuadrature(polygons, normals, offsets, opts);
}

VolumeResult volume(const Polyhedron& p, const VolumeOptions& opts) {
  return volume(truncate(p), opts);
}

double schlafliResidual(const PolyhedronPath& path, double t0, double h) {
  const Polyhedron lo = path(t0 - h);
  const Polyhedron mid = path(t0);
  const Polyhedron hi = path(t0 + h);
  const auto r_mid = classifyVertices(mid);
  for (const Polyhedron* p : {&lo, &hi}) {
    if (p->skeleton().faces() != mid.skeleton().faces()) {
      throw Error(ErrorCode::PathDiscontinuous, "skeleton changes inside the window");
    }
    const auto r = classifyVertices(*p);
    if (r.kinds != r_mid.kinds || r.status != r_mid.status) {
      throw Error(ErrorCode::PathDiscontinuous, "vertex classification changes inside the window");
    }
  }
  if (r_mid.hasKind(PointKind::Ideal)) {
    throw Error(ErrorCode::PathDiscontinuous, "path passes through an ideal vertex");
  }
  VolumeOptions vo;
  vo.tolerance = 1e-12;
  const double dv = (volume(hi, vo).value - volume(lo, vo).value) / (2.0 * h);
  const auto a_lo = dihedralAngles(lo);
  const auto a_hi = dihedralAngles(hi);
  const auto lengths = edgeLengths(mid);
  double sum = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    sum += lengths[i] * (a_hi[i] - a_lo[i]) / (2.0 * h);
  }
  return std::abs(dv + 0.5 * sum);
}

}  // namespace polyvol
