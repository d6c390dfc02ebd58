#include "polyvol/mink.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polyvol {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::PoleNotHyperideal: return "PoleNotHyperideal";
    case ErrorCode::PlanesDisjointInBall: return "PlanesDisjointInBall";
    case ErrorCode::PlanesEqual: return "PlanesEqual";
    case ErrorCode::OutsideModel: return "OutsideModel";
    case ErrorCode::DegenerateDeformation: return "DegenerateDeformation";
    case ErrorCode::NotPolyhedral: return "NotPolyhedral";
    case ErrorCode::CollapseMakesDegenerate: return "CollapseMakesDegenerate";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::SkeletonMismatch: return "SkeletonMismatch";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::EdgeMissesBall: return "EdgeMissesBall";
    case ErrorCode::TooFewAngles: return "TooFewAngles";
    case ErrorCode::ImproperInput: return "ImproperInput";
    case ErrorCode::NotIdeal: return "NotIdeal";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::PathDiscontinuous: return "PathDiscontinuous";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::SkeletonChanged: return "SkeletonChanged";
    case ErrorCode::MaxEventsExceeded: return "MaxEventsExceeded";
    case ErrorCode::StallDetected: return "StallDetected";
    case ErrorCode::NoIdealVertices: return "NoIdealVertices";
    case ErrorCode::PropernessLost: return "PropernessLost";
    case ErrorCode::NoSeparatingPlane: return "NoSeparatingPlane";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

const char* pointKindName(PointKind kind) {
  switch (kind) {
    case PointKind::Real: return "Real";
    case PointKind::Ideal: return "Ideal";
    case PointKind::Hyperideal: return "Hyperideal";
  }
  return "?";
}

ProjectivePoint ProjectivePoint::fromHomogeneous(const Vec4& h) {
  const double scale = h.norm();
  if (std::abs(h[0]) <= 1e-14 * scale) return atInfinity(h.tail<3>());
  return ProjectivePoint(Vec3(h.tail<3>() / h[0]));
}

ProjectivePoint ProjectivePoint::atInfinity(const Vec3& direction) {
  ProjectivePoint p(direction.normalized());
  p.at_infinity_ = true;
  return p;
}

Vec4 ProjectivePoint::lift() const {
  if (at_infinity_) throw Error(ErrorCode::OutsideModel, "point at infinity has no chart lift");
  return Vec4(1.0, chart_[0], chart_[1], chart_[2]);
}

Vec4 ProjectivePoint::homogeneousUnit() const {
  if (at_infinity_) return Vec4(0.0, chart_[0], chart_[1], chart_[2]);
  return lift().normalized();
}

double ProjectivePoint::liftSquare() const { return chart_.squaredNorm() - 1.0; }

PointKind classifyPoint(const ProjectivePoint& p, double tau) {
  if (p.atInfinity()) return PointKind::Hyperideal;
  const double r = p.norm();
  if (r < 1.0 - tau) return PointKind::Real;
  if (r > 1.0 + tau) return PointKind::Hyperideal;
  return PointKind::Ideal;
}

OrientedPlane OrientedPlane::fromNormal(const Vec4& normal) {
  const double e = normal.norm();
  if (e == 0.0) throw Error(ErrorCode::PlanesEqual, "zero plane normal");
  const double q = minkowski(normal, normal);
  if (q > 1e-12 * e * e) return fromRawNormal(normal / std::sqrt(q));
  return fromRawNormal(normal / e);
}

OrientedPlane OrientedPlane::fromEquation(const Vec3& s, double c) {
  return fromNormal(Vec4(c, s[0], s[1], s[2]));
}

OrientedPlane OrientedPlane::through(const Vec3& a, const Vec3& b, const Vec3& c,
                                     const Vec3& inside) {
  const Vec3 s = (b - a).cross(c - a);
  OrientedPlane p = fromEquation(s, s.dot(a));
  if (p.pairing(ProjectivePoint(inside)) > 0.0) p = p.flipped();
  return p;
}

bool OrientedPlane::tangentToSphere(double tol) const {
  return std::abs(minkowski(normal_, normal_)) <= tol * normal_.squaredNorm();
}

double OrientedPlane::pairing(const ProjectivePoint& p) const {
  if (p.atInfinity()) return minkowski(p.homogeneousUnit(), normal_);
  return minkowski(p.lift(), normal_);
}

double OrientedPlane::euclideanSignedDistance(const Vec3& x) const {
  const Vec3 s = spatialNormal();
  return (s.dot(x) - normal_[0]) / s.norm();
}

bool OrientedPlane::contains(const ProjectivePoint& p, double slack) const {
  if (p.atInfinity()) return pairing(p) <= slack;
  return euclideanSignedDistance(p.chart()) <= slack;
}

ProjectivePoint OrientedPlane::pole() const { return ProjectivePoint::fromHomogeneous(normal_); }

double OrientedPlane::distanceFromOrigin() const {
  return std::abs(normal_[0]) / spatialNormal().norm();
}

OrientedPlane polarPlane(const ProjectivePoint& p, double tau) {
  if (classifyPoint(p, tau) != PointKind::Hyperideal || p.atInfinity()) {
    throw Error(ErrorCode::PoleNotHyperideal,
                "|p| = " + std::to_string(p.norm()) + " is not beyond the sphere");
  }
  return OrientedPlane::fromNormal(p.lift());
}

const char* poleSeparationName(PoleSeparation s) {
  switch (s) {
    case PoleSeparation::SegmentThrough: return "SegmentThrough";
    case PoleSeparation::HalfLineThrough: return "HalfLineThrough";
    case PoleSeparation::Neither: return "Neither";
  }
  return "?";
}

PoleSeparation polesSeparated(const ProjectivePoint& p, const ProjectivePoint& q, double tau) {
  for (const auto* x : {&p, &q}) {
    if (classifyPoint(*x, tau) != PointKind::Hyperideal || x->atInfinity()) {
      throw Error(ErrorCode::PoleNotHyperideal, "both poles must be hyperideal chart points");
    }
  }
  const Vec3 d = q.chart() - p.chart();
  const double a = d.squaredNorm();
  const double b = p.chart().dot(d);
  const double c = p.chart().squaredNorm() - 1.0;
  const double disc = b * b - a * c;
  if (a == 0.0 || disc <= 0.0) return PoleSeparation::Neither;
  const double root = std::sqrt(disc);
  const double s1 = (-b - root) / a;
  const double s2 = (-b + root) / a;
  if (s1 < 1.0 && s2 > 0.0) return PoleSeparation::SegmentThrough;
  if (s1 >= 1.0) return PoleSeparation::HalfLineThrough;
  return PoleSeparation::Neither;
}

double dihedralAngle(const OrientedPlane& a, const OrientedPlane& b, double tol) {
  const Vec4 ea = a.normal().normalized();
  const Vec4 eb = b.normal().normalized();
  if (std::abs(ea.dot(eb)) >= 1.0 - 1e-14) {
    throw Error(ErrorCode::PlanesEqual, "planes coincide as projective planes");
  }
  if (minkowski(a.normal(), a.normal()) <= 0.0 || minkowski(b.normal(), b.normal()) <= 0.0) {
    throw Error(ErrorCode::PlanesDisjointInBall, "a plane does not meet the ball");
  }
  const double c = minkowski(a.normal(), b.normal());
  if (std::abs(c) > 1.0 + tol) {
    throw Error(ErrorCode::PlanesDisjointInBall,
                "planes are ultraparallel, pairing " + std::to_string(c));
  }
  return std::acos(std::clamp(-c, -1.0, 1.0));
}

Vec4 timelikeUnit(const ProjectivePoint& p) {
  if (classifyPoint(p, 0.0) != PointKind::Real) {
    throw Error(ErrorCode::OutsideModel, "point is not inside H^3");
  }
  const Vec4 x = p.lift();
  return x / std::sqrt(-minkowski(x, x));
}

double hyperbolicDistance(const ProjectivePoint& x, const ProjectivePoint& y) {
  const Vec4 d = timelikeUnit(x) - timelikeUnit(y);
  const double q = std::max(0.0, minkowski(d, d));
  return 2.0 * std::asinh(std::sqrt(q) / 2.0);
}

double hyperbolicDistance(const ProjectivePoint& x, const OrientedPlane& plane) {
  if (!plane.meetsBall()) throw Error(ErrorCode::OutsideModel, "plane does not meet H^3");
  return std::asinh(std::abs(minkowski(timelikeUnit(x), plane.normal())));
}

double hyperbolicDistance(const OrientedPlane& a, const OrientedPlane& b) {
  if (!a.meetsBall() || !b.meetsBall()) {
    throw Error(ErrorCode::OutsideModel, "plane does not meet H^3");
  }
  const double c = std::abs(minkowski(a.normal(), b.normal()));
  return c <= 1.0 ? 0.0 : std::acosh(c);
}

AffineDeformation AffineDeformation::homothety(const Vec3& center, double factor) {
  if (!(factor > 0.0)) {
    throw Error(ErrorCode::DegenerateDeformation, "homothety factor must be positive");
  }
  AffineDeformation d;
  d.kind_ = Kind::Homothety;
  d.center_ = center;
  d.factor_ = factor;
  return d;
}

AffineDeformation AffineDeformation::translation(const Vec3& vector) {
  AffineDeformation d;
  d.kind_ = Kind::Translation;
  d.vector_ = vector;
  return d;
}

Vec3 AffineDeformation::apply(const Vec3& x) const {
  if (kind_ == Kind::Translation) return x + vector_;
  return center_ + factor_ * (x - center_);
}

ProjectivePoint AffineDeformation::apply(const ProjectivePoint& p) const {
  // Affine maps fix the plane at infinity pointwise up to scale.
  if (p.atInfinity()) return p;
  return ProjectivePoint(apply(p.chart()));
}

OrientedPlane AffineDeformation::apply(const OrientedPlane& plane) const {
  const Vec4& n = plane.normal();
  const Vec3 s = plane.spatialNormal();
  double n0 = n[0];
  if (kind_ == Kind::Translation) {
    n0 += s.dot(vector_);
  } else {
    n0 = factor_ * n0 - (factor_ - 1.0) * s.dot(center_);
  }
  return OrientedPlane::fromNormal(Vec4(n0, s[0], s[1], s[2]));
}

std::vector<OrientedPlane> AffineDeformation::apply(std::span<const OrientedPlane> planes) const {
  std::vector<OrientedPlane> out;
  out.reserve(planes.size());
  for (const auto& p : planes) out.push_back(apply(p));
  return out;
}

std::vector<ProjectivePoint> AffineDeformation::apply(
    std::span<const ProjectivePoint> points) const {
  std::vector<ProjectivePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(apply(p));
  return out;
}

AffineDeformation AffineDeformation::after(const AffineDeformation& first) const {
  // Both maps are x -> lambda x + b.
  auto linear = [](const AffineDeformation& d, double& lambda, Vec3& b) {
    if (d.kind_ == Kind::Translation) {
      lambda = 1.0;
      b = d.vector_;
    } else {
      lambda = d.factor_;
      b = (1.0 - d.factor_) * d.center_;
    }
  };
  double l1, l2;
  Vec3 b1, b2;
  linear(first, l1, b1);
  linear(*this, l2, b2);
  const double lambda = l1 * l2;
  const Vec3 b = l2 * b1 + b2;
  if (kind_ == Kind::Translation && first.kind_ == Kind::Translation) return translation(b);
  if (std::abs(lambda - 1.0) < 1e-15) return translation(b);
  return homothety(b / (1.0 - lambda), lambda);
}

Isometry Isometry::rotation(const Eigen::Matrix3d& r) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(1, 1) = r;
  return Isometry(m);
}

Isometry Isometry::rotation(const Vec3& axis, double angle) {
  return rotation(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

Isometry Isometry::boost(const Vec3& direction, double distance) {
  const Vec3 u = direction.normalized();
  const double ch = std::cosh(distance);
  const double sh = std::sinh(distance);
  Mat4 m = Mat4::Identity();
  m(0, 0) = ch;
  m.block<1, 3>(0, 1) = sh * u.transpose();
  m.block<3, 1>(1, 0) = sh * u;
  m.block<3, 3>(1, 1) += (ch - 1.0) * u * u.transpose();
  return Isometry(m);
}

Isometry Isometry::movingToOrigin(const ProjectivePoint& p) {
  const double r = p.norm();
  if (r >= 1.0) throw Error(ErrorCode::OutsideModel, "only real points can be centered");
  if (r == 0.0) return Isometry();
  return boost(-p.chart(), std::atanh(r));
}

Isometry Isometry::inverse() const {
  const Eigen::Vector4d eta(-1, 1, 1, 1);
  return Isometry(eta.asDiagonal() * matrix_.transpose() * eta.asDiagonal());
}

ProjectivePoint Isometry::apply(const ProjectivePoint& p) const {
  return ProjectivePoint::fromHomogeneous(matrix_ * p.homogeneousUnit());
}

OrientedPlane Isometry::apply(const OrientedPlane& plane) const {
  return OrientedPlane::fromNormal(matrix_ * plane.normal());
}

}  // namespace polyvol
