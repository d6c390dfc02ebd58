#pragma once

// Klein-model primitives. Points of the fixed affine chart R^3 of RP^3 lift to
// Minkowski space R^{1,3} as (1, x, y, z); the form is -x0*y0 + x1*y1 + x2*y2 + x3*y3.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "polyvol/errors.hpp"

namespace polyvol {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Width of the band |p| - 1 in which a point counts as ideal.
inline constexpr double kIdealTolerance = 1e-9;

inline double minkowski(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Minkowski form with the time coordinate negated, so that
// minkowski(a, b) == lowered(a).dot(b).
inline Vec4 lowered(const Vec4& a) { return Vec4(-a[0], a[1], a[2], a[3]); }

enum class PointKind { Real, Ideal, Hyperideal };

const char* pointKindName(PointKind kind);

class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  explicit ProjectivePoint(const Vec3& chart) : chart_(chart) {}
  ProjectivePoint(double x, double y, double z) : chart_(x, y, z) {}

  // Homogeneous 4-vector (any scale, any sign). A vanishing time coordinate
  // yields a point at infinity of the chart.
  static ProjectivePoint fromHomogeneous(const Vec4& h);
  static ProjectivePoint atInfinity(const Vec3& direction);

  const Vec3& chart() const { return chart_; }
  bool atInfinity() const { return at_infinity_; }

  // (1, x, y, z); requires a chart point.
  Vec4 lift() const;
  // Lift rescaled to Euclidean unit length; defined for points at infinity too.
  Vec4 homogeneousUnit() const;
  // x^2 + y^2 + z^2 - 1, the Minkowski square of the lift.
  double liftSquare() const;
  double norm() const { return chart_.norm(); }

 private:
  Vec3 chart_ = Vec3::Zero();
  bool at_infinity_ = false;
};

PointKind classifyPoint(const ProjectivePoint& p, double tau = kIdealTolerance);

// A projective plane together with one of its closed half-spaces. The normal
// points away from the selected half-space: a chart point x belongs to it iff
// minkowski((1, x), normal) <= 0. Planes meeting H^3 have spacelike normals
// stored with Minkowski square +1; other planes keep a Euclidean-unit normal.
class OrientedPlane {
 public:
  OrientedPlane() = default;
  static OrientedPlane fromNormal(const Vec4& normal);
  // Euclidean description {x : s.x = c}, keeping s.x <= c.
  static OrientedPlane fromEquation(const Vec3& s, double c);
  // Plane through three chart points, oriented so `inside` lies in the kept side.
  static OrientedPlane through(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& inside);

  const Vec4& normal() const { return normal_; }
  Vec3 spatialNormal() const { return normal_.tail<3>(); }

  bool meetsBall() const { return minkowski(normal_, normal_) > 0.0 && !tangentToSphere(); }
  bool tangentToSphere(double tol = 1e-12) const;

  // Negating the normal selects the complementary half-space.
  OrientedPlane flipped() const { return fromRawNormal(-normal_); }

  // minkowski(lift, normal): negative strictly inside the kept half-space.
  double pairing(const ProjectivePoint& p) const;
  // Euclidean signed distance of a chart point (positive outside).
  double euclideanSignedDistance(const Vec3& x) const;
  bool contains(const ProjectivePoint& p, double slack = 0.0) const;

  // Pole of the plane; at infinity for planes through the origin.
  ProjectivePoint pole() const;

  // Euclidean distance from the chart origin to the plane.
  double distanceFromOrigin() const;

  friend bool operator==(const OrientedPlane& a, const OrientedPlane& b) {
    return a.normal_ == b.normal_;
  }

  static OrientedPlane fromRawNormal(const Vec4& n) {
    OrientedPlane p;
    p.normal_ = n;
    return p;
  }

 private:
  Vec4 normal_ = Vec4(0, 0, 0, 1);
};

// Polar plane of a hyperideal point, keeping the half-space with the origin.
OrientedPlane polarPlane(const ProjectivePoint& p, double tau = kIdealTolerance);

enum class PoleSeparation { SegmentThrough, HalfLineThrough, Neither };

const char* poleSeparationName(PoleSeparation s);

PoleSeparation polesSeparated(const ProjectivePoint& p, const ProjectivePoint& q,
                              double tau = kIdealTolerance);

// Interior dihedral angle between the kept half-spaces, in [0, pi].
double dihedralAngle(const OrientedPlane& a, const OrientedPlane& b, double tol = 1e-9);

double hyperbolicDistance(const ProjectivePoint& x, const ProjectivePoint& y);
double hyperbolicDistance(const ProjectivePoint& x, const OrientedPlane& plane);
double hyperbolicDistance(const OrientedPlane& a, const OrientedPlane& b);

// Unit timelike representative (Minkowski square -1, positive time) of a real point.
Vec4 timelikeUnit(const ProjectivePoint& p);

// Affine maps of the chart used to restore properness: homotheties and
// translations.
class AffineDeformation {
 public:
  enum class Kind { Homothety, Translation };

  static AffineDeformation homothety(const Vec3& center, double factor);
  static AffineDeformation translation(const Vec3& vector);
  static AffineDeformation identity() { return translation(Vec3::Zero()); }

  Kind kind() const { return kind_; }
  const Vec3& center() const { return center_; }
  double factor() const { return factor_; }
  const Vec3& vector() const { return vector_; }

  Vec3 apply(const Vec3& x) const;
  ProjectivePoint apply(const ProjectivePoint& p) const;
  OrientedPlane apply(const OrientedPlane& plane) const;
  std::vector<OrientedPlane> apply(std::span<const OrientedPlane> planes) const;
  std::vector<ProjectivePoint> apply(std::span<const ProjectivePoint> points) const;

  // (*this) after `first`. Homotheties whose factors multiply to 1 compose to
  // a translation.
  AffineDeformation after(const AffineDeformation& first) const;

 private:
  Kind kind_ = Kind::Translation;
  Vec3 center_ = Vec3::Zero();
  double factor_ = 1.0;
  Vec3 vector_ = Vec3::Zero();
};

// Isometry of H^3: a Lorentz transformation preserving the time orientation.
class Isometry {
 public:
  Isometry() : matrix_(Mat4::Identity()) {}
  explicit Isometry(const Mat4& m) : matrix_(m) {}

  static Isometry rotation(const Eigen::Matrix3d& r);
  static Isometry rotation(const Vec3& axis, double angle);
  // Hyperbolic translation along `direction` by `distance`.
  static Isometry boost(const Vec3& direction, double distance);
  // Translation carrying the real point p to the origin.
  static Isometry movingToOrigin(const ProjectivePoint& p);

  const Mat4& matrix() const { return matrix_; }
  Isometry then(const Isometry& next) const { return Isometry(next.matrix_ * matrix_); }
  Isometry inverse() const;

  ProjectivePoint apply(const ProjectivePoint& p) const;
  OrientedPlane apply(const OrientedPlane& plane) const;

 private:
  Mat4 matrix_;
};

}  // namespace polyvol
