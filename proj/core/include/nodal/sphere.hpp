#pragma once

#include <array>

namespace nodal {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

/// Point on the unit sphere: colatitude theta in [0, pi], longitude phi in [0, 2 pi).
struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;

  static SpherePoint north_pole() { return {0.0, 0.0}; }
  static SpherePoint south_pole();
};

/// Throws DomainError if theta or phi is outside its range.
void validate(const SpherePoint& p);

Vec3 to_cartesian(const SpherePoint& p);

/// Inverse of to_cartesian; the input is normalized first.
SpherePoint to_spherical(const Vec3& v);

/// Cosine of the angle between two points (clamped to [-1, 1]).
double cos_angle(const SpherePoint& a, const SpherePoint& b);

/// Great-circle angle in [0, pi].
double angle_between(const SpherePoint& a, const SpherePoint& b);
double angle_between(const Vec3& a, const Vec3& b);

/// Orthonormal tangent frame (e_theta, e_phi) at p. At the poles the frame is
/// the limit along the meridian phi = p.phi.
struct TangentFrame {
  Vec3 normal;
  Vec3 e_theta;
  Vec3 e_phi;
};

TangentFrame tangent_frame(const SpherePoint& p);

/// Exponential map: geodesic of length |v| leaving p in direction
/// v1 e_theta + v2 e_phi. Exact for every |v| (no small-angle approximation).
Vec3 exp_map(const TangentFrame& frame, double v1, double v2);

/// Uniform point on the sphere from two uniforms in [0, 1).
SpherePoint uniform_sphere_point(double u1, double u2);

}  // namespace nodal
