#include "nodal/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodal/error.hpp"

namespace nodal {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

SpherePoint SpherePoint::south_pole() { return {std::numbers::pi, 0.0}; }

void validate(const SpherePoint& p) {
  if (!(p.theta >= 0.0 && p.theta <= std::numbers::pi)) {
    throw DomainError("SpherePoint: colatitude outside [0, pi]");
  }
  if (!(p.phi >= 0.0 && p.phi < 2.0 * std::numbers::pi)) {
    throw DomainError("SpherePoint: longitude outside [0, 2 pi)");
  }
}

Vec3 to_cartesian(const SpherePoint& p) {
  const double s = std::sin(p.theta);
  return {s * std::cos(p.phi), s * std::sin(p.phi), std::cos(p.theta)};
}

SpherePoint to_spherical(const Vec3& v) {
  const double r = norm(v);
  const double x = v.x / r;
  const double y = v.y / r;
  const double z = v.z / r;
  SpherePoint p;
  p.theta = std::atan2(std::hypot(x, y), z);
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  p.phi = phi;
  return p;
}

double cos_angle(const SpherePoint& a, const SpherePoint& b) {
  // Spherical law of cosines.
  const double c = std::cos(a.theta) * std::cos(b.theta) +
                   std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
  return std::clamp(c, -1.0, 1.0);
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

double angle_between(const SpherePoint& a, const SpherePoint& b) {
  return angle_between(to_cartesian(a), to_cartesian(b));
}

TangentFrame tangent_frame(const SpherePoint& p) {
  const double ct = std::cos(p.theta);
  const double st = std::sin(p.theta);
  const double cp = std::cos(p.phi);
  const double sp = std::sin(p.phi);
  TangentFrame f;
  f.normal = {st * cp, st * sp, ct};
  f.e_theta = {ct * cp, ct * sp, -st};
  f.e_phi = {-sp, cp, 0.0};
  return f;
}

Vec3 exp_map(const TangentFrame& frame, double v1, double v2) {
  const double r = std::hypot(v1, v2);
  if (r == 0.0) return frame.normal;
  const double c = std::cos(r);
  const double s = std::sin(r) / r;
  return {c * frame.normal.x + s * (v1 * frame.e_theta.x + v2 * frame.e_phi.x),
          c * frame.normal.y + s * (v1 * frame.e_theta.y + v2 * frame.e_phi.y),
          c * frame.normal.z + s * (v1 * frame.e_theta.z + v2 * frame.e_phi.z)};
}

SpherePoint uniform_sphere_point(double u1, double u2) {
  // z uniform in [-1, 1] gives area-uniform points.
  const double z = 1.0 - 2.0 * u1;
  return {std::acos(std::clamp(z, -1.0, 1.0)), 2.0 * std::numbers::pi * u2};
}

}  // namespace nodal
