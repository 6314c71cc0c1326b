#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nodal/specfn.hpp"
#include "nodal/sphere.hpp"

namespace nodal {

enum class BasisKind {
  Standard,         // Y_0 = N_n^0, Y_{+k} = sqrt2 N_n^k cos(k phi), Y_{-k} = sqrt2 N_n^k sin(k phi)
  PoleRotatedPair,  // Standard with Y_0, Y_1 replaced by (Y_0 +- Y_1) / sqrt2
};

const char* to_string(BasisKind kind);

struct BasisGradient {
  std::vector<double> values;
  std::vector<double> d_theta;  // e_theta component of the gradient
  std::vector<double> d_phi;    // e_phi component, i.e. (1 / sin theta) d/dphi
};

/// Real orthonormal basis of degree-n spherical harmonics with respect to the
/// uniform probability measure on the sphere. Entries are indexed k + n for
/// k = -n..n. Immutable after construction; share it across fields and threads.
class HarmonicBasis {
 public:
  /// Throws UnsupportedDegreeError for n < 1.
  static std::shared_ptr<const HarmonicBasis> build(int n, BasisKind kind = BasisKind::Standard);

  int degree() const { return degree_; }
  BasisKind kind() const { return kind_; }
  std::size_t size() const { return 2 * static_cast<std::size_t>(degree_) + 1; }
  std::size_t index(int k) const { return static_cast<std::size_t>(k + degree_); }

  std::vector<double> eval(const SpherePoint& p) const;
  void eval_into(const SpherePoint& p, std::span<double> out) const;
  void eval_into(const Vec3& p, std::span<double> out) const;

  /// Values and orthonormal-frame gradients. Colatitude is clamped to
  /// [1e-8, pi - 1e-8] so the e_phi component stays finite at the poles.
  BasisGradient eval_with_gradient(const SpherePoint& p) const;

  /// Maps coefficients with respect to this basis to coefficients with
  /// respect to the standard basis of the same degree (an orthogonal map).
  std::vector<double> to_standard(std::span<const double> coeffs) const;

  /// out[i] = sum_k c_k Y^std_k(points[i]) for standard-basis coefficients c.
  void synthesize(std::span<const double> standard_coeffs, std::span<const Vec3> points,
                  std::span<double> out) const;

  /// out[i] = sum_k c_{i,k} Y^std_k(points[i]); coeff_rows is row-major with
  /// one row of standard-basis coefficients per point.
  void synthesize_each(std::span<const double> coeff_rows, std::span<const Vec3> points,
                       std::span<double> out) const;

  /// Rewrites standard-basis values (Y^std_k(p))_k in place into the values
  /// of this basis at the same point.
  void convert_standard_values(std::span<double> values) const { apply_kind(values); }

  /// Y_k(north pole) / sqrt(2n+1). Exact: e_0 for the standard basis and
  /// (1/sqrt2, 1/sqrt2) on the rotated pair.
  std::vector<double> pole_weights() const;

  const specfn::AssocLegendreTable& legendre() const { return legendre_; }

 private:
  HarmonicBasis(int n, BasisKind kind);

  void standard_from_trig(double x, double s, double cphi, double sphi, std::span<double> out) const;
  void apply_kind(std::span<double> out) const;
  void synthesize_rows(const double* coeffs, std::size_t coeff_stride, std::span<const Vec3> points,
                       std::span<double> out) const;

  int degree_;
  BasisKind kind_;
  specfn::AssocLegendreTable legendre_;
};

/// Normalized two-point function (2n+1)^{-1} sum_k Y_k(x) Y_k(y) = P_n(cos angle).
double two_point(int n, double theta_angle);

}  // namespace nodal
