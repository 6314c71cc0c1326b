#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodal/basis.hpp"
#include "nodal/rng.hpp"
#include "nodal/sphere.hpp"

namespace nodal {

enum class DistributionKind { Gaussian, Rademacher, Uniform, TwoPointAsymmetric };

/// Mean-zero, unit-variance coefficient law.
///
/// The two-point asymmetric law with parameter p takes sqrt((1-p)/p) with
/// probability p and -sqrt(p/(1-p)) otherwise.
class CoefficientDistribution {
 public:
  static CoefficientDistribution gaussian();
  static CoefficientDistribution rademacher();
  static CoefficientDistribution uniform();
  static CoefficientDistribution two_point_asymmetric(double p);

  /// Accepts "gaussian", "rademacher", "uniform", "two-point:<p>".
  static CoefficientDistribution parse(std::string_view text);

  DistributionKind kind() const { return kind_; }
  double parameter() const { return p_; }

  /// Canonical name; parse(name()) round-trips.
  std::string name() const;

  double draw(rng::CounterStream& stream) const;

  friend bool operator==(const CoefficientDistribution&, const CoefficientDistribution&) = default;

 private:
  CoefficientDistribution(DistributionKind kind, double p) : kind_(kind), p_(p) {}

  DistributionKind kind_;
  double p_;
};

/// 2n+1 i.i.d. draws. Coefficient k comes from its own counter stream keyed
/// by (seed, k), so the vector does not depend on generation order.
std::vector<double> sample_coefficients(const CoefficientDistribution& dist, int n, std::uint64_t seed);

/// f_n = c_n sum_k a_k Y_k with c_n = (2n+1)^{-1/2}. Immutable.
class RandomField {
 public:
  RandomField(std::shared_ptr<const HarmonicBasis> basis, std::vector<double> coeffs);

  int degree() const { return basis_->degree(); }
  double normalizer() const { return normalizer_; }
  const HarmonicBasis& basis() const { return *basis_; }
  const std::shared_ptr<const HarmonicBasis>& basis_ptr() const { return basis_; }
  std::span<const double> coefficients() const { return coeffs_; }

  /// c_n times the coefficients expressed in the standard basis.
  std::span<const double> standard_coefficients() const { return scaled_standard_; }

  double value(const SpherePoint& p) const;
  double value(const Vec3& p) const;

  struct ValueGradient {
    double value;
    double d_theta;
    double d_phi;
  };
  ValueGradient value_and_gradient(const SpherePoint& p) const;

  void values(std::span<const Vec3> points, std::span<double> out) const;

 private:
  std::shared_ptr<const HarmonicBasis> basis_;
  std::vector<double> coeffs_;
  std::vector<double> scaled_standard_;
  double normalizer_;
};

/// Throws DimensionError unless coeffs.size() == 2n+1 and basis has degree n.
RandomField build_field(int n, std::shared_ptr<const HarmonicBasis> basis, std::vector<double> coeffs);

/// Largest admissible R/n for a patch. Patches are evaluated out to |y| = 2,
/// i.e. geodesic radius 2R/n <= 1, well inside the injectivity radius pi.
inline constexpr double kInjectivityMargin = 0.5;

/// Local patch F_x(y) = f(exp_x(R y / n)).
class PatchSpec {
 public:
  /// Throws ConfigurationError if R <= 0 or R/n >= kInjectivityMargin.
  PatchSpec(const SpherePoint& center, double scale, int degree);

  const SpherePoint& center() const { return center_; }
  double scale() const { return scale_; }
  int degree() const { return degree_; }

  /// exp_x(R y / n). Throws DomainError for |y| > 2.
  Vec3 map(double y1, double y2) const;

 private:
  SpherePoint center_;
  double scale_;
  int degree_;
  TangentFrame frame_;
};

double eval_patch(const RandomField& field, const PatchSpec& spec, double y1, double y2);

}  // namespace nodal
