#include "nodal/ensemble.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "nodal/error.hpp"

namespace nodal {

CoefficientDistribution CoefficientDistribution::gaussian() { return {DistributionKind::Gaussian, 0.0}; }
CoefficientDistribution CoefficientDistribution::rademacher() { return {DistributionKind::Rademacher, 0.0}; }
CoefficientDistribution CoefficientDistribution::uniform() { return {DistributionKind::Uniform, 0.0}; }

CoefficientDistribution CoefficientDistribution::two_point_asymmetric(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigurationError("two-point law needs 0 < p < 1");
  return {DistributionKind::TwoPointAsymmetric, p};
}

CoefficientDistribution CoefficientDistribution::parse(std::string_view text) {
  if (text == "gaussian") return gaussian();
  if (text == "rademacher") return rademacher();
  if (text == "uniform") return uniform();
  constexpr std::string_view prefix = "two-point:";
  if (text.starts_with(prefix)) {
    const std::string value(text.substr(prefix.size()));
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw ConfigurationError("bad two-point parameter: " + value);
    }
    return two_point_asymmetric(p);
  }
  throw ConfigurationError("unknown coefficient distribution: " + std::string(text));
}

std::string CoefficientDistribution::name() const {
  switch (kind_) {
    case DistributionKind::Gaussian:
      return "gaussian";
    case DistributionKind::Rademacher:
      return "rademacher";
    case DistributionKind::Uniform:
      return "uniform";
    case DistributionKind::TwoPointAsymmetric: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p_);
      (void)ec;
      return "two-point:" + std::string(buf, end);
    }
  }
  return "unknown";
}

double CoefficientDistribution::draw(rng::CounterStream& stream) const {
  switch (kind_) {
    case DistributionKind::Gaussian:
      return stream.normal();
    case DistributionKind::Rademacher:
      return (stream.next_u64() >> 63) ? 1.0 : -1.0;
    case DistributionKind::Uniform:
      return std::numbers::sqrt3 * (2.0 * stream.uniform() - 1.0);
    case DistributionKind::TwoPointAsymmetric:
      return stream.uniform() < p_ ? std::sqrt((1.0 - p_) / p_) : -std::sqrt(p_ / (1.0 - p_));
  }
  return 0.0;
}

std::vector<double> sample_coefficients(const CoefficientDistribution& dist, int n, std::uint64_t seed) {
  if (n < 0) throw UnsupportedDegreeError("sample_coefficients: negative degree");
  std::vector<double> out(2 * static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    rng::CounterStream stream(rng::combine(seed, k));
    out[k] = dist.draw(stream);
  }
  return out;
}

RandomField::RandomField(std::shared_ptr<const HarmonicBasis> basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw DimensionError("RandomField: null basis");
  if (coeffs_.size() != basis_->size()) {
    throw DimensionError("RandomField: expected " + std::to_string(basis_->size()) + " coefficients, got " +
                         std::to_string(coeffs_.size()));
  }
  normalizer_ = 1.0 / std::sqrt(static_cast<double>(basis_->size()));
  scaled_standard_ = basis_->to_standard(coeffs_);
  for (double& c : scaled_standard_) c *= normalizer_;
}

double RandomField::value(const SpherePoint& p) const { return value(to_cartesian(p)); }

double RandomField::value(const Vec3& p) const {
  double out = 0.0;
  basis_->synthesize(scaled_standard_, std::span<const Vec3>(&p, 1), std::span<double>(&out, 1));
  return out;
}

RandomField::ValueGradient RandomField::value_and_gradient(const SpherePoint& p) const {
  // The gradient is taken in the basis's own frame; coefficients must stay in
  // the basis in which the gradients are expressed.
  const BasisGradient g = basis_->eval_with_gradient(p);
  ValueGradient out{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    out.value += coeffs_[k] * g.values[k];
    out.d_theta += coeffs_[k] * g.d_theta[k];
    out.d_phi += coeffs_[k] * g.d_phi[k];
  }
  out.value *= normalizer_;
  out.d_theta *= normalizer_;
  out.d_phi *= normalizer_;
  return out;
}

void RandomField::values(std::span<const Vec3> points, std::span<double> out) const {
  basis_->synthesize(scaled_standard_, points, out);
}

RandomField build_field(int n, std::shared_ptr<const HarmonicBasis> basis, std::vector<double> coeffs) {
  if (!basis || basis->degree() != n) throw DimensionError("build_field: basis degree does not match n");
  return RandomField(std::move(basis), std::move(coeffs));
}

PatchSpec::PatchSpec(const SpherePoint& center, double scale, int degree)
    : center_(center), scale_(scale), degree_(degree), frame_(tangent_frame(center)) {
  validate(center);
  if (degree < 1) throw ConfigurationError("PatchSpec: degree must be >= 1");
  if (!(scale > 0.0)) throw ConfigurationError("PatchSpec: R must be positive");
  if (!(scale / degree < kInjectivityMargin)) {
    throw ConfigurationError("PatchSpec: R/n = " + std::to_string(scale / degree) +
                             " violates the injectivity margin " + std::to_string(kInjectivityMargin));
  }
}

Vec3 PatchSpec::map(double y1, double y2) const {
  if (std::hypot(y1, y2) > 2.0 + 1e-12) throw DomainError("eval_patch: |y| > 2");
  const double k = scale_ / degree_;
  return exp_map(frame_, k * y1, k * y2);
}

double eval_patch(const RandomField& field, const PatchSpec& spec, double y1, double y2) {
  if (field.degree() != spec.degree()) throw ConfigurationError("eval_patch: field and patch degree differ");
  return field.value(spec.map(y1, y2));
}

}  // namespace nodal
