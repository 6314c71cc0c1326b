#include "nodal/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nodal/error.hpp"

namespace nodal {

namespace {

constexpr double kGradientPoleClamp = 1e-8;
constexpr std::size_t kSynthesisChunk = 256;
// Half of the rounded sqrt2, hence 2 * kInvSqrt2 == sqrt2 exactly.
constexpr double kInvSqrt2 = 0.5 * std::numbers::sqrt2;

}  // namespace

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Standard:
      return "standard";
    case BasisKind::PoleRotatedPair:
      return "pole-rotated-pair";
  }
  return "unknown";
}

HarmonicBasis::HarmonicBasis(int n, BasisKind kind) : degree_(n), kind_(kind), legendre_(n) {}

std::shared_ptr<const HarmonicBasis> HarmonicBasis::build(int n, BasisKind kind) {
  if (n < 1) {
    throw UnsupportedDegreeError("HarmonicBasis: degree must be >= 1, got " + std::to_string(n));
  }
  return std::shared_ptr<const HarmonicBasis>(new HarmonicBasis(n, kind));
}

void HarmonicBasis::standard_from_trig(double x, double s, double cphi, double sphi,
                                       std::span<double> out) const {
  const int n = degree_;
  std::vector<double> leg(static_cast<std::size_t>(n) + 1);
  legendre_.evaluate(x, s, leg);
  out[index(0)] = leg[0];
  double ck = 1.0;
  double sk = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double c = ck * cphi - sk * sphi;
    sk = sk * cphi + ck * sphi;
    ck = c;
    const double a = std::numbers::sqrt2 * leg[k];
    out[index(k)] = a * ck;
    out[index(-k)] = a * sk;
  }
}

void HarmonicBasis::apply_kind(std::span<double> out) const {
  if (kind_ == BasisKind::PoleRotatedPair) {
    const double y0 = out[index(0)];
    const double y1 = out[index(1)];
    out[index(0)] = (y0 + y1) * kInvSqrt2;
    out[index(1)] = (y0 - y1) * kInvSqrt2;
  }
}

std::vector<double> HarmonicBasis::pole_weights() const {
  std::vector<double> out(size(), 0.0);
  out[index(0)] = 1.0;
  apply_kind(out);
  return out;
}

void HarmonicBasis::eval_into(const SpherePoint& p, std::span<double> out) const {
  if (out.size() != size()) throw DimensionError("HarmonicBasis::eval_into: wrong output size");
  standard_from_trig(std::cos(p.theta), std::sin(p.theta), std::cos(p.phi), std::sin(p.phi), out);
  apply_kind(out);
}

void HarmonicBasis::eval_into(const Vec3& p, std::span<double> out) const {
  if (out.size() != size()) throw DimensionError("HarmonicBasis::eval_into: wrong output size");
  const double r = norm(p);
  const double x = p.x / r;
  const double y = p.y / r;
  const double s = std::hypot(x, y);
  const double cphi = s > 0.0 ? x / s : 1.0;
  const double sphi = s > 0.0 ? y / s : 0.0;
  standard_from_trig(std::clamp(p.z / r, -1.0, 1.0), s, cphi, sphi, out);
  apply_kind(out);
}

std::vector<double> HarmonicBasis::eval(const SpherePoint& p) const {
  std::vector<double> out(size());
  eval_into(p, out);
  return out;
}

BasisGradient HarmonicBasis::eval_with_gradient(const SpherePoint& p) const {
  const int n = degree_;
  const double theta = std::clamp(p.theta, kGradientPoleClamp, std::numbers::pi - kGradientPoleClamp);
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> leg(static_cast<std::size_t>(n) + 1);
  std::vector<double> dleg(static_cast<std::size_t>(n) + 1);
  legendre_.evaluate_with_derivative(x, s, leg, dleg);

  BasisGradient g;
  g.values.assign(size(), 0.0);
  g.d_theta.assign(size(), 0.0);
  g.d_phi.assign(size(), 0.0);
  g.values[index(0)] = leg[0];
  g.d_theta[index(0)] = dleg[0];
  for (int k = 1; k <= n; ++k) {
    const double ck = std::cos(k * p.phi);
    const double sk = std::sin(k * p.phi);
    const double a = std::numbers::sqrt2 * leg[k];
    const double da = std::numbers::sqrt2 * dleg[k];
    g.values[index(k)] = a * ck;
    g.values[index(-k)] = a * sk;
    g.d_theta[index(k)] = da * ck;
    g.d_theta[index(-k)] = da * sk;
    g.d_phi[index(k)] = -k * a * sk / s;
    g.d_phi[index(-k)] = k * a * ck / s;
  }
  apply_kind(g.values);
  apply_kind(g.d_theta);
  apply_kind(g.d_phi);
  return g;
}

std::vector<double> HarmonicBasis::to_standard(std::span<const double> coeffs) const {
  if (coeffs.size() != size()) throw DimensionError("HarmonicBasis::to_standard: wrong coefficient count");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  if (kind_ == BasisKind::PoleRotatedPair) {
    // sum a_k Ytilde_k = ((a0 + a1)/sqrt2) Y_0 + ((a0 - a1)/sqrt2) Y_1 + ...
    const double a0 = coeffs[index(0)];
    const double a1 = coeffs[index(1)];
    out[index(0)] = (a0 + a1) * kInvSqrt2;
    out[index(1)] = (a0 - a1) * kInvSqrt2;
  }
  return out;
}

void HarmonicBasis::synthesize(std::span<const double> c, std::span<const Vec3> points,
                               std::span<double> out) const {
  if (c.size() != size()) throw DimensionError("HarmonicBasis::synthesize: wrong coefficient count");
  if (out.size() != points.size()) throw DimensionError("HarmonicBasis::synthesize: output size mismatch");
  synthesize_rows(c.data(), 0, points, out);
}

void HarmonicBasis::synthesize_each(std::span<const double> coeff_rows, std::span<const Vec3> points,
                                    std::span<double> out) const {
  if (coeff_rows.size() != size() * points.size()) {
    throw DimensionError("HarmonicBasis::synthesize_each: wrong coefficient count");
  }
  if (out.size() != points.size()) throw DimensionError("HarmonicBasis::synthesize_each: output size mismatch");
  synthesize_rows(coeff_rows.data(), size(), points, out);
}

void HarmonicBasis::synthesize_rows(const double* coeffs, std::size_t coeff_stride, std::span<const Vec3> points,
                                    std::span<double> out) const {
  const int n = degree_;
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  std::vector<double> xs, ss, cphi, sphi, leg;
  for (std::size_t begin = 0; begin < points.size(); begin += kSynthesisChunk) {
    const std::size_t count = std::min(kSynthesisChunk, points.size() - begin);
    xs.resize(count);
    ss.resize(count);
    cphi.resize(count);
    sphi.resize(count);
    leg.resize(count * stride);
    for (std::size_t i = 0; i < count; ++i) {
      const Vec3& p = points[begin + i];
      const double r = norm(p);
      const double s = std::hypot(p.x, p.y) / r;
      xs[i] = std::clamp(p.z / r, -1.0, 1.0);
      ss[i] = s;
      cphi[i] = s > 0.0 ? p.x / (r * s) : 1.0;
      sphi[i] = s > 0.0 ? p.y / (r * s) : 0.0;
    }
    legendre_.evaluate_many(xs, ss, leg);
    for (std::size_t i = 0; i < count; ++i) {
      const double* row = leg.data() + i * stride;
      const double* c = coeffs + (begin + i) * coeff_stride + static_cast<std::size_t>(n);
      double acc = c[0] * row[0];
      double ck = 1.0;
      double sk = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double t = ck * cphi[i] - sk * sphi[i];
        sk = sk * cphi[i] + ck * sphi[i];
        ck = t;
        acc += std::numbers::sqrt2 * row[k] * (c[k] * ck + c[-k] * sk);
      }
      out[begin + i] = acc;
    }
  }
}

double two_point(int n, double theta_angle) {
  if (!(theta_angle >= 0.0 && theta_angle <= std::numbers::pi)) {
    throw DomainError("two_point: angle outside [0, pi]");
  }
  return specfn::legendre_p(n, std::clamp(std::cos(theta_angle), -1.0, 1.0));
}

}  // namespace nodal
