#include "nodal/specfn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nodal/error.hpp"

namespace nodal::specfn {

namespace {

void check_abscissa(double x, const char* where) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw DomainError(std::string(where) + ": abscissa outside [-1, 1]");
  }
}

// Power series, used for |t| < 8 where the largest term stays below ~120.
double j0_series(double t) {
  const double q = -0.25 * t * t;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double j1_series(double t) {
  const double q = -0.25 * t * t;
  double term = 0.5 * t;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Trapezoidal rule on Bessel's integral over a full period. The error is
// 2 * J_{64}(t) for order 0 (J_{63}, J_{65} for order 1), below 1e-17 for t < 25.
constexpr int kTrapezoidNodes = 64;

double trapezoid_bessel(int order, double t) {
  double sum = 0.0;
  for (int j = 0; j < kTrapezoidNodes; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / kTrapezoidNodes;
    sum += std::cos(order * phi - t * std::sin(phi));
  }
  return sum / kTrapezoidNodes;
}

// Hankel expansion J_nu(t) = sqrt(2/(pi t)) (P cos chi - Q sin chi), t >= 25.
// Terms are summed until they stop shrinking; the smallest term is ~e^{-2t}.
double hankel_bessel(int order, double t) {
  const double mu = 4.0 * order * order;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * t);
    const double mag = std::abs(term);
    if (mag > last || mag < 1e-18) break;
    last = mag;
    // a_k / t^k enters P (k even) or Q (k odd) with sign (-1)^{floor(k/2)}.
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 0) {
      p += signed_term;
    } else {
      q += signed_term;
    }
  }
  const double chi = t - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * t)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double legendre_p(int n, double x) {
  if (n < 0) throw DomainError("legendre_p: negative degree");
  check_abscissa(x, "legendre_p");
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int l = 1; l < n; ++l) {
    const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_p_all(int n, double x, std::span<double> out) {
  if (n < 0) throw DomainError("legendre_p_all: negative degree");
  check_abscissa(x, "legendre_p_all");
  if (out.size() != static_cast<std::size_t>(n) + 1) {
    throw DimensionError("legendre_p_all: output must hold n + 1 values");
  }
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = x;
  for (int l = 1; l < n; ++l) {
    out[l + 1] = ((2.0 * l + 1.0) * x * out[l] - l * out[l - 1]) / (l + 1.0);
  }
}

AssocLegendreTable::AssocLegendreTable(int degree) : degree_(degree) {
  if (degree < 0) throw DomainError("AssocLegendreTable: negative degree");
  const int n = degree;
  sectoral_.assign(n + 1, 0.0);
  first_.assign(n + 1, 0.0);
  raise_.assign(n + 1, 0.0);
  for (int m = 0; m <= n; ++m) {
    if (m > 0) sectoral_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    first_[m] = std::sqrt(2.0 * m + 3.0);
    raise_[m] = std::sqrt(static_cast<double>(n - m) * (n + m + 1.0));
  }
  for (int m = 0; m <= n; ++m) {
    for (int l = m + 2; l <= n; ++l) {
      const double ll = static_cast<double>(l) * l;
      const double mm = static_cast<double>(m) * m;
      alpha_.push_back(std::sqrt((4.0 * ll - 1.0) / (ll - mm)));
      const double lm1 = static_cast<double>(l - 1);
      beta_.push_back(std::sqrt((2.0 * l + 1.0) * (lm1 * lm1 - mm) / ((2.0 * l - 3.0) * (ll - mm))));
    }
  }
}

void AssocLegendreTable::evaluate(double x, double s, std::span<double> out) const {
  const int n = degree_;
  if (out.size() != static_cast<std::size_t>(n) + 1) {
    throw DimensionError("AssocLegendreTable::evaluate: output must hold n + 1 values");
  }
  double pmm = 1.0;
  std::size_t cursor = 0;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) pmm *= sectoral_[m] * s;
    if (m == n) {
      out[m] = pmm;
      break;
    }
    double p1 = first_[m] * x * pmm;
    double p2 = pmm;
    const int steps = n - m - 1;
    const double* a = alpha_.data() + cursor;
    const double* b = beta_.data() + cursor;
    for (int j = 0; j < steps; ++j) {
      const double p = a[j] * x * p1 - b[j] * p2;
      p2 = p1;
      p1 = p;
    }
    cursor += static_cast<std::size_t>(steps);
    out[m] = p1;
  }
}

void AssocLegendreTable::evaluate_with_derivative(double x, double s, std::span<double> values,
                                                  std::span<double> dtheta) const {
  const int n = degree_;
  evaluate(x, s, values);
  if (dtheta.size() != values.size()) {
    throw DimensionError("AssocLegendreTable: derivative buffer size mismatch");
  }
  if (n == 0) {
    dtheta[0] = 0.0;
    return;
  }
  dtheta[0] = -raise_[0] * values[1];
  for (int m = 1; m <= n; ++m) {
    const double up = (m < n) ? raise_[m] * values[m + 1] : 0.0;
    dtheta[m] = 0.5 * (raise_[m - 1] * values[m - 1] - up);
  }
}

void AssocLegendreTable::evaluate_many(std::span<const double> x, std::span<const double> s,
                                       std::span<double> out) const {
  const int n = degree_;
  const std::size_t count = x.size();
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  if (s.size() != count || out.size() != count * stride) {
    throw DimensionError("AssocLegendreTable::evaluate_many: buffer size mismatch");
  }
  std::vector<double> pmm(count, 1.0);
  std::vector<double> p1(count);
  std::vector<double> p2(count);
  std::size_t cursor = 0;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) {
      const double c = sectoral_[m];
      for (std::size_t i = 0; i < count; ++i) pmm[i] *= c * s[i];
    }
    if (m == n) {
      for (std::size_t i = 0; i < count; ++i) out[i * stride + m] = pmm[i];
      break;
    }
    const double f = first_[m];
    for (std::size_t i = 0; i < count; ++i) {
      p1[i] = f * x[i] * pmm[i];
      p2[i] = pmm[i];
    }
    const int steps = n - m - 1;
    for (int j = 0; j < steps; ++j) {
      const double a = alpha_[cursor + j];
      const double b = beta_[cursor + j];
      for (std::size_t i = 0; i < count; ++i) {
        const double p = a * x[i] * p1[i] - b * p2[i];
        p2[i] = p1[i];
        p1[i] = p;
      }
    }
    cursor += static_cast<std::size_t>(steps);
    for (std::size_t i = 0; i < count; ++i) out[i * stride + m] = p1[i];
  }
}

double assoc_legendre_norm(int n, int k, double x) {
  if (n < 0 || k < 0) throw DomainError("assoc_legendre_norm: negative degree or order");
  if (k > n) throw DomainError("assoc_legendre_norm: order exceeds degree");
  check_abscissa(x, "assoc_legendre_norm");
  AssocLegendreTable table(n);
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  table.evaluate(x, std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x))), values);
  return values[k];
}

double bessel_j0(double t) {
  const double a = std::abs(t);
  if (a < 8.0) return j0_series(a);
  if (a < 25.0) return trapezoid_bessel(0, a);
  return hankel_bessel(0, a);
}

double bessel_j1(double t) {
  const double a = std::abs(t);
  double v;
  if (a < 8.0) {
    v = j1_series(a);
  } else if (a < 25.0) {
    v = trapezoid_bessel(1, a);
  } else {
    v = hankel_bessel(1, a);
  }
  return t < 0.0 ? -v : v;
}

double hilb_prefactor(HilbPrefactor kind, double theta) {
  const double ratio = theta == 0.0 ? 1.0 : theta / std::sin(theta);
  return kind == HilbPrefactor::Linear ? ratio : std::sqrt(ratio);
}

double hilb_residual(int n, double theta, HilbPrefactor kind) {
  if (!(theta > 0.0 && theta <= 0.5 * std::numbers::pi)) {
    throw DomainError("hilb_residual: theta outside (0, pi/2]");
  }
  if (n < 0) throw DomainError("hilb_residual: negative degree");
  return legendre_p(n, std::cos(theta)) - hilb_prefactor(kind, theta) * bessel_j0((n + 0.5) * theta);
}

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int l = 1; l < order; ++l) {
        const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
        p0 = p1;
        p1 = p2;
      }
      derivative = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[order - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace nodal::specfn
