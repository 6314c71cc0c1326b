#pragma once

#include <numbers>
#include <span>
#include <vector>

// Special functions used throughout the library: Legendre polynomials, fully
// normalized associated Legendre functions of a fixed degree, Bessel J0/J1 in
// the standard convention, and the residual of the Hilb-type Bessel
// approximation of P_n(cos theta).
//
// Everything here is a pure function (or an immutable table) and is safe to
// call concurrently.
namespace nodal::specfn {

/// First positive zero of J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695772768621631879;

/// P_n(x) by the three-term recurrence. Throws DomainError if |x| > 1 or n < 0.
double legendre_p(int n, double x);

/// Fills out[l] = P_l(x) for l = 0..n; out.size() must be n + 1.
void legendre_p_all(int n, double x, std::span<double> out);

/// Fully normalized associated Legendre function of degree n and order k.
///
/// Normalization: N_n^k = sqrt((2n+1)(n-k)!/(n+k)!) (1-x^2)^{k/2} d^k P_n/dx^k,
/// i.e. orthonormal against dx/2 on [-1, 1]. With this choice the real basis
/// Y_0 = N_n^0, Y_{+-k} = sqrt(2) N_n^k {cos, sin}(k phi) satisfies
/// sum_k Y_k^2 = 2n+1 pointwise. No Condon-Shortley phase.
double assoc_legendre_norm(int n, int k, double x);

/// Recurrence coefficients for N_n^k, k = 0..n, at one fixed degree n.
///
/// Evaluating all orders at an abscissa costs O(n^2) floating point operations
/// with no factorials; values stay finite for n well beyond 200 (they may
/// underflow to zero close to the poles, where the true values are below
/// 1e-300).
class AssocLegendreTable {
 public:
  explicit AssocLegendreTable(int degree);

  int degree() const { return degree_; }

  /// out[k] = N_n^k(x) for k = 0..n, where x = cos(theta), s = sin(theta) >= 0.
  void evaluate(double x, double s, std::span<double> out) const;

  /// Same as evaluate() plus dtheta[k] = d/dtheta N_n^k(cos theta).
  void evaluate_with_derivative(double x, double s, std::span<double> values,
                                std::span<double> dtheta) const;

  /// Batched evaluation for many abscissae. out is row-major, one row of
  /// n + 1 orders per abscissa. Independent recurrences run side by side,
  /// which is much faster than repeated evaluate() calls.
  void evaluate_many(std::span<const double> x, std::span<const double> s,
                     std::span<double> out) const;

 private:
  int degree_;
  std::vector<double> sectoral_;  // sqrt((2m+1)/(2m)), m >= 1
  std::vector<double> first_;     // sqrt(2m+3)
  std::vector<double> alpha_;     // packed (l, m), l >= m + 2
  std::vector<double> beta_;
  std::vector<double> raise_;     // sqrt((n-m)(n+m+1)) for d/dtheta
};

/// Bessel function of the first kind of order 0, standard convention
/// J0(t) = (1/pi) int_0^pi cos(t sin phi) dphi. Absolute error below 1e-12
/// for 0 <= t <= 1e3. Negative t is accepted (J0 is even).
double bessel_j0(double t);

/// Bessel function of the first kind of order 1 (odd in t).
double bessel_j1(double t);

enum class HilbPrefactor {
  Linear,      // theta / sin(theta)
  SquareRoot,  // (theta / sin(theta))^{1/2}
};

/// Selected by the residual-envelope sweep in tests/unit/test_specfn.cpp.
inline constexpr HilbPrefactor kDefaultHilbPrefactor = HilbPrefactor::SquareRoot;

double hilb_prefactor(HilbPrefactor kind, double theta);

/// F = P_n(cos theta) - pref(theta) J0((n + 1/2) theta) for 0 < theta <= pi/2.
double hilb_residual(int n, double theta, HilbPrefactor kind = kDefaultHilbPrefactor);

struct GaussLegendreRule {
  std::vector<double> nodes;    // ascending in (-1, 1)
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `order` nodes; exact for polynomials of degree
/// 2 * order - 1.
GaussLegendreRule gauss_legendre(int order);

}  // namespace nodal::specfn
