#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace faberinv {

using cplx = std::complex<double>;

/// Multi-index (alpha_1, alpha_2) for x^alpha = x1^alpha_1 x2^alpha_2.
struct MultiIndex {
  int a1 = 0;
  int a2 = 0;
  int order() const noexcept { return a1 + a2; }
  auto operator<=>(const MultiIndex&) const = default;
};

/// All multi-indices with 1 <= |alpha| <= order, sorted by order then by a2.
std::vector<MultiIndex> multi_indices(int order);

/// Real polynomial sum_alpha c_alpha x^alpha in two variables.
class Polynomial2 {
 public:
  Polynomial2() = default;

  static Polynomial2 constant(double c);
  static Polynomial2 monomial(MultiIndex alpha, double c = 1.0);
  /// Re(z^m) and Im(z^m).
  static Polynomial2 re_power(int m);
  static Polynomial2 im_power(int m);

  void add(MultiIndex alpha, double c);
  double coeff(MultiIndex alpha) const;
  const std::map<MultiIndex, double>& terms() const noexcept { return terms_; }
  int degree() const;

  double value(cplx z) const;
  /// grad = d/dx1 + i d/dx2 packed as a complex number.
  cplx gradient(cplx z) const;
  /// Coefficients of the Laplacian; empty iff the polynomial is harmonic.
  Polynomial2 laplacian() const;
  bool is_harmonic(double tol = 1e-12) const;

  /// Complex coefficients c_m with P = Re(sum_m c_m z^m) + P(0). Valid for harmonic P.
  std::vector<cplx> analytic_coefficients() const;

  Polynomial2 operator+(const Polynomial2& other) const;
  Polynomial2 operator*(double s) const;

 private:
  std::map<MultiIndex, double> terms_;
};

/// Pointwise evaluation helpers on node sets.
Eigen::VectorXd values(const Polynomial2& p, const Eigen::VectorXcd& z);
/// nu . grad P at each node; `normals` are complex unit vectors.
Eigen::VectorXd normal_derivative(const Polynomial2& p, const Eigen::VectorXcd& z, const Eigen::VectorXcd& normals);

}  // namespace faberinv
