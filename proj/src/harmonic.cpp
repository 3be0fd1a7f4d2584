#include "faberinv/harmonic.hpp"

#include <cmath>

#include "faberinv/error.hpp"

namespace faberinv {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Integer power that is exact for small exponents and handles 0^0 = 1.
double ipow(double x, int p) {
  double r = 1.0;
  for (int j = 0; j < p; ++j) r *= x;
  return r;
}

}  // namespace

std::vector<MultiIndex> multi_indices(int order) {
  std::vector<MultiIndex> out;
  for (int k = 1; k <= order; ++k)
    for (int a2 = 0; a2 <= k; ++a2) out.push_back({k - a2, a2});
  return out;
}

Polynomial2 Polynomial2::constant(double c) {
  Polynomial2 p;
  p.add({0, 0}, c);
  return p;
}

Polynomial2 Polynomial2::monomial(MultiIndex alpha, double c) {
  if (alpha.a1 < 0 || alpha.a2 < 0) throw Error(ErrorKind::Input, "monomial: negative exponent");
  Polynomial2 p;
  p.add(alpha, c);
  return p;
}

Polynomial2 Polynomial2::re_power(int m) {
  // z^m = sum_j C(m,j) x1^{m-j} (i x2)^j; even j contribute to the real part.
  Polynomial2 p;
  for (int j = 0; j <= m; j += 2) p.add({m - j, j}, binomial(m, j) * ((j / 2) % 2 == 0 ? 1.0 : -1.0));
  return p;
}

Polynomial2 Polynomial2::im_power(int m) {
  Polynomial2 p;
  for (int j = 1; j <= m; j += 2) p.add({m - j, j}, binomial(m, j) * (((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0));
  return p;
}

void Polynomial2::add(MultiIndex alpha, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial2::coeff(MultiIndex alpha) const {
  const auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial2::degree() const {
  int d = 0;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.order());
  return d;
}

double Polynomial2::value(cplx z) const {
  double acc = 0.0;
  for (const auto& [alpha, c] : terms_) acc += c * ipow(z.real(), alpha.a1) * ipow(z.imag(), alpha.a2);
  return acc;
}

cplx Polynomial2::gradient(cplx z) const {
  double gx = 0.0;
  double gy = 0.0;
  for (const auto& [alpha, c] : terms_) {
    if (alpha.a1 > 0) gx += c * alpha.a1 * ipow(z.real(), alpha.a1 - 1) * ipow(z.imag(), alpha.a2);
    if (alpha.a2 > 0) gy += c * alpha.a2 * ipow(z.real(), alpha.a1) * ipow(z.imag(), alpha.a2 - 1);
  }
  return {gx, gy};
}

Polynomial2 Polynomial2::laplacian() const {
  Polynomial2 out;
  for (const auto& [alpha, c] : terms_) {
    if (alpha.a1 >= 2) out.add({alpha.a1 - 2, alpha.a2}, c * alpha.a1 * (alpha.a1 - 1));
    if (alpha.a2 >= 2) out.add({alpha.a1, alpha.a2 - 2}, c * alpha.a2 * (alpha.a2 - 1));
  }
  return out;
}

bool Polynomial2::is_harmonic(double tol) const {
  double scale = 0.0;
  for (const auto& [alpha, c] : terms_) scale = std::max(scale, std::abs(c));
  for (const auto& [alpha, c] : laplacian().terms()) {
    if (std::abs(c) > tol * std::max(scale, 1.0)) return false;
  }
  return true;
}

std::vector<cplx> Polynomial2::analytic_coefficients() const {
  const int deg = degree();
  std::vector<cplx> out(deg + 1, cplx(0.0));
  // Homogeneous harmonic part of degree m is Re(c_m z^m): the x1^m coefficient
  // is Re c_m and the x1^{m-1} x2 coefficient is -m Im c_m.
  for (int m = 1; m <= deg; ++m) out[m] = cplx(coeff({m, 0}), -coeff({m - 1, 1}) / m);
  return out;
}

Polynomial2 Polynomial2::operator+(const Polynomial2& other) const {
  Polynomial2 out = *this;
  for (const auto& [alpha, c] : other.terms_) out.add(alpha, c);
  return out;
}

Polynomial2 Polynomial2::operator*(double s) const {
  Polynomial2 out;
  for (const auto& [alpha, c] : terms_) out.add(alpha, c * s);
  return out;
}

Eigen::VectorXd values(const Polynomial2& p, const Eigen::VectorXcd& z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) out[j] = p.value(z[j]);
  return out;
}

Eigen::VectorXd normal_derivative(const Polynomial2& p, const Eigen::VectorXcd& z, const Eigen::VectorXcd& normals) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const cplx g = p.gradient(z[j]);
    out[j] = g.real() * normals[j].real() + g.imag() * normals[j].imag();
  }
  return out;
}

}  // namespace faberinv
