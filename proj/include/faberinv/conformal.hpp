#pragma once

// Exterior conformal maps Psi(w) = w + a_0 + a_1/w + ... + a_N/w^N defined on
// |w| > gamma, with their Faber polynomials and Grunsky coefficients.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace faberinv {

using cplx = std::complex<double>;

class ConformalMap {
 public:
  ConformalMap() = default;
  /// `coeffs` holds a_0, a_1, ..., a_N. Throws Input if gamma <= 0 or a value is not finite.
  ConformalMap(double gamma, std::vector<cplx> coeffs);

  static ConformalMap identity(double gamma = 1.0) { return ConformalMap(gamma, {}); }

  double gamma() const noexcept { return gamma_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  /// Truncation order N (highest negative power); 0 for a pure translation.
  int order() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  /// a_n, zero beyond the stored range.
  cplx coeff(int n) const noexcept {
    return (n >= 0 && n < static_cast<int>(coeffs_.size())) ? coeffs_[n] : cplx(0.0);
  }

  cplx operator()(cplx w) const;
  cplx derivative(cplx w) const;
  cplx second_derivative(cplx w) const;

  /// Maps of translated, rotated and dilated images: z -> shift + scale * e^{i angle} z.
  ConformalMap transformed(cplx shift, double angle, double scale = 1.0) const;

 private:
  double gamma_ = 1.0;
  std::vector<cplx> coeffs_;
};

/// Evaluates Psi(w); throws Domain if |w| < gamma.
cplx evaluate_map(const ConformalMap& map, cplx w);

/// Monic Faber polynomials F_m(z) = sum_n a_{mn} z^n, m = 0..M.
class FaberBasis {
 public:
  FaberBasis() = default;
  explicit FaberBasis(std::vector<std::vector<cplx>> rows) : rows_(std::move(rows)) {}

  int order() const noexcept { return static_cast<int>(rows_.size()) - 1; }
  /// a_{mn}, zero outside 0 <= n <= m.
  cplx coeff(int m, int n) const {
    return (n >= 0 && n <= m) ? rows_.at(m)[n] : cplx(0.0);
  }
  const std::vector<cplx>& row(int m) const { return rows_.at(m); }

  cplx evaluate(int m, cplx z) const;
  cplx derivative(int m, cplx z) const;

 private:
  std::vector<std::vector<cplx>> rows_;
};

/// Generates F_0..F_M by F_{n+1} = z F_n - n a_n - sum_{s=0}^{n} a_s F_{n-s}.
FaberBasis faber_coefficients(const ConformalMap& map, int order);

/// Coefficients c_{mk} (m = 1..rows, k = 1..cols) of w^{-k} in F_m(Psi(w)).
class GrunskyMatrix {
 public:
  GrunskyMatrix() = default;
  GrunskyMatrix(Eigen::MatrixXcd c, double gamma) : c_(std::move(c)), gamma_(gamma) {}

  int rows() const noexcept { return static_cast<int>(c_.rows()); }
  int cols() const noexcept { return static_cast<int>(c_.cols()); }
  /// 1-based access c_{mk}.
  cplx operator()(int m, int k) const { return c_(m - 1, k - 1); }
  const Eigen::MatrixXcd& matrix() const noexcept { return c_; }
  double gamma() const noexcept { return gamma_; }

 private:
  Eigen::MatrixXcd c_;
  double gamma_ = 1.0;
};

/// Square Grunsky matrix of order N by truncated Laurent composition of the
/// Faber recursion. `internal_order` is the most negative power kept by the
/// series arithmetic; it defaults to 2N + 1 and must be at least 2N - 1,
/// otherwise a Resolution error is raised.
GrunskyMatrix grunsky_matrix(const ConformalMap& map, int order,
                             std::optional<int> internal_order = std::nullopt);

/// Rectangular variant: rows m = 1..rows, columns k = 1..cols.
GrunskyMatrix grunsky_block(const ConformalMap& map, int rows, int cols,
                            std::optional<int> internal_order = std::nullopt);

}  // namespace faberinv
