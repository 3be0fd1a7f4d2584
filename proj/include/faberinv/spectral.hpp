#pragma once

// Periodic (trapezoidal-grid) helpers shared by the mesh, layer-potential and
// remeshing code. All grids are t_j = 2*pi*j/n on [0, 2*pi), n even.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace faberinv::spectral {

using cplx = std::complex<double>;

/// Trigonometric coefficients c_k, k = -n/2 .. n/2, of the interpolant of
/// `values`. The Nyquist mode is split evenly between +-n/2. Index k maps to
/// slot k + n/2 of the returned vector (length n + 1).
std::vector<cplx> trig_coefficients(const Eigen::VectorXcd& values);

/// Dense spectral differentiation matrix d/dt on an even periodic grid.
Eigen::MatrixXd differentiation_matrix(int n);

/// Applies d/dt to periodic samples (O(n^2), no matrix stored).
Eigen::VectorXd differentiate(const Eigen::VectorXd& values);

/// Periodic antiderivative of samples whose mean is zero, normalized so the
/// result vanishes at t_0. The mean is removed before integrating.
Eigen::VectorXd integrate_mean_free(const Eigen::VectorXd& values);

/// Circulant weights R_d, d = 0..n-1, of the logarithmic quadrature rule
///   int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds ~= sum_j R_{(i-j) mod n} f(t_j).
Eigen::VectorXd log_quadrature_weights(int n);

}  // namespace faberinv::spectral
