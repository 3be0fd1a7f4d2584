#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "faberinv/conformal.hpp"
#include "faberinv/layerpot.hpp"
#include "faberinv/mesh.hpp"

namespace testing {

using faberinv::cplx;

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

/// Entrywise relative error with an absolute floor at `floor_frac` times the largest reference entry.
inline double max_rel_err(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want, double floor_frac = 1e-12) {
  const double floor = floor_frac * want.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < want.rows(); ++i) {
    for (Eigen::Index j = 0; j < want.cols(); ++j) {
      worst = std::max(worst, std::abs(got(i, j) - want(i, j)) / std::max(std::abs(want(i, j)), floor));
    }
  }
  return worst;
}

/// A fixed order-4 map with all coefficients non-zero.
inline faberinv::ConformalMap order4_map() {
  return faberinv::ConformalMap(1.0, {cplx(0.2, 0.1), cplx(0.3, 0.0), cplx(0.0, 0.1), cplx(0.05, 0.02), cplx(0.01, -0.02)});
}

/// Conformal map of a parametric curve, fitted on a fine mesh.
inline faberinv::ConformalMap fitted_map(faberinv::ShapeKind kind, int order = 40, int n = 1024) {
  return faberinv::fit_exterior_map(faberinv::mesh_from_parametric(kind, {}, n), order).map;
}

/// Laurent coefficient of w^p of f on the circle |w| = r by the trapezoidal rule.
template <class F>
cplx laurent_coeff(F&& f, int p, double r, int samples = 512) {
  cplx acc(0.0);
  for (int j = 0; j < samples; ++j) {
    const double t = 2.0 * M_PI * j / samples;
    acc += f(std::polar(r, t)) * std::polar(1.0, -p * t);
  }
  return acc / static_cast<double>(samples) / std::pow(r, p);
}

/// Mesh of the curve x + eps h nu, with h given per node, through the trigonometric interpolant of the moved nodes.
inline faberinv::BoundaryMesh displaced_mesh(const faberinv::BoundaryMesh& mesh, const Eigen::VectorXd& h, double eps) {
  Eigen::VectorXcd moved(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) moved[j] = mesh.points[j] + eps * h[j] * mesh.normals[j];
  return faberinv::mesh_from_curve(faberinv::FourierCurve::interpolate(moved).as_curve("displaced"), mesh.size());
}

/// Smooth random normal velocity sum_{k <= modes} (a_k cos k t + b_k sin k t) / (1 + k^2), a_k, b_k in [-1, 1].
template <class Rng>
Eigen::VectorXd random_velocity(const faberinv::BoundaryMesh& mesh, Rng& rng, int modes = 4) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(modes + 1);
  std::vector<double> b(modes + 1);
  for (int k = 0; k <= modes; ++k) {
    a[k] = u(rng);
    b[k] = u(rng);
  }
  Eigen::VectorXd h(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    const double t = mesh.theta[j];
    double v = 0.0;
    for (int k = 0; k <= modes; ++k) v += (a[k] * std::cos(k * t) + b[k] * std::sin(k * t)) / (1.0 + k * k);
    h[j] = v;
  }
  return h;
}

/// Least-squares slope of log(err) against log(eps).
inline double fitted_order(const std::vector<double>& eps, const std::vector<double>& err) {
  const int n = static_cast<int>(eps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing
