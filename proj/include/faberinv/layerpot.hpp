#pragma once

// Nystrom discretization of the single-layer potential S and the
// Neumann-Poincare operator K* on a smooth periodic mesh, and the density
// equation (lambda I - K*) phi = nu . grad H of the transmission problem.

#include <memory>

#include <Eigen/Dense>

#include "faberinv/conformal.hpp"
#include "faberinv/contrast.hpp"
#include "faberinv/harmonic.hpp"
#include "faberinv/mesh.hpp"

namespace faberinv {

/// Dense K* with entries (1/2pi) <x_i - x_j, nu_i> / |x_i - x_j|^2 w_j and
/// diagonal kappa_i w_i / (4 pi).
struct NpMatrix {
  Eigen::MatrixXd kstar;
  std::shared_ptr<const BoundaryMesh> mesh;
};

NpMatrix assemble_np(const BoundaryMesh& mesh);

/// The L2 adjoint K (double-layer boundary operator) with the same diagonal limit.
Eigen::MatrixXd assemble_np_adjoint(const BoundaryMesh& mesh);

/// Boundary trace of S, using the logarithmic product rule for the kernel singularity.
Eigen::MatrixXd single_layer_trace(const BoundaryMesh& mesh);

/// d/dT of periodic boundary samples: Fourier derivative divided by the speed.
Eigen::VectorXd tangential_derivative(const BoundaryMesh& mesh, const Eigen::VectorXd& values);

struct Density {
  Eigen::VectorXd phi;
  std::shared_ptr<const BoundaryMesh> mesh;
  double lambda = 0.0;
};

/// Factorized (lambda I - K*). At |lambda| = 1/2 the system is bordered with the
/// constraint sum_j phi_j w_j = 0 and a Lagrange multiplier, and right-hand sides
/// must have zero weighted mean.
class DensitySolver {
 public:
  DensitySolver(const NpMatrix& np, double lambda);

  double lambda() const noexcept { return lambda_; }
  const BoundaryMesh& mesh() const noexcept { return *mesh_; }

  Density solve(const Eigen::VectorXd& data) const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& data) const;
  /// Column-wise solve.
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& data) const;

 private:
  void check_compatible(const Eigen::VectorXd& data) const;

  std::shared_ptr<const BoundaryMesh> mesh_;
  double lambda_;
  bool bordered_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Density solve_density(const NpMatrix& np, double lambda, const Eigen::VectorXd& data);

struct PotentialValue {
  double value = 0.0;
  /// Set when the point lies within one mesh spacing of the boundary.
  bool near_boundary = false;
};

/// S[phi](z) = (1/2pi) sum_j ln|z - x_j| phi_j w_j.
PotentialValue single_layer(const BoundaryMesh& mesh, const Eigen::VectorXd& phi, cplx z);

/// Interior-side normal and tangential derivatives at each node.
struct BoundaryTraces {
  Eigen::VectorXd normal;
  Eigen::VectorXd tangential;
};

/// Bundles the operators needed for repeated transmission solves on one mesh.
class TransmissionSolver {
 public:
  TransmissionSolver(const BoundaryMesh& mesh, Contrast contrast);

  const BoundaryMesh& mesh() const noexcept { return *mesh_; }
  const Contrast& contrast() const noexcept { return contrast_; }
  const NpMatrix& np() const noexcept { return np_; }
  const DensitySolver& solver() const noexcept { return solver_; }

  Eigen::VectorXd density(const Polynomial2& H) const;
  /// Data nu . grad H, and tangential T . grad H.
  Eigen::VectorXd normal_data(const Polynomial2& H) const;
  Eigen::VectorXd tangential_data(const Polynomial2& H) const;

  /// u(z) = H(z) + S[phi](z).
  PotentialValue field(const Polynomial2& H, const Eigen::VectorXd& phi, cplx z) const;

  /// du/dnu|- = dH/dnu + (-1/2 + K*) phi and du/dT|- = dH/dT + d/dT S[phi].
  BoundaryTraces interior_gradients(const Polynomial2& H, const Eigen::VectorXd& phi) const;

  /// d/dT of the boundary trace of S[f].
  Eigen::VectorXd single_layer_tangential(const Eigen::VectorXd& f) const;

 private:
  std::shared_ptr<const BoundaryMesh> mesh_;
  Contrast contrast_;
  NpMatrix np_;
  DensitySolver solver_;
  Eigen::MatrixXd strace_;
};

/// u(z) for the transmission problem with background H.
PotentialValue solve_exterior(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& H, cplx z);

BoundaryTraces boundary_gradients(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& H);

/// Exterior conformal map of a meshed curve, truncated at `order`. The
/// equilibrium density (kernel of 1/2 - K*) gives the boundary correspondence,
/// and the Laurent coefficients come from Fourier integrals in that variable.
struct MapFit {
  ConformalMap map;
  /// Largest |Fourier mode| of positive index >= 2 relative to gamma; should be ~0.
  double analytic_residual = 0.0;
  /// |a_order| / gamma^{order+1}, a proxy for the truncation error.
  double tail = 0.0;
};

MapFit fit_exterior_map(const BoundaryMesh& mesh, int order);

}  // namespace faberinv
