#include "faberinv/layerpot.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "faberinv/error.hpp"
#include "faberinv/spectral.hpp"

namespace faberinv {

namespace {

constexpr double kPi = std::numbers::pi;

double dot2(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

}  // namespace

NpMatrix assemble_np(const BoundaryMesh& mesh) {
  const int n = mesh.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        k(i, i) = mesh.curvature[i] * mesh.weights[i] / (4.0 * kPi);
        continue;
      }
      const cplx d = mesh.points[i] - mesh.points[j];
      const double r2 = std::norm(d);
      if (r2 == 0.0) {
        throw Error(ErrorKind::Numerical, "assemble_np: coincident nodes " + std::to_string(i) + " and " + std::to_string(j));
      }
      k(i, j) = dot2(d, mesh.normals[i]) / r2 * mesh.weights[j] / (2.0 * kPi);
    }
  }
  return NpMatrix{std::move(k), std::make_shared<const BoundaryMesh>(mesh)};
}

Eigen::MatrixXd assemble_np_adjoint(const BoundaryMesh& mesh) {
  const int n = mesh.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        k(i, i) = mesh.curvature[i] * mesh.weights[i] / (4.0 * kPi);
        continue;
      }
      const cplx d = mesh.points[j] - mesh.points[i];
      const double r2 = std::norm(d);
      if (r2 == 0.0) throw Error(ErrorKind::Numerical, "assemble_np_adjoint: coincident nodes");
      k(i, j) = dot2(d, mesh.normals[j]) / r2 * mesh.weights[j] / (2.0 * kPi);
    }
  }
  return k;
}

Eigen::MatrixXd single_layer_trace(const BoundaryMesh& mesh) {
  const int n = mesh.size();
  const Eigen::VectorXd r = spectral::log_quadrature_weights(n);
  const double h = 2.0 * kPi / n;
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int d = ((i - j) % n + n) % n;
      double smooth;
      if (i == j) {
        smooth = std::log(mesh.speed[i]);
      } else {
        const double half = 0.5 * (mesh.theta[i] - mesh.theta[j]);
        const double s2 = 4.0 * std::sin(half) * std::sin(half);
        smooth = 0.5 * std::log(std::norm(mesh.points[i] - mesh.points[j]) / s2);
      }
      s(i, j) = (0.5 * r[d] + h * smooth) * mesh.speed[j] / (2.0 * kPi);
    }
  }
  return s;
}

Eigen::VectorXd tangential_derivative(const BoundaryMesh& mesh, const Eigen::VectorXd& values) {
  return spectral::differentiate(values).cwiseQuotient(mesh.speed);
}

DensitySolver::DensitySolver(const NpMatrix& np, double lambda)
    : mesh_(np.mesh), lambda_(lambda), bordered_(std::abs(lambda) == 0.5) {
  if (!(std::abs(lambda) >= 0.5)) {
    throw Error(ErrorKind::Contrast, "solve_density: |lambda| must be >= 1/2, got " + std::to_string(lambda));
  }
  const int n = static_cast<int>(np.kstar.rows());
  if (bordered_) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    a.topLeftCorner(n, n) = -np.kstar;
    a.topLeftCorner(n, n).diagonal().array() += lambda;
    a.block(0, n, n, 1).setOnes();
    a.block(n, 0, 1, n) = mesh_->weights.transpose();
    lu_.compute(a);
  } else {
    Eigen::MatrixXd a = -np.kstar;
    a.diagonal().array() += lambda;
    lu_.compute(a);
  }
}

void DensitySolver::check_compatible(const Eigen::VectorXd& data) const {
  if (!bordered_) return;
  const double mean = data.dot(mesh_->weights);
  const double scale = data.cwiseAbs().dot(mesh_->weights);
  if (std::abs(mean) > 1e-7 * scale) {
    std::ostringstream msg;
    msg << "solve_density: extreme contrast (lambda = " << lambda_ << ") requires data with zero mean; residual mean "
        << mean << " (relative " << mean / scale << ")";
    throw Error(ErrorKind::Compatibility, msg.str());
  }
}

Eigen::MatrixXd DensitySolver::solve_many(const Eigen::MatrixXd& data) const {
  const int n = mesh_->size();
  if (data.rows() != n) throw Error(ErrorKind::Input, "solve_density: data length does not match the mesh");
  for (Eigen::Index c = 0; c < data.cols(); ++c) check_compatible(data.col(c));
  if (!bordered_) return lu_.solve(data);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 1, data.cols());
  rhs.topRows(n) = data;
  return lu_.solve(rhs).topRows(n);
}

Density DensitySolver::solve(const Eigen::VectorXd& data) const {
  return Density{solve_many(data), mesh_, lambda_};
}

Eigen::VectorXcd DensitySolver::solve(const Eigen::VectorXcd& data) const {
  Eigen::MatrixXd parts(data.size(), 2);
  parts.col(0) = data.real();
  parts.col(1) = data.imag();
  const Eigen::MatrixXd sol = solve_many(parts);
  return sol.col(0).cast<cplx>() + cplx(0.0, 1.0) * sol.col(1).cast<cplx>();
}

Density solve_density(const NpMatrix& np, double lambda, const Eigen::VectorXd& data) {
  return DensitySolver(np, lambda).solve(data);
}

PotentialValue single_layer(const BoundaryMesh& mesh, const Eigen::VectorXd& phi, cplx z) {
  PotentialValue out;
  double nearest = std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int j = 0; j < mesh.size(); ++j) {
    const double r = std::abs(z - mesh.points[j]);
    nearest = std::min(nearest, r);
    acc += std::log(r) * phi[j] * mesh.weights[j];
  }
  out.value = acc / (2.0 * kPi);
  out.near_boundary = nearest < mesh.max_spacing();
  return out;
}

TransmissionSolver::TransmissionSolver(const BoundaryMesh& mesh, Contrast contrast)
    : mesh_(std::make_shared<const BoundaryMesh>(mesh)),
      contrast_(contrast),
      np_(assemble_np(mesh)),
      solver_(np_, contrast.lambda()),
      strace_(single_layer_trace(mesh)) {}

Eigen::VectorXd TransmissionSolver::normal_data(const Polynomial2& H) const {
  return normal_derivative(H, mesh_->points, mesh_->normals);
}

Eigen::VectorXd TransmissionSolver::tangential_data(const Polynomial2& H) const {
  return normal_derivative(H, mesh_->points, mesh_->tangents);
}

Eigen::VectorXd TransmissionSolver::density(const Polynomial2& H) const { return solver_.solve(normal_data(H)).phi; }

PotentialValue TransmissionSolver::field(const Polynomial2& H, const Eigen::VectorXd& phi, cplx z) const {
  PotentialValue v = single_layer(*mesh_, phi, z);
  v.value += H.value(z);
  return v;
}

Eigen::VectorXd TransmissionSolver::single_layer_tangential(const Eigen::VectorXd& f) const {
  return tangential_derivative(*mesh_, strace_ * f);
}

BoundaryTraces TransmissionSolver::interior_gradients(const Polynomial2& H, const Eigen::VectorXd& phi) const {
  BoundaryTraces out;
  out.normal = normal_data(H) + np_.kstar * phi - 0.5 * phi;
  out.tangential = tangential_data(H) + single_layer_tangential(phi);
  return out;
}

PotentialValue solve_exterior(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& H, cplx z) {
  const NpMatrix np = assemble_np(mesh);
  const Density phi = solve_density(np, contrast.lambda(), normal_derivative(H, mesh.points, mesh.normals));
  PotentialValue v = single_layer(mesh, phi.phi, z);
  v.value += H.value(z);
  return v;
}

BoundaryTraces boundary_gradients(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& H) {
  const TransmissionSolver solver(mesh, contrast);
  return solver.interior_gradients(H, solver.density(H));
}

MapFit fit_exterior_map(const BoundaryMesh& mesh, int order) {
  if (order < 1) throw Error(ErrorKind::Input, "fit_exterior_map: order must be >= 1");
  const int n = mesh.size();
  if (2 * order >= n) throw Error(ErrorKind::Resolution, "fit_exterior_map: order too large for the mesh size");
  const NpMatrix np = assemble_np(mesh);
  // Equilibrium density: (1/2 - K*) rho = 0 with sum rho w = 1.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = -np.kstar;
  a.topLeftCorner(n, n).diagonal().array() += 0.5;
  a.block(0, n, n, 1).setOnes();
  a.block(n, 0, 1, n) = mesh.weights.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  const Eigen::VectorXd rho = a.partialPivLu().solve(rhs).head(n);

  // Boundary correspondence theta(t) with theta' = 2 pi rho |z'|.
  const Eigen::VectorXd dtheta = 2.0 * kPi * rho.cwiseProduct(mesh.speed);
  if (dtheta.minCoeff() <= 0.0) throw Error(ErrorKind::Numerical, "fit_exterior_map: equilibrium density is not positive");
  const Eigen::VectorXd theta = mesh.theta + spectral::integrate_mean_free(dtheta.array() - 1.0);

  auto moment = [&](int k) {
    cplx acc(0.0);
    for (int j = 0; j < n; ++j) acc += mesh.points[j] * std::polar(1.0, -k * theta[j]) * dtheta[j];
    return acc / static_cast<double>(n);
  };
  const cplx lead = moment(1);
  const double gamma = std::abs(lead);
  const double shift = std::arg(lead);
  std::vector<cplx> coeffs(order + 1);
  coeffs[0] = moment(0);
  for (int m = 1; m <= order; ++m) coeffs[m] = std::pow(gamma, m) * std::polar(1.0, m * shift) * moment(-m);
  MapFit fit{ConformalMap(gamma, coeffs), 0.0, 0.0};
  for (int k = 2; k <= std::min(order, n / 4); ++k) fit.analytic_residual = std::max(fit.analytic_residual, std::abs(moment(k)) / gamma);
  fit.tail = std::abs(coeffs[order]) / std::pow(gamma, order + 1);
  return fit;
}

}  // namespace faberinv
