#include "faberinv/optim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "faberinv/error.hpp"

namespace faberinv {

namespace {

void require_order(const GptTable& target, int order) {
  if (order < 1) throw Error(ErrorKind::Input, "optim: order K must be >= 1");
  if (target.order < order) {
    throw Error(ErrorKind::Input, "optim: target table order " + std::to_string(target.order) + " is below K = " + std::to_string(order));
  }
}

void require_finite_contrast(const Contrast& contrast) {
  if (contrast.extreme()) {
    throw Error(ErrorKind::Contrast, "optim: the shape derivative needs 0 < sigma0 < inf (got lambda = " +
                                         std::to_string(contrast.lambda()) + ")");
  }
}

Eigen::MatrixXd basis_values(const std::vector<Polynomial2>& basis, const BoundaryMesh& mesh) {
  Eigen::MatrixXd v(mesh.size(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) v.col(j) = values(basis[j], mesh.points);
  return v;
}

Eigen::MatrixXd basis_directional(const std::vector<Polynomial2>& basis, const BoundaryMesh& mesh, const Eigen::VectorXcd& dir) {
  Eigen::MatrixXd v(mesh.size(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) v.col(j) = normal_derivative(basis[j], mesh.points, dir);
  return v;
}

Eigen::MatrixXd differentiate_columns(const BoundaryMesh& mesh, const Eigen::MatrixXd& f) {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c) out.col(c) = tangential_derivative(mesh, f.col(c));
  return out;
}

struct Traces {
  Eigen::MatrixXd normal;
  Eigen::MatrixXd tangential;
};

// Dual traces for every column of the basis at once.
Traces dual_traces(const BoundaryMesh& mesh, const Contrast& contrast, const std::vector<Polynomial2>& basis,
                   const Eigen::MatrixXd& strace) {
  require_finite_contrast(contrast);
  const int n = mesh.size();
  const Eigen::MatrixXd k = assemble_np_adjoint(mesh);
  Eigen::MatrixXd a = -k;
  a.diagonal().array() += contrast.lambda();
  const Eigen::MatrixXd f = basis_values(basis, mesh);
  const Eigen::MatrixXd psi = a.partialPivLu().solve(f);
  // v- = F + (1/2 + K) psi
  const Eigen::MatrixXd inner = f + 0.5 * psi + k * psi;
  Traces t;
  t.tangential = differentiate_columns(mesh, inner);
  // dv/dnu = dF/dnu + d/dT S[d psi/dT]; the normal derivative of D[psi] has no jump.
  t.normal = basis_directional(basis, mesh, mesh.normals) + differentiate_columns(mesh, strace * differentiate_columns(mesh, psi));
  (void)n;
  return t;
}

double cost_from(const Eigen::MatrixXd& current, const Eigen::MatrixXd& target) {
  return 0.5 * (current - target).squaredNorm();
}

double relative_decrease(const std::vector<double>& h, int window) {
  const int s = static_cast<int>(h.size());
  if (s <= window) return 1.0;
  const double old = h[s - 1 - window];
  if (old == 0.0) return 0.0;
  return (old - h.back()) / old;
}

}  // namespace

std::vector<PolynomialPair> polynomial_pairs(int order) {
  const std::vector<Polynomial2> basis = pairing_basis(order);
  std::vector<PolynomialPair> out;
  for (const auto& h : basis)
    for (const auto& f : basis) out.push_back({h, f});
  return out;
}

Eigen::MatrixXd pairing_matrix(const BoundaryMesh& mesh, const Contrast& contrast, int order) {
  const std::vector<Polynomial2> basis = pairing_basis(order);
  const DensitySolver solver(assemble_np(mesh), contrast.lambda());
  const Eigen::MatrixXd phi = solver.solve_many(basis_directional(basis, mesh, mesh.normals));
  const Eigen::MatrixXd v = basis_values(basis, mesh);
  return v.transpose() * mesh.weights.asDiagonal() * phi;
}

double cost(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order) {
  require_order(target, order);
  return cost_from(pairing_matrix(mesh, contrast, order), pairing_from_contracted(target, order));
}

BoundaryTraces dual_solve(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& F) {
  const Traces t = dual_traces(mesh, contrast, {F}, single_layer_trace(mesh));
  return BoundaryTraces{t.normal.col(0), t.tangential.col(0)};
}

ShapeGradient shape_gradient(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order) {
  require_order(target, order);
  require_finite_contrast(contrast);
  const std::vector<Polynomial2> basis = pairing_basis(order);
  const int nb = static_cast<int>(basis.size());
  const int n = mesh.size();
  const double s0 = contrast.sigma0();

  const TransmissionSolver solver(mesh, contrast);
  const Eigen::MatrixXd data = basis_directional(basis, mesh, mesh.normals);
  const Eigen::MatrixXd phi = solver.solver().solve_many(data);
  const Eigen::MatrixXd strace = single_layer_trace(mesh);
  // Primal interior traces, one column per source H.
  const Eigen::MatrixXd un = data + solver.np().kstar * phi - 0.5 * phi;
  const Eigen::MatrixXd ut = basis_directional(basis, mesh, mesh.tangents) + differentiate_columns(mesh, strace * phi);
  const Traces v = dual_traces(mesh, contrast, basis, strace);

  const Eigen::MatrixXd current = basis_values(basis, mesh).transpose() * mesh.weights.asDiagonal() * phi;
  const Eigen::MatrixXd goal = pairing_from_contracted(target, order);

  ShapeGradient g;
  g.cost = cost_from(current, goal);
  g.phi.resize(n, nb * nb);
  g.delta.resize(nb * nb);
  g.gradient = Eigen::VectorXd::Zero(n);
  for (int h = 0; h < nb; ++h) {
    for (int f = 0; f < nb; ++f) {
      const int p = h * nb + f;
      g.phi.col(p) = (s0 - 1.0) * (v.normal.col(f).cwiseProduct(un.col(h)) + v.tangential.col(f).cwiseProduct(ut.col(h)) / s0);
      g.delta[p] = current(f, h) - goal(f, h);
      g.gradient += g.delta[p] * g.phi.col(p);
    }
  }

  const Eigen::VectorXd sw = mesh.weights.cwiseSqrt();
  const Eigen::MatrixXd scaled = sw.asDiagonal() * g.phi;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  while (rank < sv.size() && smax > 0.0 && sv[rank] > 1e-10 * smax) ++rank;
  g.rank = rank;
  g.basis = sw.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(rank);
  return g;
}

ReconState initial_state(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order) {
  ReconState s;
  s.mesh = mesh;
  s.cost_history.push_back(cost(mesh, contrast, target, order));
  return s;
}

ReconState descent_step(const ReconState& state, const ShapeGradient& gradient, const Contrast& contrast,
                        const GptTable& target, int order, const DescentOptions& options) {
  if (!gradient.gradient.allFinite()) throw Error(ErrorKind::Numerical, "descent_step: gradient is not finite");
  ReconState next = state;
  next.iteration = state.iteration + 1;
  next.rank = gradient.rank;
  next.flags.clear();
  const BoundaryMesh& mesh = state.mesh;
  const double j0 = gradient.cost;

  // Coefficients of g in the orthonormal basis; their span contains g up to the dropped directions.
  const Eigen::VectorXd c = gradient.basis.transpose() * mesh.weights.asDiagonal() * gradient.gradient;
  const double c2 = c.squaredNorm();
  if (j0 <= options.cost_floor || c2 == 0.0 || gradient.rank == 0) {
    next.converged = true;
    next.flags.push_back("converged");
    next.cost_history.push_back(j0);
    next.step_history.push_back(0.0);
    return next;
  }
  Eigen::VectorXd h = -(j0 / c2) * (gradient.basis * c);
  const double diameter = mesh.diameter();
  const double hmax = h.cwiseAbs().maxCoeff();
  if (hmax > options.max_displacement * diameter) {
    h *= options.max_displacement * diameter / hmax;
    next.flags.push_back("capped");
  }
  const int n = mesh.size();
  const int cutoff = options.remesh_cutoff > 0 ? options.remesh_cutoff : n / 4;

  double t = 1.0;
  for (int halving = 0; halving <= options.max_halvings; ++halving, t *= 0.5) {
    const double step = t * h.cwiseAbs().maxCoeff();
    if (step < 1e-12 * diameter) break;
    Eigen::VectorXcd moved(n);
    for (int j = 0; j < n; ++j) moved[j] = mesh.points[j] + t * h[j] * mesh.normals[j];
    BoundaryMesh trial;
    try {
      const FourierCurve curve = FourierCurve::interpolate(moved, cutoff);
      trial = remesh_arclength(*curve.as_curve("descent"), n, cutoff);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Geometry && e.kind() != ErrorKind::Numerical) throw;
      continue;
    }
    double j1;
    try {
      j1 = cost(trial, contrast, target, order);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numerical) throw;
      continue;
    }
    if (std::isfinite(j1) && j1 < j0) {
      next.mesh = std::move(trial);
      next.cost_history.push_back(j1);
      next.step_history.push_back(step);
      if (halving > 0) next.flags.push_back("backtracked:" + std::to_string(halving));
      return next;
    }
  }
  next.stuck = true;
  next.flags.push_back("stuck");
  next.cost_history.push_back(j0);
  next.step_history.push_back(0.0);
  return next;
}

InitKind parse_init_kind(const std::string& name) {
  if (name == "ellipse") return InitKind::Ellipse;
  if (name == "reference") return InitKind::Reference;
  throw Error(ErrorKind::Input, "unknown initializer '" + name + "' (expected ellipse or reference)");
}

std::string to_string(InitKind kind) { return kind == InitKind::Ellipse ? "ellipse" : "reference"; }

ConformalMap initial_map(const GptTable& target, const Contrast& contrast, int order, InitKind init,
                         std::optional<RecoveredMap>* reference, std::optional<EquivalentEllipse>* ellipse) {
  const double s0 = contrast.sigma0();
  std::optional<EquivalentEllipse> e;
  auto ellipse_map = [&]() {
    if (!e) e = equivalent_ellipse(target, s0);
    if (ellipse) *ellipse = e;
    return e->as_map();
  };
  if (init == InitKind::Ellipse) return ellipse_map();
  RecoveredMap r = reference_shape(target, s0, order);
  if (reference) *reference = r;
  if (r.simple) return r.map;
  if (r.fallback) {
    e = r.fallback;
    return ellipse_map();
  }
  throw Error(ErrorKind::Geometry, "initial_map: reference shape is not a simple curve and no fallback is available");
}

ReconResult descend(const BoundaryMesh& start, const GptTable& target, const Contrast& contrast, int order,
                    const ReconOptions& options) {
  require_order(target, order);
  require_finite_contrast(contrast);
  ReconResult out;
  out.state = initial_state(start, contrast, target, order);
  out.state.step_history.push_back(0.0);
  out.log.push_back({0, out.state.cost_history.back(), 0.0, 0, {"init"}});
  for (int it = 0; it < options.max_iter; ++it) {
    const ShapeGradient g = shape_gradient(out.state.mesh, contrast, target, order);
    out.state = descent_step(out.state, g, contrast, target, order, options.descent);
    out.log.push_back({out.state.iteration, out.state.cost_history.back(), out.state.step_history.back(), out.state.rank,
                       out.state.flags});
    if (out.state.converged || out.state.stuck) break;
    if (relative_decrease(out.state.cost_history, options.stagnation_window) < options.stagnation_tol) {
      out.state.converged = true;
      out.log.back().flags.push_back("stagnated");
      break;
    }
  }
  return out;
}

ReconResult reconstruct(const GptTable& target, const Contrast& contrast, int order, InitKind init, const ReconOptions& options) {
  require_order(target, order);
  require_finite_contrast(contrast);
  std::optional<RecoveredMap> ref;
  std::optional<EquivalentEllipse> ell;
  const ConformalMap map = initial_map(target, contrast, order, init, &ref, &ell);
  ReconResult out = descend(mesh_from_map(map, options.mesh_n), target, contrast, order, options);
  out.init_map = map;
  out.reference = ref;
  out.ellipse = ell;
  return out;
}

}  // namespace faberinv
