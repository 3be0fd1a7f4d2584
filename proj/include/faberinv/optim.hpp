#pragma once

// GPT-matching shape descent: the cost J_K over pairs of harmonic polynomials,
// its shape derivative through the primal and dual transmission problems, and
// a safeguarded normal-velocity descent with arclength remeshing.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faberinv/contrast.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/harmonic.hpp"
#include "faberinv/inversion.hpp"
#include "faberinv/layerpot.hpp"
#include "faberinv/mesh.hpp"

namespace faberinv {

/// A pair (H, F) of harmonic polynomials; the pairing value is
/// sum a_alpha b_beta M_{alpha beta} = int F (lambda I - K*)^{-1}[dH/dnu].
struct PolynomialPair {
  Polynomial2 H;
  Polynomial2 F;
};

/// All ordered pairs from `pairing_basis(K)`, H-major.
std::vector<PolynomialPair> polynomial_pairs(int order);

/// Pairing matrix P(f, g) = int f (lambda I - K*)^{-1}[dg/dnu] over the pairing basis.
Eigen::MatrixXd pairing_matrix(const BoundaryMesh& mesh, const Contrast& contrast, int order);

/// J_K = 1/2 sum over pairs of (P_D - P_B)^2 with P_B taken from the target's contracted GPTs.
double cost(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order);

/// Interior traces of the dual problem sigma0 v+ = v-, dv/dnu+ = dv/dnu-, v - F -> 0,
/// represented as v = F + D[psi] with psi = (lambda I - K)^{-1}[F].
/// Throws Contrast for sigma0 in {0, inf}.
BoundaryTraces dual_solve(const BoundaryMesh& mesh, const Contrast& contrast, const Polynomial2& F);

struct ShapeGradient {
  /// g = sum_HF delta_HF phi_HF per node; d J = int g h dsigma for x -> x + h nu.
  Eigen::VectorXd gradient;
  /// phi_HF columns in `polynomial_pairs` order.
  Eigen::MatrixXd phi;
  Eigen::VectorXd delta;
  /// Boundary-orthonormal basis of span{phi_HF} (columns) and its rank.
  Eigen::MatrixXd basis;
  int rank = 0;
  double cost = 0.0;
};

ShapeGradient shape_gradient(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order);

struct DescentOptions {
  int max_halvings = 20;
  /// Cap on the largest node displacement of a trial step, relative to the diameter.
  double max_displacement = 0.1;
  /// Fourier modes kept when remeshing; 0 means n / 4.
  int remesh_cutoff = 0;
  /// J below this is treated as an exact match.
  double cost_floor = 1e-14;
};

struct ReconState {
  int iteration = 0;
  BoundaryMesh mesh;
  std::vector<double> cost_history;
  /// Accepted step length (max node displacement) per iteration; 0 for rejected steps.
  std::vector<double> step_history;
  int rank = 0;
  bool converged = false;
  bool stuck = false;
  std::vector<std::string> flags;
};

/// Initial state with cost evaluated on `mesh`.
ReconState initial_state(const BoundaryMesh& mesh, const Contrast& contrast, const GptTable& target, int order);

/// One update x -> x - (J / |Pg|^2) P g nu with backtracking, followed by remeshing.
ReconState descent_step(const ReconState& state, const ShapeGradient& gradient, const Contrast& contrast,
                        const GptTable& target, int order, const DescentOptions& options = {});

enum class InitKind { Ellipse, Reference };

InitKind parse_init_kind(const std::string& name);
std::string to_string(InitKind kind);

struct ReconOptions {
  int max_iter = 50;
  int mesh_n = 256;
  /// Stop when the relative decrease over `stagnation_window` steps is below this.
  double stagnation_tol = 1e-10;
  int stagnation_window = 5;
  DescentOptions descent;
};

struct LogRecord {
  int iter = 0;
  double cost = 0.0;
  double step = 0.0;
  int rank = 0;
  std::vector<std::string> flags;
};

struct ReconResult {
  ReconState state;
  ConformalMap init_map;
  std::optional<RecoveredMap> reference;
  std::optional<EquivalentEllipse> ellipse;
  std::vector<LogRecord> log;
};

/// The initial boundary for the given initializer; throws Geometry when no valid curve can be formed.
ConformalMap initial_map(const GptTable& target, const Contrast& contrast, int order, InitKind init,
                         std::optional<RecoveredMap>* reference = nullptr, std::optional<EquivalentEllipse>* ellipse = nullptr);

ReconResult reconstruct(const GptTable& target, const Contrast& contrast, int order, InitKind init,
                        const ReconOptions& options = {});

/// Descent from a given mesh (used by `reconstruct` and by stationarity checks).
ReconResult descend(const BoundaryMesh& start, const GptTable& target, const Contrast& contrast, int order,
                    const ReconOptions& options = {});

}  // namespace faberinv
