#pragma once

// Shape recovery from contracted GPTs: the exact extreme-conductivity
// recursion for the exterior conformal map, and the equivalent-ellipse and
// reference-shape initial guesses for the descent.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "faberinv/conformal.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/mesh.hpp"

namespace faberinv {

struct EquivalentEllipse {
  double a = 0.0;      // semi-major axis
  double b = 0.0;      // semi-minor axis
  double theta = 0.0;  // direction of the major axis, in (-pi/2, pi/2]
  cplx center{0.0, 0.0};
  double p = 0.0;
  /// Axis ratio b/a in (0, 1].
  double q = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::Vector2d e1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d e2 = Eigen::Vector2d::Zero();

  /// Psi(w) = w + center + a_1 / w with gamma = (a + b) / 2.
  ConformalMap as_map() const;
};

struct RecoveredMap {
  ConformalMap map;
  /// +1 for lambda = 1/2 (perfect conductor), -1 for lambda = -1/2.
  int sign = 1;
  /// |a_m| for orders beyond N that the data would still support (dropped tail).
  std::vector<double> tail;
  /// |F2_{m1}| / |N2_11| for m = 2..N; zero for exact extreme data.
  std::vector<double> consistency;
  /// |lambda(sigma0) - sign/2| when the data were not extreme.
  double contrast_mismatch = 0.0;
  bool simple = true;
  std::optional<Crossing> crossing;
  /// Set by reference_shape when the recovered curve is not simple.
  std::optional<EquivalentEllipse> fallback;
};

/// Exact recovery of gamma, a_0..a_N from contracted GPTs. `sign` selects the
/// extreme branch; by default it is taken from table.lambda, which must then
/// be +-1/2. Throws DataInconsistency if sign * N2_11 <= 0.
RecoveredMap exact_recover(const GptTable& table, int order, std::optional<int> sign = std::nullopt);

/// Recovery from FPTs at lambda = +-1/2: gamma from F2_11 and a_m = F1_{m1} / (4 pi m).
/// FPTs are translation invariant, so a_0 must be supplied.
RecoveredMap recover_from_fpt(const FptMatrices& fpts, int order, int sign, cplx a0 = {});

/// Equivalent ellipse of the first-order block, centred by the a_0 formula
/// evaluated on the given (non-extreme) data.
EquivalentEllipse equivalent_ellipse(const Eigen::Matrix2d& m, double sigma0, cplx center = {});
EquivalentEllipse equivalent_ellipse(const GptTable& table, double sigma0);

/// exact_recover on non-extreme data with sign = sign(sigma0 - 1).
RecoveredMap reference_shape(const GptTable& table, double sigma0, int order);

/// Multiplies every stored tensor entry by (1 + noise * U), U uniform on [-1, 1],
/// independently per entry and reproducibly from `seed`.
GptTable perturb_table(const GptTable& table, double noise, std::uint64_t seed);

}  // namespace faberinv
