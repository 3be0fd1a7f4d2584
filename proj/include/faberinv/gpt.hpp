#pragma once

// Generalized polarization tensors (real and complex contracted), Faber
// polynomial polarization tensors by quadrature and by the Grunsky closed
// form, and the multipole / geometric field expansions built from them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "faberinv/conformal.hpp"
#include "faberinv/contrast.hpp"
#include "faberinv/harmonic.hpp"
#include "faberinv/mesh.hpp"

namespace faberinv {

/// M_{alpha beta} = int y^alpha (lambda I - K*)^{-1}[nu . grad y^beta] dsigma.
double compute_gpt(const BoundaryMesh& mesh, const Contrast& contrast, MultiIndex alpha, MultiIndex beta);

/// (N1_{mk}, N2_{mk}) with test function z^k and source data d(z^m)/dnu and d(conj z^m)/dnu.
std::pair<cplx, cplx> compute_contracted(const BoundaryMesh& mesh, const Contrast& contrast, int m, int k);

struct GptTable {
  double lambda = 0.5;
  std::optional<double> sigma0;
  int order = 0;
  /// N1(m-1, k-1) = N1_{mk}; likewise N2.
  Eigen::MatrixXcd N1;
  Eigen::MatrixXcd N2;
  /// Real GPTs over `indices` (row = alpha, column = beta); NaN where the
  /// density equation has no solution (non-harmonic source at |lambda| = 1/2).
  std::vector<MultiIndex> indices;
  Eigen::MatrixXd M;
  /// Radius of the smallest origin-centred disk containing the inclusion mesh.
  double radius = 0.0;

  cplx n1(int m, int k) const { return N1(m - 1, k - 1); }
  cplx n2(int m, int k) const { return N2(m - 1, k - 1); }
  /// M_{alpha beta}; throws Input when the entry is not stored.
  double m(MultiIndex alpha, MultiIndex beta) const;
  bool has_real() const noexcept { return M.size() > 0; }
  /// First-order block [[M_(1,0)(1,0), M_(1,0)(0,1)], [M_(0,1)(1,0), M_(0,1)(0,1)]],
  /// taken from M when present and otherwise from N1_11 and N2_11.
  Eigen::Matrix2d first_order() const;
};

/// Forward computation of a full table of order K on a mesh.
GptTable compute_gpt_table(const BoundaryMesh& mesh, const Contrast& contrast, int order, bool with_real = true);

/// Harmonic test/source basis Re z^1, Im z^1, ..., Re z^K, Im z^K.
std::vector<Polynomial2> pairing_basis(int order);

/// Real pairing values Q(f, g) = int f (lambda I - K*)^{-1}[dg/dnu] for
/// f, g in {Re z^m, Im z^m}; see `pairing_basis`. Derived from N1 and N2.
Eigen::MatrixXd pairing_from_contracted(const GptTable& table, int order);

struct FptMatrices {
  enum class Provenance { Quadrature, Grunsky };
  int order = 0;
  Eigen::MatrixXcd F1;  // F1(m-1, k-1) = F^{(1)}_{mk}
  Eigen::MatrixXcd F2;
  Provenance provenance = Provenance::Quadrature;
  /// Leading block size used by the Grunsky path (0 for quadrature).
  int truncation = 0;

  cplx f1(int m, int k) const { return F1(m - 1, k - 1); }
  cplx f2(int m, int k) const { return F2(m - 1, k - 1); }
};

FptMatrices compute_fpt_quadrature(const BoundaryMesh& mesh, const ConformalMap& map, const Contrast& contrast, int order);

/// FPTs assembled from contracted GPTs: F1 = A N1 A^T and F2 = conj(A) N2 A^T
/// with A the Faber coefficient table a_{mn}, m, n >= 1.
FptMatrices fpt_from_contracted(const GptTable& table, const FaberBasis& basis, int order);

struct GrunskyFptOptions {
  /// Initial leading block; 0 means 2N.
  int initial_truncation = 0;
  int truncation_step = 4;
  double stability_tol = 1e-6;
  int max_truncation = 200;
};

/// Closed form in terms of the Grunsky matrix, evaluated on an N' x N' block
/// with the symmetric scaling C~ = gamma^{-N} C gamma^{-N}; N' grows until the
/// requested block is stable under N' -> N' + step.
FptMatrices compute_fpt_grunsky(const ConformalMap& map, const Contrast& contrast, int order,
                                const GrunskyFptOptions& options = {});

/// H = sum_m alpha_m F_m + beta_m conj(F_m) (+ constant) over a Faber basis.
struct HarmonicExpansion {
  std::vector<cplx> alpha;  // index m - 1
  std::vector<cplx> beta;
  double constant = 0.0;
};

/// Expansion of a real harmonic polynomial; beta = conj(alpha). Throws Input for non-harmonic input.
HarmonicExpansion expand_in_faber(const Polynomial2& H, const FaberBasis& basis);

struct FieldEstimate {
  double value = 0.0;
  /// Magnitude of the last series term kept, as a truncation estimate.
  double last_term = 0.0;
};

/// Classical multipole series using all stored real GPTs. Requires |z| > table.radius.
FieldEstimate multipole_field(const GptTable& table, const Polynomial2& H, cplx z);

/// Geometric series in w = Psi^{-1}(z); valid for any z outside the inclusion.
FieldEstimate geometric_field(const FptMatrices& fpts, const ConformalMap& map, const Polynomial2& H, cplx z);

/// Newton inversion of Psi with a damped fallback; throws Domain if z lies in the inclusion.
cplx invert_map(const ConformalMap& map, cplx z);

}  // namespace faberinv
