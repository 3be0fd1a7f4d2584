#pragma once

// Closed boundary curves and their Nystrom meshes. Every mesh samples a
// 2*pi-periodic parameterization at t_j = 2*pi*j/n, so the trapezoidal rule,
// logarithmic quadrature and Fourier differentiation all apply directly.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "faberinv/conformal.hpp"

namespace faberinv {

/// Position and first two parameter derivatives of a curve point.
struct CurvePoint {
  cplx z;
  cplx dz;
  cplx d2z;
};

/// A 2*pi-periodic, counterclockwise boundary parameterization.
struct ParamCurve {
  std::function<CurvePoint(double)> eval;
  std::string label;
  /// Free-form metadata recorded into outputs (e.g. corner rounding radius).
  std::map<std::string, double> metadata;
};

struct BoundaryMesh {
  Eigen::VectorXd theta;      // parameter values t_j
  Eigen::VectorXcd points;    // z_j
  Eigen::VectorXcd normals;   // outward unit normal nu_j as a complex number
  Eigen::VectorXcd tangents;  // counterclockwise unit tangent T_j (nu = -i T)
  Eigen::VectorXd curvature;  // kappa_j, positive on convex parts
  Eigen::VectorXd speed;      // |dz/dt|
  Eigen::VectorXd weights;    // |dz/dt| * 2*pi/n
  std::shared_ptr<const ParamCurve> source;

  int size() const noexcept { return static_cast<int>(points.size()); }
  double perimeter() const { return weights.sum(); }
  /// Signed area by the trapezoidal rule on (1/2) Im(conj(z) dz/dt).
  double signed_area() const;
  /// Largest distance between consecutive nodes.
  double max_spacing() const;
  /// Largest |z_j|.
  double radius() const { return points.cwiseAbs().maxCoeff(); }
  double diameter() const;
  /// Weighted L2 inner product on the boundary.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return (a.array() * b.array() * weights.array()).sum(); }
  double integrate(const Eigen::VectorXd& f) const { return f.dot(weights); }
  cplx integrate(const Eigen::VectorXcd& f) const { return (f.array() * weights.array().cast<cplx>()).sum(); }
};

/// First crossing found by the simple-curve test, as a pair of parameters.
struct Crossing {
  double t1;
  double t2;
};

/// Segment-intersection test on `samples` equispaced points of the curve.
std::optional<Crossing> find_self_intersection(const ParamCurve& curve, int samples);

/// Same test on a closed polygon given by its vertices (parameters are vertex indices * 2pi/n).
std::optional<Crossing> find_self_intersection(const Eigen::VectorXcd& polygon);

/// Samples a curve into a mesh. Requires n even and >= 8; runs the simple-curve
/// check on a 4n refinement and rejects clockwise or degenerate curves.
BoundaryMesh mesh_from_curve(std::shared_ptr<const ParamCurve> curve, int n);

/// Curve traced by t -> Psi(gamma e^{it}).
std::shared_ptr<const ParamCurve> map_curve(const ConformalMap& map);

/// Mesh of the map's boundary; n even and >= 32.
BoundaryMesh mesh_from_map(const ConformalMap& map, int n);

/// Built-in parametric shapes.
enum class ShapeKind { PerturbedCircle, Kite, Cap, Ellipse };

ShapeKind parse_shape_kind(const std::string& name);
std::string to_string(ShapeKind kind);

/// Numeric parameters keyed by name; missing keys take documented defaults.
/// Common keys for every kind: "cx", "cy" (translation), "rotation" (radians), "scale".
///   perturbed_circle: "radius" = 1, "amplitude" = 0.3, "frequency" = 3
///   kite:             "a" = 0.65, "b" = 1.5   (cos t + a cos 2t - a, b sin t)
///   cap:              "radius" = 1, "cut" = -0.3, "rounding" = 0.08
///   ellipse:          "a" = 2, "b" = 1
using ShapeParams = std::map<std::string, double>;

std::shared_ptr<const ParamCurve> parametric_curve(ShapeKind kind, const ShapeParams& params = {});

BoundaryMesh mesh_from_parametric(ShapeKind kind, const ShapeParams& params, int n);

/// Default parameter set for a kind (used by the `shapes` listing).
ShapeParams default_shape_params(ShapeKind kind);

/// Trigonometric curve z(t) = sum_{|k| <= K} c_k e^{ikt}.
class FourierCurve {
 public:
  /// coeffs[k + K] = c_k.
  explicit FourierCurve(std::vector<cplx> coeffs);
  /// Interpolates node values z_j at t_j = 2*pi*j/n, keeping modes |k| < cutoff
  /// (defaults to n/2, i.e. full interpolation without the Nyquist mode).
  static FourierCurve interpolate(const Eigen::VectorXcd& nodes, std::optional<int> cutoff = std::nullopt);

  int max_mode() const noexcept { return static_cast<int>(coeffs_.size() / 2); }
  CurvePoint eval(double t) const;
  std::shared_ptr<const ParamCurve> as_curve(std::string label) const;

 private:
  std::vector<cplx> coeffs_;
};

/// Reparameterizes the curve by arclength and samples n nodes uniformly in arclength.
BoundaryMesh remesh_arclength(const ParamCurve& curve, int n, std::optional<int> cutoff = std::nullopt);

/// Symmetric Hausdorff distance between the node sets of two meshes.
double hausdorff_distance(const BoundaryMesh& a, const BoundaryMesh& b);

/// Winding-number test against a mesh polygon.
bool contains_point(const BoundaryMesh& mesh, cplx z);

}  // namespace faberinv
