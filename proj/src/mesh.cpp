#include "faberinv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "faberinv/error.hpp"
#include "faberinv/spectral.hpp"

namespace faberinv {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

std::shared_ptr<ParamCurve> transform_curve(std::function<CurvePoint(double)> base, const ShapeParams& params,
                                            std::string label) {
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const cplx shift(get("cx", 0.0), get("cy", 0.0));
  const double scale = get("scale", 1.0);
  if (!(scale > 0.0)) throw Error(ErrorKind::Input, label + ": scale must be positive");
  const cplx rot = std::polar(scale, get("rotation", 0.0));
  auto curve = std::make_shared<ParamCurve>();
  curve->label = std::move(label);
  curve->eval = [base = std::move(base), shift, rot](double t) {
    const CurvePoint p = base(t);
    return CurvePoint{shift + rot * p.z, rot * p.dz, rot * p.d2z};
  };
  return curve;
}

double param_or(const ShapeParams& params, const char* key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// int_a^b s^p e^{i beta s} ds for p in {0, 1}.
cplx exp_moment(int p, double beta, double a, double b) {
  const cplx ib(0.0, beta);
  if (std::abs(beta) * (b - a) < 1e-6) {
    // Taylor expansion of e^{i beta s} to third order.
    auto pw = [](double x, int k) { return std::pow(x, k); };
    cplx acc(0.0);
    cplx term(1.0);
    double fact = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j > 0) {
        term *= ib;
        fact *= j;
      }
      acc += term / fact * (pw(b, j + p + 1) - pw(a, j + p + 1)) / static_cast<double>(j + p + 1);
    }
    return acc;
  }
  const cplx eb = std::exp(ib * b);
  const cplx ea = std::exp(ib * a);
  const cplx i0 = (eb - ea) / ib;
  if (p == 0) return i0;
  return (b * eb - a * ea) / ib - i0 / ib;
}

// Circular segment {|z| < R, Im z > cut} with corners rounded by a Gaussian
// filter of width `rounding` (in arclength) applied to the arclength Fourier series.
std::function<CurvePoint(double)> cap_base(double radius, double cut, double rounding) {
  if (!(radius > 0.0) || !(std::abs(cut) < radius) || !(rounding > 0.0)) {
    throw Error(ErrorKind::Input, "cap: need radius > 0, |cut| < radius, rounding > 0");
  }
  const double half_chord = std::sqrt(radius * radius - cut * cut);
  const double alpha0 = std::atan2(cut, half_chord);
  const double chord = 2.0 * half_chord;
  const double arc = radius * (kPi - 2.0 * alpha0);
  const double length = chord + arc;
  const cplx p1(-half_chord, cut);
  const int kmax = static_cast<int>(std::ceil(std::sqrt(80.0) * length / (2.0 * kPi * rounding))) + 1;

  std::vector<cplx> coeffs(2 * kmax + 1);
  for (int k = -kmax; k <= kmax; ++k) {
    const double omega = 2.0 * kPi * k / length;
    cplx c = p1 * exp_moment(0, -omega, 0.0, chord) + exp_moment(1, -omega, 0.0, chord);
    c += radius * std::polar(1.0, alpha0 - chord / radius) * exp_moment(0, 1.0 / radius - omega, chord, length);
    c /= length;
    const double sigma = 2.0 * kPi * k * rounding / length;
    coeffs[k + kmax] = c * std::exp(-0.5 * sigma * sigma);
  }
  FourierCurve fc(std::move(coeffs));
  return [fc](double t) { return fc.eval(t); };
}

}  // namespace

double BoundaryMesh::signed_area() const {
  const int n = size();
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    // dz/dt = speed * T
    acc += 0.5 * std::imag(std::conj(points[j]) * tangents[j]) * weights[j];
  }
  return acc;
}

double BoundaryMesh::max_spacing() const {
  const int n = size();
  double best = 0.0;
  for (int j = 0; j < n; ++j) best = std::max(best, std::abs(points[(j + 1) % n] - points[j]));
  return best;
}

double BoundaryMesh::diameter() const {
  double best = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j) best = std::max(best, std::abs(points[i] - points[j]));
  return best;
}

std::optional<Crossing> find_self_intersection(const Eigen::VectorXcd& polygon) {
  const int m = static_cast<int>(polygon.size());
  if (m < 4) return std::nullopt;
  std::vector<double> xmin(m), xmax(m), ymin(m), ymax(m);
  for (int i = 0; i < m; ++i) {
    const cplx a = polygon[i];
    const cplx b = polygon[(i + 1) % m];
    xmin[i] = std::min(a.real(), b.real());
    xmax[i] = std::max(a.real(), b.real());
    ymin[i] = std::min(a.imag(), b.imag());
    ymax[i] = std::max(a.imag(), b.imag());
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (xmax[i] < xmin[j] || xmax[j] < xmin[i] || ymax[i] < ymin[j] || ymax[j] < ymin[i]) continue;
      if (segments_cross(polygon[i], polygon[(i + 1) % m], polygon[j], polygon[(j + 1) % m])) {
        return Crossing{2.0 * kPi * i / m, 2.0 * kPi * j / m};
      }
    }
  }
  return std::nullopt;
}

std::optional<Crossing> find_self_intersection(const ParamCurve& curve, int samples) {
  Eigen::VectorXcd poly(samples);
  for (int j = 0; j < samples; ++j) poly[j] = curve.eval(2.0 * kPi * j / samples).z;
  return find_self_intersection(poly);
}

BoundaryMesh mesh_from_curve(std::shared_ptr<const ParamCurve> curve, int n) {
  if (n < 8 || n % 2 != 0) throw Error(ErrorKind::Input, "mesh: node count must be even and >= 8, got " + std::to_string(n));
  if (auto hit = find_self_intersection(*curve, 4 * n)) {
    std::ostringstream msg;
    msg << "mesh: curve '" << curve->label << "' self-intersects near parameters t=" << hit->t1 << " and t=" << hit->t2;
    throw Error(ErrorKind::Geometry, msg.str());
  }
  BoundaryMesh mesh;
  mesh.theta.resize(n);
  mesh.points.resize(n);
  mesh.normals.resize(n);
  mesh.tangents.resize(n);
  mesh.curvature.resize(n);
  mesh.speed.resize(n);
  mesh.weights.resize(n);
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j) {
    const double t = h * j;
    const CurvePoint p = curve->eval(t);
    const double speed = std::abs(p.dz);
    if (!(speed > 0.0) || !std::isfinite(speed)) {
      throw Error(ErrorKind::Geometry, "mesh: degenerate parameterization (zero speed) at t=" + std::to_string(t));
    }
    const cplx tangent = p.dz / speed;
    mesh.theta[j] = t;
    mesh.points[j] = p.z;
    mesh.tangents[j] = tangent;
    mesh.normals[j] = cplx(0.0, -1.0) * tangent;
    mesh.curvature[j] = std::imag(std::conj(p.dz) * p.d2z) / (speed * speed * speed);
    mesh.speed[j] = speed;
    mesh.weights[j] = speed * h;
  }
  for (int i = 0; i < n; ++i) {
    const cplx d = mesh.points[(i + 1) % n] - mesh.points[i];
    if (std::abs(d) == 0.0) throw Error(ErrorKind::Geometry, "mesh: coincident nodes at index " + std::to_string(i));
  }
  if (!(mesh.signed_area() > 0.0)) {
    throw Error(ErrorKind::Geometry, "mesh: curve '" + curve->label + "' is not counterclockwise (signed area <= 0)");
  }
  mesh.source = std::move(curve);
  return mesh;
}

std::shared_ptr<const ParamCurve> map_curve(const ConformalMap& map) {
  auto curve = std::make_shared<ParamCurve>();
  curve->label = "conformal";
  curve->eval = [map](double t) {
    const cplx w = std::polar(map.gamma(), t);
    const cplx dw = cplx(0.0, 1.0) * w;  // dw/dt
    const cplx d1 = map.derivative(w);
    return CurvePoint{map(w), d1 * dw, map.second_derivative(w) * dw * dw - d1 * w};
  };
  return curve;
}

BoundaryMesh mesh_from_map(const ConformalMap& map, int n) {
  if (n < 32 || n % 2 != 0) {
    throw Error(ErrorKind::Input, "mesh_from_map: node count must be even and >= 32, got " + std::to_string(n));
  }
  return mesh_from_curve(map_curve(map), n);
}

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "perturbed_circle") return ShapeKind::PerturbedCircle;
  if (name == "kite") return ShapeKind::Kite;
  if (name == "cap") return ShapeKind::Cap;
  if (name == "ellipse") return ShapeKind::Ellipse;
  throw Error(ErrorKind::Input, "unknown shape kind '" + name + "' (expected perturbed_circle, kite, cap or ellipse)");
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::PerturbedCircle: return "perturbed_circle";
    case ShapeKind::Kite: return "kite";
    case ShapeKind::Cap: return "cap";
    case ShapeKind::Ellipse: return "ellipse";
  }
  return "unknown";
}

ShapeParams default_shape_params(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::PerturbedCircle: return {{"radius", 1.0}, {"amplitude", 0.3}, {"frequency", 3.0}};
    case ShapeKind::Kite: return {{"a", 0.65}, {"b", 1.5}};
    case ShapeKind::Cap: return {{"radius", 1.0}, {"cut", -0.3}, {"rounding", 0.08}};
    case ShapeKind::Ellipse: return {{"a", 2.0}, {"b", 1.0}};
  }
  return {};
}

std::shared_ptr<const ParamCurve> parametric_curve(ShapeKind kind, const ShapeParams& params) {
  const ShapeParams defaults = default_shape_params(kind);
  auto get = [&](const char* key) { return param_or(params, key, defaults.at(key)); };
  std::function<CurvePoint(double)> base;
  std::map<std::string, double> meta;
  switch (kind) {
    case ShapeKind::PerturbedCircle: {
      const double r0 = get("radius");
      const double amp = get("amplitude");
      const double freq = get("frequency");
      if (!(r0 > 0.0) || std::abs(amp) >= r0) throw Error(ErrorKind::Input, "perturbed_circle: need radius > |amplitude|");
      base = [r0, amp, freq](double t) {
        const double r = r0 + amp * std::cos(freq * t);
        const double dr = -amp * freq * std::sin(freq * t);
        const double d2r = -amp * freq * freq * std::cos(freq * t);
        const cplx e = std::polar(1.0, t);
        return CurvePoint{r * e, cplx(dr, r) * e, cplx(d2r - r, 2.0 * dr) * e};
      };
      break;
    }
    case ShapeKind::Kite: {
      const double a = get("a");
      const double b = get("b");
      if (!(b > 0.0)) throw Error(ErrorKind::Input, "kite: b must be positive");
      base = [a, b](double t) {
        return CurvePoint{cplx(std::cos(t) + a * std::cos(2 * t) - a, b * std::sin(t)),
                          cplx(-std::sin(t) - 2 * a * std::sin(2 * t), b * std::cos(t)),
                          cplx(-std::cos(t) - 4 * a * std::cos(2 * t), -b * std::sin(t))};
      };
      break;
    }
    case ShapeKind::Cap: {
      const double rounding = get("rounding");
      base = cap_base(get("radius"), get("cut"), rounding);
      meta["rounding_radius"] = rounding;
      break;
    }
    case ShapeKind::Ellipse: {
      const double a = get("a");
      const double b = get("b");
      if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::Input, "ellipse: semi-axes must be positive");
      base = [a, b](double t) {
        return CurvePoint{cplx(a * std::cos(t), b * std::sin(t)), cplx(-a * std::sin(t), b * std::cos(t)),
                          cplx(-a * std::cos(t), -b * std::sin(t))};
      };
      break;
    }
  }
  auto curve = transform_curve(std::move(base), params, to_string(kind));
  curve->metadata = std::move(meta);
  return curve;
}

BoundaryMesh mesh_from_parametric(ShapeKind kind, const ShapeParams& params, int n) {
  return mesh_from_curve(parametric_curve(kind, params), n);
}

FourierCurve::FourierCurve(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 != 1) throw Error(ErrorKind::Input, "FourierCurve: need 2K+1 coefficients");
}

FourierCurve FourierCurve::interpolate(const Eigen::VectorXcd& nodes, std::optional<int> cutoff) {
  const int n = static_cast<int>(nodes.size());
  const int half = n / 2;
  const auto full = spectral::trig_coefficients(nodes);
  const int kmax = std::min(half - 1, cutoff.value_or(half) - 1);
  if (kmax < 1) throw Error(ErrorKind::Input, "FourierCurve: cutoff too small");
  std::vector<cplx> coeffs(2 * kmax + 1);
  for (int k = -kmax; k <= kmax; ++k) coeffs[k + kmax] = full[k + half];
  return FourierCurve(std::move(coeffs));
}

CurvePoint FourierCurve::eval(double t) const {
  const int kmax = max_mode();
  CurvePoint p{cplx(0.0), cplx(0.0), cplx(0.0)};
  const cplx step = std::polar(1.0, t);
  cplx e = std::polar(1.0, -kmax * t);
  for (int k = -kmax; k <= kmax; ++k) {
    const cplx term = coeffs_[k + kmax] * e;
    p.z += term;
    p.dz += cplx(0.0, k) * term;
    p.d2z -= static_cast<double>(k) * k * term;
    e *= step;
  }
  return p;
}

std::shared_ptr<const ParamCurve> FourierCurve::as_curve(std::string label) const {
  auto curve = std::make_shared<ParamCurve>();
  curve->label = std::move(label);
  curve->eval = [self = *this](double t) { return self.eval(t); };
  return curve;
}

BoundaryMesh remesh_arclength(const ParamCurve& curve, int n, std::optional<int> cutoff) {
  if (n < 8 || n % 2 != 0) throw Error(ErrorKind::Input, "remesh: node count must be even and >= 8");
  const int fine = 4 * n;
  Eigen::VectorXcd speed(fine);
  for (int j = 0; j < fine; ++j) speed[j] = std::abs(curve.eval(2.0 * kPi * j / fine).dz);
  const auto c = spectral::trig_coefficients(speed);
  const int half = fine / 2;
  const double mean = c[half].real();
  const double length = 2.0 * kPi * mean;
  auto arclength = [&](double t) {
    double s = mean * t;
    for (int k = 1; k < half; ++k) {
      // c_{-k} = conj(c_k) for real speed.
      const cplx ck = c[k + half];
      s += 2.0 * std::real(ck * (std::polar(1.0, k * t) - 1.0) / cplx(0.0, k));
    }
    return s;
  };
  Eigen::VectorXcd nodes(n);
  double t = 0.0;
  for (int j = 0; j < n; ++j) {
    const double target = length * j / n;
    for (int it = 0; it < 50; ++it) {
      const double f = arclength(t) - target;
      const double df = std::abs(curve.eval(t).dz);
      const double dt = f / df;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    nodes[j] = curve.eval(t).z;
  }
  const FourierCurve fc = FourierCurve::interpolate(nodes, cutoff);
  auto resampled = std::make_shared<ParamCurve>(*fc.as_curve(curve.label));
  resampled->metadata = curve.metadata;
  return mesh_from_curve(std::move(resampled), n);
}

double hausdorff_distance(const BoundaryMesh& a, const BoundaryMesh& b) {
  auto directed = [](const BoundaryMesh& p, const BoundaryMesh& q) {
    double worst = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < q.size(); ++j) best = std::min(best, std::abs(p.points[i] - q.points[j]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

bool contains_point(const BoundaryMesh& mesh, cplx z) {
  double winding = 0.0;
  const int n = mesh.size();
  for (int j = 0; j < n; ++j) {
    winding += std::arg((mesh.points[(j + 1) % n] - z) / (mesh.points[j] - z));
  }
  return std::abs(winding) > kPi;
}

}  // namespace faberinv
