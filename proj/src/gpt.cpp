#include "faberinv/gpt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "faberinv/error.hpp"
#include "faberinv/layerpot.hpp"

namespace faberinv {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// nu . grad(Re f) + i nu . grad(Im f) for analytic f is f'(z) nu.
Eigen::VectorXcd analytic_normal_data(const BoundaryMesh& mesh, int m) {
  Eigen::VectorXcd d(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) d[j] = static_cast<double>(m) * std::pow(mesh.points[j], m - 1) * mesh.normals[j];
  return d;
}

cplx weighted_moment(const BoundaryMesh& mesh, const Eigen::VectorXcd& phi, int k) {
  cplx acc(0.0);
  for (int j = 0; j < mesh.size(); ++j) acc += std::pow(mesh.points[j], k) * phi[j] * mesh.weights[j];
  return acc;
}

void check_order(int order, const char* who) {
  if (order < 1) throw Error(ErrorKind::Input, std::string(who) + ": order must be >= 1");
}

// Faber table a_{mn}, m, n = 1..order, as a lower-triangular matrix.
Eigen::MatrixXcd faber_block(const FaberBasis& basis, int order) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(order, order);
  for (int m = 1; m <= order; ++m)
    for (int n = 1; n <= m; ++n) a(m - 1, n - 1) = basis.coeff(m, n);
  return a;
}

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

struct GrunskyBlock {
  Eigen::MatrixXcd F1;
  Eigen::MatrixXcd F2;
};

GrunskyBlock grunsky_block(const ConformalMap& map, double lambda, int order, int truncation) {
  const GrunskyMatrix c = grunsky_matrix(map, truncation);
  const double g = map.gamma();
  Eigen::MatrixXcd ct(truncation, truncation);
  for (int m = 1; m <= truncation; ++m)
    for (int k = 1; k <= truncation; ++k) ct(m - 1, k - 1) = c(m, k) * std::pow(g, -(m + k));
  const double l2 = lambda * lambda;
  const cplx shift(0.25 - l2);

  Eigen::MatrixXcd a1 = -0.25 * ct * ct.conjugate();
  a1.diagonal().array() += l2;
  Eigen::MatrixXcd a2 = -0.25 * ct.conjugate() * ct;
  a2.diagonal().array() += l2;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu1(a1);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu2(a2);
  for (const auto* lu : {&lu1, &lu2}) {
    if (!(lu->rcond() > 1e-14)) {
      std::ostringstream msg;
      msg << "compute_fpt_grunsky: lambda^2 I - C C*/4 is numerically singular (rcond " << lu->rcond()
          << ", lambda = " << lambda << ")";
      throw Error(ErrorKind::Numerical, msg.str());
    }
  }
  const Eigen::MatrixXcd r1 = lu1.solve(ct);
  const Eigen::MatrixXcd r2 = lu2.solve(Eigen::MatrixXcd::Identity(truncation, truncation));

  GrunskyBlock out{Eigen::MatrixXcd(order, order), Eigen::MatrixXcd(order, order)};
  for (int m = 1; m <= order; ++m) {
    for (int k = 1; k <= order; ++k) {
      const double gk = std::pow(g, m + k);
      out.F1(m - 1, k - 1) = 4.0 * kPi * k * (c(m, k) + shift * gk * r1(m - 1, k - 1));
      cplx f2 = 8.0 * kPi * k * lambda * shift * gk * r2(m - 1, k - 1);
      if (m == k) f2 += 8.0 * kPi * k * lambda * std::pow(g, 2 * k);
      out.F2(m - 1, k - 1) = f2;
    }
  }
  return out;
}

// Entrywise relative change; entries below 1e-12 of the block maximum count as zero.
double max_relative_change(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  const double floor = 1e-12 * scale;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max({std::abs(a(i, j)), std::abs(b(i, j)), floor}));
  return worst;
}

}  // namespace

double compute_gpt(const BoundaryMesh& mesh, const Contrast& contrast, MultiIndex alpha, MultiIndex beta) {
  if (alpha.order() < 1 || beta.order() < 1) throw Error(ErrorKind::Input, "compute_gpt: |alpha|, |beta| must be >= 1");
  const DensitySolver solver(assemble_np(mesh), contrast.lambda());
  const Polynomial2 source = Polynomial2::monomial(beta);
  const Eigen::VectorXd phi = solver.solve(normal_derivative(source, mesh.points, mesh.normals)).phi;
  return mesh.integrate(Eigen::VectorXd(values(Polynomial2::monomial(alpha), mesh.points).cwiseProduct(phi)));
}

std::pair<cplx, cplx> compute_contracted(const BoundaryMesh& mesh, const Contrast& contrast, int m, int k) {
  if (m < 1 || k < 1) throw Error(ErrorKind::Input, "compute_contracted: m, k must be >= 1");
  const DensitySolver solver(assemble_np(mesh), contrast.lambda());
  const Eigen::VectorXcd data = analytic_normal_data(mesh, m);
  const Eigen::VectorXcd phi1 = solver.solve(data);
  const Eigen::VectorXcd phi2 = solver.solve(Eigen::VectorXcd(data.conjugate()));
  return {weighted_moment(mesh, phi1, k), weighted_moment(mesh, phi2, k)};
}

double GptTable::m(MultiIndex alpha, MultiIndex beta) const {
  const auto ia = std::find(indices.begin(), indices.end(), alpha);
  const auto ib = std::find(indices.begin(), indices.end(), beta);
  if (ia == indices.end() || ib == indices.end() || !has_real()) {
    throw Error(ErrorKind::Input, "gpt table: real entry not stored");
  }
  return M(ia - indices.begin(), ib - indices.begin());
}

Eigen::Matrix2d GptTable::first_order() const {
  Eigen::Matrix2d out;
  if (has_real()) {
    out << m({1, 0}, {1, 0}), m({1, 0}, {0, 1}), m({0, 1}, {1, 0}), m({0, 1}, {0, 1});
    return out;
  }
  if (order < 1) throw Error(ErrorKind::Input, "gpt table: empty");
  const cplx a = n1(1, 1);
  const cplx b = n2(1, 1);
  out << 0.5 * (a + b).real(), 0.5 * (a - b).imag(), 0.5 * (a + b).imag(), 0.5 * (b - a).real();
  return out;
}

GptTable compute_gpt_table(const BoundaryMesh& mesh, const Contrast& contrast, int order, bool with_real) {
  check_order(order, "compute_gpt_table");
  GptTable t;
  t.lambda = contrast.lambda();
  t.sigma0 = contrast.sigma0();
  t.order = order;
  t.radius = mesh.radius();
  const DensitySolver solver(assemble_np(mesh), contrast.lambda());

  t.N1.resize(order, order);
  t.N2.resize(order, order);
  for (int m = 1; m <= order; ++m) {
    const Eigen::VectorXcd data = analytic_normal_data(mesh, m);
    const Eigen::VectorXcd phi1 = solver.solve(data);
    const Eigen::VectorXcd phi2 = solver.solve(Eigen::VectorXcd(data.conjugate()));
    for (int k = 1; k <= order; ++k) {
      t.N1(m - 1, k - 1) = weighted_moment(mesh, phi1, k);
      t.N2(m - 1, k - 1) = weighted_moment(mesh, phi2, k);
    }
  }

  if (with_real) {
    t.indices = multi_indices(order);
    const int s = static_cast<int>(t.indices.size());
    t.M = Eigen::MatrixXd::Constant(s, s, kNaN);
    for (int b = 0; b < s; ++b) {
      const Polynomial2 source = Polynomial2::monomial(t.indices[b]);
      Eigen::VectorXd phi;
      try {
        phi = solver.solve(normal_derivative(source, mesh.points, mesh.normals)).phi;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Compatibility) throw;
        continue;
      }
      for (int a = 0; a < s; ++a) {
        t.M(a, b) = mesh.integrate(Eigen::VectorXd(values(Polynomial2::monomial(t.indices[a]), mesh.points).cwiseProduct(phi)));
      }
    }
  }
  return t;
}

std::vector<Polynomial2> pairing_basis(int order) {
  check_order(order, "pairing_basis");
  std::vector<Polynomial2> out;
  for (int m = 1; m <= order; ++m) {
    out.push_back(Polynomial2::re_power(m));
    out.push_back(Polynomial2::im_power(m));
  }
  return out;
}

Eigen::MatrixXd pairing_from_contracted(const GptTable& table, int order) {
  check_order(order, "pairing_from_contracted");
  if (order > table.order) throw Error(ErrorKind::Input, "pairing_from_contracted: table order too small");
  // Row = test function f, column = source g.
  Eigen::MatrixXd q(2 * order, 2 * order);
  for (int k = 1; k <= order; ++k) {
    for (int m = 1; m <= order; ++m) {
      const cplx a = table.n1(m, k);
      const cplx b = table.n2(m, k);
      const int rk = 2 * (k - 1);
      const int rm = 2 * (m - 1);
      q(rk, rm) = 0.5 * (a + b).real();
      q(rk + 1, rm + 1) = 0.5 * (b - a).real();
      q(rk + 1, rm) = 0.5 * (a + b).imag();
      q(rk, rm + 1) = 0.5 * (a - b).imag();
    }
  }
  return q;
}

FptMatrices compute_fpt_quadrature(const BoundaryMesh& mesh, const ConformalMap& map, const Contrast& contrast, int order) {
  check_order(order, "compute_fpt_quadrature");
  const FaberBasis basis = faber_coefficients(map, order);
  const DensitySolver solver(assemble_np(mesh), contrast.lambda());
  const int n = mesh.size();

  Eigen::MatrixXcd tests(n, order);
  for (int k = 1; k <= order; ++k)
    for (int j = 0; j < n; ++j) tests(j, k - 1) = basis.evaluate(k, mesh.points[j]) * mesh.weights[j];

  FptMatrices out;
  out.order = order;
  out.F1.resize(order, order);
  out.F2.resize(order, order);
  for (int m = 1; m <= order; ++m) {
    Eigen::VectorXcd data(n);
    for (int j = 0; j < n; ++j) data[j] = basis.derivative(m, mesh.points[j]) * mesh.normals[j];
    const Eigen::VectorXcd phi1 = solver.solve(data);
    const Eigen::VectorXcd phi2 = solver.solve(Eigen::VectorXcd(data.conjugate()));
    out.F1.row(m - 1) = tests.transpose() * phi1;
    out.F2.row(m - 1) = tests.transpose() * phi2;
  }
  out.provenance = FptMatrices::Provenance::Quadrature;
  return out;
}

FptMatrices fpt_from_contracted(const GptTable& table, const FaberBasis& basis, int order) {
  check_order(order, "fpt_from_contracted");
  if (order > table.order || order > basis.order()) throw Error(ErrorKind::Input, "fpt_from_contracted: order exceeds table or basis");
  const Eigen::MatrixXcd a = faber_block(basis, order);
  const Eigen::MatrixXcd n1 = table.N1.topLeftCorner(order, order);
  const Eigen::MatrixXcd n2 = table.N2.topLeftCorner(order, order);
  FptMatrices out;
  out.order = order;
  out.F1 = a * n1 * a.transpose();
  out.F2 = a.conjugate() * n2 * a.transpose();
  out.provenance = FptMatrices::Provenance::Quadrature;
  return out;
}

FptMatrices compute_fpt_grunsky(const ConformalMap& map, const Contrast& contrast, int order, const GrunskyFptOptions& options) {
  check_order(order, "compute_fpt_grunsky");
  int trunc = options.initial_truncation > 0 ? options.initial_truncation : 2 * order;
  trunc = std::max(trunc, order);
  const int step = std::max(options.truncation_step, 1);
  const double lambda = contrast.lambda();

  GrunskyBlock cur = grunsky_block(map, lambda, order, trunc);
  while (true) {
    if (trunc + step > options.max_truncation) {
      throw Error(ErrorKind::Resolution, "compute_fpt_grunsky: block not stable up to truncation " + std::to_string(trunc));
    }
    GrunskyBlock next = grunsky_block(map, lambda, order, trunc + step);
    const double change = std::max(max_relative_change(cur.F1, next.F1), max_relative_change(cur.F2, next.F2));
    trunc += step;
    cur = std::move(next);
    if (change <= options.stability_tol) break;
  }
  FptMatrices out;
  out.order = order;
  out.F1 = std::move(cur.F1);
  out.F2 = std::move(cur.F2);
  out.provenance = FptMatrices::Provenance::Grunsky;
  out.truncation = trunc;
  return out;
}

HarmonicExpansion expand_in_faber(const Polynomial2& H, const FaberBasis& basis) {
  if (!H.is_harmonic()) throw Error(ErrorKind::Input, "expand_in_faber: polynomial is not harmonic");
  const int deg = H.degree();
  if (deg > basis.order()) throw Error(ErrorKind::Input, "expand_in_faber: degree exceeds the Faber basis order");
  const std::vector<cplx> c = H.analytic_coefficients();

  // z^m = sum_j b_{mj} F_j with B the inverse of the unit lower-triangular table.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(deg + 1, deg + 1);
  for (int m = 0; m <= deg; ++m)
    for (int n = 0; n <= m; ++n) a(m, n) = basis.coeff(m, n);
  const Eigen::MatrixXcd b =
      a.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(deg + 1, deg + 1));

  HarmonicExpansion out;
  out.alpha.assign(deg, cplx(0.0));
  out.constant = H.coeff({0, 0});
  for (int m = 1; m <= deg; ++m) {
    for (int j = 1; j <= m; ++j) out.alpha[j - 1] += 0.5 * c[m] * b(m, j);
    out.constant += (c[m] * b(m, 0)).real();
  }
  out.beta.resize(deg);
  for (int j = 0; j < deg; ++j) out.beta[j] = std::conj(out.alpha[j]);
  return out;
}

FieldEstimate multipole_field(const GptTable& table, const Polynomial2& H, cplx z) {
  if (!(std::abs(z) > table.radius)) {
    std::ostringstream msg;
    msg << "multipole_field: |z| = " << std::abs(z) << " is inside the circumscribing disk of radius " << table.radius;
    throw Error(ErrorKind::Domain, msg.str());
  }
  FieldEstimate out;
  out.value = H.value(z);
  if (!table.has_real()) throw Error(ErrorKind::Input, "multipole_field: table has no real GPTs");
  if (H.degree() > table.order) throw Error(ErrorKind::Input, "multipole_field: H degree exceeds the table order");
  std::vector<double> by_order(table.order + 1, 0.0);
  const int s = static_cast<int>(table.indices.size());
  for (int ia = 0; ia < s; ++ia) {
    const MultiIndex al = table.indices[ia];
    const int n = al.order();
    // d^alpha ln|x| = Re(i^{a2} (-1)^{n-1} (n-1)! / z^n)
    const cplx ipow = std::pow(cplx(0.0, 1.0), al.a2);
    const double dgamma = (ipow * ((n % 2 == 1 ? 1.0 : -1.0) * factorial(n - 1)) / std::pow(z, n)).real() / (2.0 * kPi);
    const double pre = (n % 2 == 0 ? 1.0 : -1.0) / (factorial(al.a1) * factorial(al.a2)) * dgamma;
    for (int ib = 0; ib < s; ++ib) {
      const double h = H.coeff(table.indices[ib]);
      if (h == 0.0) continue;
      const double mab = table.M(ia, ib);
      if (std::isnan(mab)) throw Error(ErrorKind::Input, "multipole_field: required GPT entry is not available");
      const double term = pre * mab * h;
      out.value += term;
      by_order[n] += term;
    }
  }
  out.last_term = std::abs(by_order[table.order]);
  return out;
}

cplx invert_map(const ConformalMap& map, cplx z) {
  const double scale = std::max({1.0, std::abs(z), map.gamma()});
  auto residual = [&](cplx w) { return map(w) - z; };
  cplx w = z - map.coeff(0);
  if (std::abs(w) < map.gamma()) w *= map.gamma() * 1.5 / std::max(std::abs(w), 1e-300);
  bool ok = false;
  for (int it = 0; it < 50; ++it) {
    const cplx r = residual(w);
    if (std::abs(r) <= 1e-14 * scale) {
      ok = true;
      break;
    }
    w -= r / map.derivative(w);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
  }
  if (!ok) {
    // Damped Newton from a point far out, halving until the residual decreases.
    w = (z - map.coeff(0));
    if (std::abs(w) < 2.0 * map.gamma()) w = 2.0 * map.gamma() * (w == cplx(0.0) ? cplx(1.0) : w / std::abs(w));
    for (int it = 0; it < 500 && !ok; ++it) {
      const cplx r = residual(w);
      if (std::abs(r) <= 1e-13 * scale) {
        ok = true;
        break;
      }
      const cplx dw = r / map.derivative(w);
      double t = 1.0;
      while (t > 1e-10) {
        const cplx cand = w - t * dw;
        if (std::abs(cand) >= map.gamma() && std::abs(residual(cand)) < std::abs(r)) {
          w = cand;
          break;
        }
        t *= 0.5;
      }
      if (t <= 1e-10) break;
    }
  }
  if (!ok) {
    // Winding number of the boundary image around z decides inside versus non-convergence.
    const int samples = 1024;
    double winding = 0.0;
    cplx prev = map(cplx(map.gamma(), 0.0)) - z;
    for (int j = 1; j <= samples; ++j) {
      const cplx cur = map(std::polar(map.gamma(), 2.0 * kPi * j / samples)) - z;
      winding += std::arg(cur / prev);
      prev = cur;
    }
    if (std::abs(winding) > kPi) throw Error(ErrorKind::Domain, "invert_map: point lies inside the inclusion");
    throw Error(ErrorKind::Numerical, "invert_map: Newton iteration did not converge");
  }
  if (std::abs(w) < map.gamma() * (1.0 - 1e-12)) {
    throw Error(ErrorKind::Domain, "invert_map: point lies inside the inclusion");
  }
  return w;
}

FieldEstimate geometric_field(const FptMatrices& fpts, const ConformalMap& map, const Polynomial2& H, cplx z) {
  const int deg = H.degree();
  FieldEstimate out;
  out.value = H.value(z);
  if (deg == 0) return out;
  if (deg > fpts.order) throw Error(ErrorKind::Input, "geometric_field: H degree exceeds the FPT order");
  const cplx w = invert_map(map, z);
  const HarmonicExpansion ex = expand_in_faber(H, faber_coefficients(map, fpts.order));
  const cplx winv = 1.0 / w;
  cplx wk(1.0);
  for (int k = 1; k <= fpts.order; ++k) {
    wk *= winv;
    cplx term(0.0);
    for (int m = 1; m <= deg; ++m) {
      const cplx al = ex.alpha[m - 1];
      const cplx be = ex.beta[m - 1];
      // S[phi](Psi(w)) = -(1/2pi) Re sum_k w^{-k}/k int F_k phi, phi real.
      const cplx x = al * fpts.f1(m, k) + be * fpts.f2(m, k);
      term += x * wk + std::conj(x) * std::conj(wk);
    }
    const double t = term.real() / (4.0 * kPi * k);
    out.value -= t;
    if (k == fpts.order) out.last_term = std::abs(t);
  }
  return out;
}

}  // namespace faberinv
