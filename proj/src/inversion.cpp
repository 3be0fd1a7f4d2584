#include "faberinv/inversion.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "faberinv/error.hpp"

namespace faberinv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCurveSamples = 1024;

void check_curve(RecoveredMap& r) {
  const auto curve = map_curve(r.map);
  r.crossing = find_self_intersection(*curve, kCurveSamples);
  r.simple = !r.crossing.has_value();
  if (!r.simple) return;
  // A simple but clockwise trace (|a_1| > gamma^2 and similar) is not a valid boundary either.
  Eigen::VectorXcd z(kCurveSamples);
  for (int j = 0; j < kCurveSamples; ++j) z[j] = curve->eval(2.0 * kPi * j / kCurveSamples).z;
  double area = 0.0;
  for (int j = 0; j < kCurveSamples; ++j) {
    const cplx a = z[j];
    const cplx b = z[(j + 1) % kCurveSamples];
    area += a.real() * b.imag() - b.real() * a.imag();
  }
  if (!(area > 0.0)) r.simple = false;
}

int sign_from_lambda(double lambda) {
  if (lambda == 0.5) return 1;
  if (lambda == -0.5) return -1;
  std::ostringstream msg;
  msg << "exact_recover: data must be extreme (lambda = +-1/2) unless a sign is given; lambda = " << lambda;
  throw Error(ErrorKind::Input, msg.str());
}

// One step of the recursion: a_m from row m of the Faber table built on a_0..a_{m-1}.
cplx next_coefficient(double gamma, const std::vector<cplx>& coeffs, const Eigen::MatrixXcd& n1, int m) {
  const FaberBasis basis = faber_coefficients(ConformalMap(gamma, coeffs), m);
  cplx acc(0.0);
  for (int n = 1; n <= m; ++n) acc += basis.coeff(m, n) * n1(n - 1, 0);
  return acc / (4.0 * kPi * m);
}

}  // namespace

ConformalMap EquivalentEllipse::as_map() const {
  const double g = 0.5 * (a + b);
  const cplx a1 = g * 0.5 * (a - b) * std::polar(1.0, 2.0 * theta);
  return ConformalMap(g, {center, a1});
}

RecoveredMap exact_recover(const GptTable& table, int order, std::optional<int> sign) {
  if (order < 1) throw Error(ErrorKind::Input, "exact_recover: order must be >= 1");
  if (table.order < std::max(order, 2)) {
    throw Error(ErrorKind::Input, "exact_recover: table order " + std::to_string(table.order) + " is below max(N, 2) = " +
                                      std::to_string(std::max(order, 2)));
  }
  const int s = sign ? *sign : sign_from_lambda(table.lambda);
  if (s != 1 && s != -1) throw Error(ErrorKind::Input, "exact_recover: sign must be +1 or -1");
  const cplx n2_11 = table.n2(1, 1);
  const double v = s * n2_11.real();
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << "exact_recover: " << (s > 0 ? "+" : "-") << "N2_11 = " << v << " is not positive; wrong lambda sign or corrupt data";
    throw Error(ErrorKind::DataInconsistency, msg.str());
  }
  const double gamma = std::sqrt(v / (4.0 * kPi));
  std::vector<cplx> coeffs(order + 1);
  // Translation by c adds conj(c) 2 N2_11 to N2_21, hence the conjugate.
  coeffs[0] = std::conj(table.n2(2, 1) / (2.0 * n2_11));
  coeffs[1] = table.n1(1, 1) / (4.0 * kPi);
  const Eigen::MatrixXcd col = table.N1.leftCols(1);
  for (int m = 2; m <= order; ++m) {
    std::vector<cplx> head(coeffs.begin(), coeffs.begin() + m);
    coeffs[m] = next_coefficient(gamma, head, col, m);
  }

  RecoveredMap r{ConformalMap(gamma, coeffs), s, {}, {}, 0.0, true, std::nullopt, std::nullopt};
  for (int m = order + 1; m <= table.order; ++m) {
    std::vector<cplx> ext = coeffs;
    ext.resize(m, cplx(0.0));
    r.tail.push_back(std::abs(next_coefficient(gamma, ext, col, m)));
  }
  const FaberBasis basis = faber_coefficients(r.map, order);
  for (int m = 2; m <= order; ++m) {
    cplx acc(0.0);
    for (int n = 1; n <= m; ++n) acc += std::conj(basis.coeff(m, n)) * table.n2(n, 1);
    r.consistency.push_back(std::abs(acc) / std::abs(n2_11));
  }
  check_curve(r);
  return r;
}

RecoveredMap recover_from_fpt(const FptMatrices& fpts, int order, int sign, cplx a0) {
  if (order < 1 || order > fpts.order) throw Error(ErrorKind::Input, "recover_from_fpt: order out of range");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Input, "recover_from_fpt: sign must be +1 or -1");
  const double v = sign * fpts.f2(1, 1).real();
  if (!(v > 0.0)) throw Error(ErrorKind::DataInconsistency, "recover_from_fpt: sign * F2_11 is not positive");
  std::vector<cplx> coeffs(order + 1);
  coeffs[0] = a0;
  for (int m = 1; m <= order; ++m) coeffs[m] = fpts.f1(m, 1) / (4.0 * kPi * m);
  RecoveredMap r{ConformalMap(std::sqrt(v / (4.0 * kPi)), coeffs), sign, {}, {}, 0.0, true, std::nullopt, std::nullopt};
  for (int m = 2; m <= order; ++m) r.consistency.push_back(std::abs(fpts.f2(m, 1)) / std::abs(fpts.f2(1, 1)));
  check_curve(r);
  return r;
}

EquivalentEllipse equivalent_ellipse(const Eigen::Matrix2d& m, double sigma0, cplx center) {
  if (!(sigma0 >= 0.0) || sigma0 == 1.0) throw Error(ErrorKind::Contrast, "equivalent_ellipse: invalid sigma0");
  if (m.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorKind::DataInconsistency, "equivalent_ellipse: first-order GPT is zero");
  const Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym);
  EquivalentEllipse e;
  // Eigen sorts ascending.
  e.lambda1 = es.eigenvalues()[1];
  e.lambda2 = es.eigenvalues()[0];
  e.e1 = es.eigenvectors().col(1);
  e.e2 = es.eigenvectors().col(0);
  const double l1 = e.lambda1;
  const double l2 = e.lambda2;
  double ratio;
  double qraw;
  if (std::isinf(sigma0)) {
    ratio = 1.0;
    qraw = l1 / l2;
  } else {
    ratio = (sigma0 - 1.0) / (sigma0 + 1.0);
    qraw = (l2 - sigma0 * l1) / (l1 - sigma0 * l2);
  }
  const double inv_p = ratio * (1.0 / l1 + 1.0 / l2);
  e.p = 1.0 / inv_p;
  if (!(e.p > 0.0) || !(qraw > 0.0) || !std::isfinite(e.p) || !std::isfinite(qraw)) {
    std::ostringstream msg;
    msg << "equivalent_ellipse: inconsistent first-order GPT (eigenvalues " << l1 << ", " << l2 << "; p = " << e.p
        << ", q = " << qraw << ")";
    throw Error(ErrorKind::DataInconsistency, msg.str());
  }
  // qraw is the ratio major/minor, so the axis along e1 is sqrt(p qraw / pi).
  const double along = std::sqrt(e.p * qraw / kPi);
  const double across = std::sqrt(e.p / (kPi * qraw));
  e.a = std::max(along, across);
  e.b = std::min(along, across);
  e.q = e.b / e.a;
  const Eigen::Vector2d dir = along >= across ? e.e1 : e.e2;
  if (std::abs(l1 - l2) < 1e-12 * std::abs(l1)) {
    e.theta = 0.0;
  } else {
    double t = std::atan2(dir[1], dir[0]);
    if (t <= -kPi / 2) t += kPi;
    if (t > kPi / 2) t -= kPi;
    e.theta = t;
  }
  e.center = center;
  return e;
}

EquivalentEllipse equivalent_ellipse(const GptTable& table, double sigma0) {
  cplx center(0.0);
  if (table.order >= 2 && std::abs(table.n2(1, 1)) > 0.0) center = std::conj(table.n2(2, 1) / (2.0 * table.n2(1, 1)));
  return equivalent_ellipse(table.first_order(), sigma0, center);
}

RecoveredMap reference_shape(const GptTable& table, double sigma0, int order) {
  const Contrast c = Contrast::from_sigma0(sigma0);
  const int s = sigma0 > 1.0 ? 1 : -1;
  RecoveredMap r = exact_recover(table, order, s);
  r.contrast_mismatch = std::abs(c.lambda() - 0.5 * s);
  if (!r.simple) r.fallback = equivalent_ellipse(table, sigma0);
  return r;
}

GptTable perturb_table(const GptTable& table, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise < 1.0)) throw Error(ErrorKind::Input, "perturb_table: noise must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  // 53-bit uniform from the raw engine output so results do not depend on the library's distributions.
  auto factor = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 1.0 + noise * (2.0 * u - 1.0);
  };
  GptTable out = table;
  for (Eigen::Index i = 0; i < out.N1.rows(); ++i)
    for (Eigen::Index j = 0; j < out.N1.cols(); ++j) out.N1(i, j) *= factor();
  for (Eigen::Index i = 0; i < out.N2.rows(); ++i)
    for (Eigen::Index j = 0; j < out.N2.cols(); ++j) out.N2(i, j) *= factor();
  for (Eigen::Index i = 0; i < out.M.rows(); ++i)
    for (Eigen::Index j = 0; j < out.M.cols(); ++j) {
      const double f = factor();
      if (!std::isnan(out.M(i, j))) out.M(i, j) *= f;
    }
  return out;
}

}  // namespace faberinv
