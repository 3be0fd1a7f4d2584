#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "faberinv/error.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/layerpot.hpp"
#include "support.hpp"

using namespace faberinv;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Numerical;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Complex coefficients of z^k = (x1 + i x2)^k on the monomials x1^{k-j} x2^j.
std::vector<std::pair<MultiIndex, cplx>> power_monomials(int k) {
  std::vector<std::pair<MultiIndex, cplx>> out;
  for (int j = 0; j <= k; ++j) out.push_back({MultiIndex{k - j, j}, binomial(k, j) * std::pow(cplx(0.0, 1.0), j)});
  return out;
}

std::size_t index_of(const GptTable& t, MultiIndex a) {
  return static_cast<std::size_t>(std::find(t.indices.begin(), t.indices.end(), a) - t.indices.begin());
}

}  // namespace

TEST_CASE("disk tensors in closed form") {
  for (double r : {0.5, 2.0}) {
    const BoundaryMesh disk = mesh_from_map(ConformalMap::identity(r), 128);
    for (double lambda : {0.5, -0.5, 0.75, -2.0}) {
      const Contrast c = Contrast::from_lambda(lambda);
      const GptTable t = compute_gpt_table(disk, c, 4, lambda != 0.5 && lambda != -0.5);
      for (int m = 1; m <= 4; ++m) {
        for (int k = 1; k <= 4; ++k) {
          const double want = m == k ? 2.0 * kPi * k * std::pow(r, 2 * k) / lambda : 0.0;
          CHECK(std::abs(t.n2(m, k) - want) < 1e-11 * std::pow(r, m + k));
          CHECK(std::abs(t.n1(m, k)) < 1e-11 * std::pow(r, m + k));
        }
      }
      if (t.has_real()) {
        CHECK(t.m({1, 0}, {1, 0}) == doctest::Approx(kPi * r * r / lambda).epsilon(1e-12));
        CHECK(t.m({0, 1}, {0, 1}) == doctest::Approx(kPi * r * r / lambda).epsilon(1e-12));
        CHECK(std::abs(t.m({1, 0}, {0, 1})) < 1e-12);
      }
    }
  }
}

TEST_CASE("ellipse polarization tensor against the classical formula") {
  const double a = 2.0;
  const double b = 1.0;
  const BoundaryMesh ell = mesh_from_parametric(ShapeKind::Ellipse, {{"a", a}, {"b", b}}, 256);
  for (double s0 : {5.0, 0.3}) {
    const GptTable t = compute_gpt_table(ell, Contrast::from_sigma0(s0), 1);
    const double area = kPi * a * b;
    CHECK(t.m({1, 0}, {1, 0}) == doctest::Approx((s0 - 1.0) * area * (a + b) / (a + s0 * b)).epsilon(1e-12));
    CHECK(t.m({0, 1}, {0, 1}) == doctest::Approx((s0 - 1.0) * area * (a + b) / (b + s0 * a)).epsilon(1e-12));
    const Eigen::Matrix2d m1 = t.first_order();
    CHECK(m1(0, 0) == doctest::Approx(t.m({1, 0}, {1, 0})));
    // Same block rebuilt from the contracted tensors alone.
    GptTable contracted = t;
    contracted.M.resize(0, 0);
    contracted.indices.clear();
    CHECK((contracted.first_order() - m1).cwiseAbs().maxCoeff() < 1e-12 * m1.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("real tensors: symmetry, sign, scaling") {
  const BoundaryMesh kite = mesh_from_parametric(ShapeKind::Kite, {}, 256);
  for (double s0 : {10.0, 0.2}) {
    const GptTable t = compute_gpt_table(kite, Contrast::from_sigma0(s0), 3);
    // Symmetric on harmonic combinations only.
    const Eigen::MatrixXd q = pairing_from_contracted(t, 3);
    CHECK((q - q.transpose()).cwiseAbs().maxCoeff() < 1e-9 * q.cwiseAbs().maxCoeff());
    const Eigen::Matrix2d m1 = t.first_order();
    CHECK(std::abs(m1(0, 1) - m1(1, 0)) < 1e-10 * m1.norm());
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(t.first_order()).eigenvalues();
    CHECK(ev[0] * (s0 - 1.0) > 0.0);
    CHECK(ev[1] * (s0 - 1.0) > 0.0);
  }

  const double s = 1.5;
  const Contrast c = Contrast::from_sigma0(4.0);
  const GptTable base = compute_gpt_table(kite, c, 3, false);
  const GptTable big = compute_gpt_table(mesh_from_parametric(ShapeKind::Kite, {{"scale", s}}, 256), c, 3, false);
  for (int m = 1; m <= 3; ++m) {
    for (int k = 1; k <= 3; ++k) {
      CHECK(std::abs(big.n1(m, k) - std::pow(s, m + k) * base.n1(m, k)) < 1e-10 * std::pow(s, m + k) * base.N1.cwiseAbs().maxCoeff());
      CHECK(std::abs(big.n2(m, k) - std::pow(s, m + k) * base.n2(m, k)) < 1e-10 * std::pow(s, m + k) * base.N2.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("contracted tensors are sums of real tensors") {
  const BoundaryMesh mesh = mesh_from_parametric(ShapeKind::PerturbedCircle, {{"cx", 0.2}, {"rotation", 0.4}}, 256);
  for (double s0 : {10.0, 0.4}) {
    const GptTable t = compute_gpt_table(mesh, Contrast::from_sigma0(s0), 3);
    for (int m = 1; m <= 3; ++m) {
      for (int k = 1; k <= 3; ++k) {
        cplx n1(0.0);
        cplx n2(0.0);
        for (const auto& [al, ca] : power_monomials(k)) {
          for (const auto& [be, cb] : power_monomials(m)) {
            const double mab = t.M(index_of(t, al), index_of(t, be));
            n1 += ca * cb * mab;
            n2 += ca * std::conj(cb) * mab;
          }
        }
        const double scale = std::max(t.N1.cwiseAbs().maxCoeff(), t.N2.cwiseAbs().maxCoeff());
        CHECK(std::abs(t.n1(m, k) - n1) < 1e-11 * scale);
        CHECK(std::abs(t.n2(m, k) - n2) < 1e-11 * scale);
      }
    }
    const Eigen::Matrix2d m1 = t.first_order();
    CHECK(std::abs(t.n1(1, 1) - cplx(m1(0, 0) - m1(1, 1), m1(0, 1) + m1(1, 0))) < 1e-11 * m1.norm());
  }
}

TEST_CASE("non-harmonic sources at extreme contrast are marked unavailable") {
  const BoundaryMesh kite = mesh_from_parametric(ShapeKind::Kite, {}, 128);
  const GptTable t = compute_gpt_table(kite, Contrast::from_lambda(0.5), 2);
  CHECK(std::isnan(t.m({1, 0}, {2, 0})));
  CHECK(std::isfinite(t.m({1, 0}, {1, 1})));
  CHECK(kind_of([&] { t.m({3, 0}, {1, 0}); }) == ErrorKind::Input);
}

TEST_CASE("translation shows up in the first column") {
  const cplx center(0.4, -0.7);
  const BoundaryMesh disk = mesh_from_map(ConformalMap(1.0, {center}), 128);
  for (double lambda : {0.5, 0.8}) {
    const GptTable t = compute_gpt_table(disk, Contrast::from_lambda(lambda), 2, false);
    CHECK(std::abs(std::conj(t.n2(2, 1) / (2.0 * t.n2(1, 1))) - center) < 1e-12);
  }
}

TEST_CASE("pairing matrix from contracted tensors") {
  const BoundaryMesh kite = mesh_from_parametric(ShapeKind::Kite, {}, 256);
  const Contrast c = Contrast::from_sigma0(3.0);
  const GptTable t = compute_gpt_table(kite, c, 3, false);
  const Eigen::MatrixXd q = pairing_from_contracted(t, 3);
  const auto basis = pairing_basis(3);
  const TransmissionSolver solver(kite, c);
  for (std::size_t g = 0; g < basis.size(); ++g) {
    const Eigen::VectorXd phi = solver.density(basis[g]);
    for (std::size_t f = 0; f < basis.size(); ++f) {
      const double want = kite.integrate(Eigen::VectorXd(values(basis[f], kite.points).cwiseProduct(phi)));
      CHECK(q(f, g) == doctest::Approx(want).epsilon(1e-10).scale(q.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("Faber tensors of a disk") {
  const double g = 1.3;
  const ConformalMap map = ConformalMap::identity(g);
  const BoundaryMesh disk = mesh_from_map(map, 128);
  for (double lambda : {0.5, -0.5, 0.75, 2.0}) {
    const Contrast c = Contrast::from_lambda(lambda);
    for (const FptMatrices& f : {compute_fpt_quadrature(disk, map, c, 5), compute_fpt_grunsky(map, c, 5)}) {
      CHECK(f.F1.cwiseAbs().maxCoeff() < 1e-10);
      for (int k = 1; k <= 5; ++k) CHECK(std::abs(f.f2(k, k) - 2.0 * kPi * k * std::pow(g, 2 * k) / lambda) < 1e-10 * std::pow(g, 2 * k));
    }
  }
}

TEST_CASE("Grunsky route on an ellipse map matches the diagonal formula") {
  const double q = 0.4;
  const ConformalMap map(1.0, {0.0, q});
  const BoundaryMesh mesh = mesh_from_map(map, 256);
  for (double lambda : {0.5, -0.5, 0.75, -1.5}) {
    const Contrast c = Contrast::from_lambda(lambda);
    const FptMatrices gr = compute_fpt_grunsky(map, c, 5);
    const FptMatrices qu = compute_fpt_quadrature(mesh, map, c, 5);
    const double shift = 0.25 - lambda * lambda;
    for (int k = 1; k <= 5; ++k) {
      const double ck = std::pow(q, k);
      const double denom = lambda * lambda - ck * ck / 4.0;
      const double f1 = 4.0 * kPi * k * (ck + shift * ck / denom);
      const double f2 = 8.0 * kPi * k * lambda * (1.0 + shift / denom);
      CHECK(std::abs(gr.f1(k, k) - f1) < 1e-11 * std::abs(f2));
      CHECK(std::abs(gr.f2(k, k) - f2) < 1e-11 * std::abs(f2));
      CHECK(std::abs(qu.f1(k, k) - f1) < 1e-9 * std::abs(f2));
      CHECK(std::abs(qu.f2(k, k) - f2) < 1e-9 * std::abs(f2));
    }
  }
}

TEST_CASE("two routes to the Faber tensors agree") {
  for (const ConformalMap& map : {testing::order4_map(), testing::order4_map().transformed(cplx(0.5, 0.2), 0.9, 1.6)}) {
    const BoundaryMesh mesh = mesh_from_map(map, 256);
    for (double lambda : {0.5, -0.5, 0.75, -3.0}) {
      const Contrast c = Contrast::from_lambda(lambda);
      const FptMatrices qu = compute_fpt_quadrature(mesh, map, c, 6);
      const FptMatrices gr = compute_fpt_grunsky(map, c, 6, {.stability_tol = 1e-10});
      const double scale = std::max(qu.F1.cwiseAbs().maxCoeff(), qu.F2.cwiseAbs().maxCoeff());
      CHECK((gr.F1 - qu.F1).cwiseAbs().maxCoeff() < 1e-11 * scale);
      CHECK((gr.F2 - qu.F2).cwiseAbs().maxCoeff() < 1e-11 * scale);
      CHECK(gr.provenance == FptMatrices::Provenance::Grunsky);
      CHECK(gr.truncation >= 12);

      const GptTable t = compute_gpt_table(mesh, c, 6, false);
      const FptMatrices fc = fpt_from_contracted(t, faber_coefficients(map, 6), 6);
      CHECK((fc.F1 - qu.F1).cwiseAbs().maxCoeff() < 1e-11 * scale);
      CHECK((fc.F2 - qu.F2).cwiseAbs().maxCoeff() < 1e-11 * scale);
    }
  }
}

TEST_CASE("extreme contrast identities") {
  const ConformalMap map = testing::order4_map().transformed(cplx(0.1, 0.3), 0.2, 1.2);
  const BoundaryMesh mesh = mesh_from_map(map, 256);
  for (double lambda : {0.5, -0.5}) {
    const Contrast c = Contrast::from_lambda(lambda);
    for (const FptMatrices& f : {compute_fpt_quadrature(mesh, map, c, 6), compute_fpt_grunsky(map, c, 6)}) {
      for (int m = 1; m <= 6; ++m) CHECK(std::abs(f.f1(m, 1) - 4.0 * kPi * m * map.coeff(m)) < 1e-10);
      for (int m = 2; m <= 6; ++m) CHECK(std::abs(f.f2(m, 1)) < 1e-10);
    }
  }
}

TEST_CASE("Grunsky route reports unresolved truncation") {
  const ConformalMap map = testing::order4_map();
  const Contrast c = Contrast::from_lambda(0.75);
  CHECK(kind_of([&] { compute_fpt_grunsky(map, c, 6, {.max_truncation = 12}); }) == ErrorKind::Resolution);
  CHECK(kind_of([&] { compute_fpt_grunsky(map, c, 0); }) == ErrorKind::Input);
}

TEST_CASE("Faber expansion reproduces the polynomial") {
  const ConformalMap map = testing::order4_map();
  const FaberBasis basis = faber_coefficients(map, 4);
  const Polynomial2 h = Polynomial2::re_power(3) * 0.7 + Polynomial2::im_power(2) + Polynomial2::re_power(1) * -0.4 +
                        Polynomial2::constant(0.25);
  const HarmonicExpansion ex = expand_in_faber(h, basis);
  for (cplx z : {cplx(0.3, 0.1), cplx(-1.2, 2.0)}) {
    cplx acc(ex.constant);
    for (int m = 1; m <= 3; ++m) acc += ex.alpha[m - 1] * basis.evaluate(m, z) + ex.beta[m - 1] * std::conj(basis.evaluate(m, z));
    CHECK(std::abs(acc - h.value(z)) < 1e-13);
  }
  CHECK(kind_of([&] { expand_in_faber(Polynomial2::monomial({2, 0}), basis); }) == ErrorKind::Input);
}

TEST_CASE("map inversion") {
  const ConformalMap map = testing::order4_map();
  for (cplx w : {cplx(1.01, 0.0), cplx(-0.8, 0.9), cplx(3.0, -4.0), cplx(0.0, -1.0)}) {
    CHECK(std::abs(invert_map(map, map(w)) - w) < 1e-12 * std::abs(w));
  }
  CHECK(kind_of([&] { invert_map(map, map.coeff(0)); }) == ErrorKind::Domain);
}

TEST_CASE("multipole and geometric fields of a disk") {
  const ConformalMap map = ConformalMap::identity();
  const BoundaryMesh disk = mesh_from_map(map, 128);
  const Polynomial2 x1 = Polynomial2::re_power(1);
  for (double s0 : {10.0, 0.5}) {
    const Contrast c = Contrast::from_sigma0(s0);
    const GptTable t = compute_gpt_table(disk, c, 4);
    const FptMatrices f = compute_fpt_grunsky(map, c, 4);
    for (cplx z : {cplx(3.0, 0.0), cplx(-0.2, 1.1)}) {
      const double want = z.real() - (s0 - 1.0) / (s0 + 1.0) * z.real() / std::norm(z);
      CHECK(geometric_field(f, map, x1, z).value == doctest::Approx(want).epsilon(1e-12));
      if (std::abs(z) > t.radius) {
        CHECK(multipole_field(t, x1, z).value == doctest::Approx(want).epsilon(1e-11));
      } else {
        CHECK(kind_of([&] { multipole_field(t, x1, z); }) == ErrorKind::Domain);
      }
    }
    CHECK(geometric_field(f, map, Polynomial2::constant(1.5), 2.0).value == 1.5);
  }
}

TEST_CASE("geometric field on a non-circular map") {
  const ConformalMap map = testing::order4_map().transformed(0.0, 0.3, 1.4);
  const BoundaryMesh mesh = mesh_from_map(map, 512);
  const Polynomial2 h = Polynomial2::re_power(2) + Polynomial2::im_power(1) * 0.3;
  for (double lambda : {0.5, -0.5, 0.9}) {
    const Contrast c = Contrast::from_lambda(lambda);
    const FptMatrices f = compute_fpt_grunsky(map, c, 30);
    for (double r : {1.05, 1.3, 2.0}) {
      for (int j = 0; j < 6; ++j) {
        const cplx z = map(std::polar(r * map.gamma(), 2.0 * kPi * j / 6 + 0.2));
        const double want = solve_exterior(mesh, c, h, z).value;
        CHECK(geometric_field(f, map, h, z).value == doctest::Approx(want).epsilon(1e-8).scale(1.0));
      }
    }
  }
}
