#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "faberinv/conformal.hpp"
#include "faberinv/error.hpp"
#include "faberinv/mesh.hpp"
#include "faberinv/spectral.hpp"
#include "support.hpp"

using namespace faberinv;
using testing::laurent_coeff;

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

}  // namespace

TEST_CASE("map evaluation") {
  const ConformalMap id = ConformalMap::identity();
  CHECK(std::abs(evaluate_map(id, cplx(1.3, -0.4)) - cplx(1.3, -0.4)) < 1e-15);

  const ConformalMap joukowski(1.0, {0.0, 0.5});
  CHECK(std::abs(evaluate_map(joukowski, 1.0) - 1.5) < 1e-15);
  CHECK(std::abs(evaluate_map(joukowski, cplx(0.0, 2.0)) - cplx(0.0, 1.75)) < 1e-15);
  CHECK(kind_of([&] { evaluate_map(joukowski, 0.5); }) == ErrorKind::Domain);
  CHECK(kind_of([] { ConformalMap(0.0, {}); }) == ErrorKind::Input);
  CHECK(kind_of([] { ConformalMap(1.0, {cplx(NAN, 0.0)}); }) == ErrorKind::Input);

  const ConformalMap m = testing::order4_map();
  const cplx w(1.4, 0.7);
  const double h = 1e-6;
  CHECK(std::abs((m(w + h) - m(w - h)) / (2.0 * h) - m.derivative(w)) < 1e-8);
  CHECK(std::abs((m.derivative(w + h) - m.derivative(w - h)) / (2.0 * h) - m.second_derivative(w)) < 1e-8);
}

TEST_CASE("transformed maps trace the moved curve") {
  const ConformalMap m = testing::order4_map();
  const cplx shift(0.4, -1.1);
  const double angle = 0.7;
  const double scale = 1.8;
  const ConformalMap t = m.transformed(shift, angle, scale);
  CHECK(t.gamma() == doctest::Approx(scale * m.gamma()));
  for (int j = 0; j < 16; ++j) {
    const cplx w = std::polar(1.0, 2.0 * kPi * j / 16);
    const cplx moved = shift + std::polar(scale, angle) * m(w);
    CHECK(std::abs(t(std::polar(scale, angle) * w) - moved) < 1e-13);
  }
}

TEST_CASE("Faber polynomials are monic with known low orders") {
  const ConformalMap m = testing::order4_map();
  const FaberBasis f = faber_coefficients(m, 8);
  const cplx a0 = m.coeff(0);
  const cplx a1 = m.coeff(1);
  for (int k = 0; k <= 8; ++k) CHECK(std::abs(f.coeff(k, k) - 1.0) < 1e-15);
  CHECK(std::abs(f.coeff(1, 0) + a0) < 1e-15);
  CHECK(std::abs(f.coeff(2, 1) + 2.0 * a0) < 1e-15);
  CHECK(std::abs(f.coeff(2, 0) - (a0 * a0 - 2.0 * a1)) < 1e-15);

  const FaberBasis j = faber_coefficients(ConformalMap(1.0, {0.0, 0.5}), 2);
  CHECK(std::abs(j.evaluate(2, 1.0) - 0.0) < 1e-15);
}

TEST_CASE("F_m(Psi(w)) has no non-negative powers besides w^m") {
  const ConformalMap m = testing::order4_map();
  const int order = 7;
  const FaberBasis f = faber_coefficients(m, order);
  for (int k = 1; k <= order; ++k) {
    auto fk = [&](cplx w) { return f.evaluate(k, m(w)); };
    for (int p = 0; p <= order; ++p) {
      const cplx c = laurent_coeff(fk, p, 1.5);
      CHECK(std::abs(c - (p == k ? 1.0 : 0.0)) < 1e-11);
    }
  }
}

TEST_CASE("Grunsky coefficients match Laurent coefficients of F_m(Psi(w))") {
  for (const ConformalMap& m : {testing::order4_map(), testing::order4_map().transformed(0.3, 0.4, 1.7)}) {
    const int order = 6;
    const GrunskyMatrix c = grunsky_matrix(m, order);
    const FaberBasis f = faber_coefficients(m, order);
    for (int mm = 1; mm <= order; ++mm) {
      auto fm = [&](cplx w) { return f.evaluate(mm, m(w)); };
      for (int k = 1; k <= order; ++k) {
        const cplx want = laurent_coeff(fm, -k, 1.3 * m.gamma(), 1024);
        CHECK(std::abs(c(mm, k) - want) < 1e-10 * std::max(1.0, std::pow(m.gamma(), mm + k)));
      }
    }
  }
}

TEST_CASE("Grunsky matrix properties") {
  SUBCASE("identity map") {
    const GrunskyMatrix c = grunsky_matrix(ConformalMap::identity(2.0), 5);
    CHECK(c.matrix().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("first row holds the map coefficients") {
    const ConformalMap m = testing::order4_map();
    const GrunskyMatrix c = grunsky_matrix(m, 6);
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(c(1, k) - m.coeff(k)) < 1e-15);
  }
  SUBCASE("ellipse map is diagonal with powers of a_1") {
    const cplx q(0.3, 0.2);
    const GrunskyMatrix c = grunsky_matrix(ConformalMap(1.0, {0.0, q}), 6);
    for (int mm = 1; mm <= 6; ++mm) {
      for (int k = 1; k <= 6; ++k) {
        const cplx want = mm == k ? std::pow(q, mm) : cplx(0.0);
        CHECK(std::abs(c(mm, k) - want) < 1e-14);
      }
    }
  }
  SUBCASE("symmetry k c_mk = m c_km") {
    const GrunskyMatrix c = grunsky_matrix(testing::order4_map().transformed(0.0, 1.1, 1.3), 8);
    for (int mm = 1; mm <= 8; ++mm) {
      for (int k = 1; k <= 8; ++k) {
        CHECK(std::abs(static_cast<double>(k) * c(mm, k) - static_cast<double>(mm) * c(k, mm)) < 1e-12);
      }
    }
  }
  SUBCASE("insufficient internal order") {
    CHECK(kind_of([] { grunsky_matrix(testing::order4_map(), 6, 5); }) == ErrorKind::Resolution);
    CHECK_NOTHROW(grunsky_matrix(testing::order4_map(), 6, 11));
  }
}

TEST_CASE("disk and ellipse meshes from maps") {
  const BoundaryMesh disk = mesh_from_map(ConformalMap::identity(2.0), 64);
  CHECK(disk.perimeter() == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  CHECK(disk.signed_area() == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  for (int j = 0; j < disk.size(); ++j) {
    CHECK(std::abs(disk.normals[j] - disk.points[j] / 2.0) < 1e-14);
    CHECK(disk.curvature[j] == doctest::Approx(0.5));
    CHECK(std::abs(disk.normals[j] - cplx(0.0, -1.0) * disk.tangents[j]) < 1e-15);
  }

  // Psi(w) = w + 0.5/w on |w| = 1 traces the ellipse with semi-axes 1.5 and 0.5.
  const BoundaryMesh ell = mesh_from_map(ConformalMap(1.0, {0.0, 0.5}), 128);
  CHECK(ell.points.real().maxCoeff() == doctest::Approx(1.5));
  CHECK(ell.points.imag().maxCoeff() == doctest::Approx(0.5));
  CHECK(ell.signed_area() == doctest::Approx(kPi * 1.5 * 0.5).epsilon(1e-12));

  // Area of a univalent image: pi (gamma^2 - sum n |a_n|^2 / gamma^{2n}).
  const ConformalMap m = testing::order4_map().transformed(0.0, 0.0, 1.4);
  double area = m.gamma() * m.gamma();
  for (int n = 1; n <= m.order(); ++n) area -= n * std::norm(m.coeff(n)) / std::pow(m.gamma(), 2 * n);
  CHECK(mesh_from_map(m, 256).signed_area() == doctest::Approx(kPi * area).epsilon(1e-12));
}

TEST_CASE("invalid curves are rejected") {
  CHECK(kind_of([] { mesh_from_map(ConformalMap(1.0, {0.0, 0.0, 0.9}), 64); }) == ErrorKind::Geometry);
  CHECK(kind_of([] { mesh_from_map(ConformalMap(1.0, {0.0, 1.5}), 64); }) == ErrorKind::Geometry);
  CHECK(kind_of([] { mesh_from_map(ConformalMap::identity(), 33); }) == ErrorKind::Input);
  CHECK(kind_of([] { mesh_from_map(ConformalMap::identity(), 16); }) == ErrorKind::Input);
  CHECK(kind_of([] { mesh_from_parametric(ShapeKind::PerturbedCircle, {{"amplitude", 1.2}}, 64); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_shape_kind("triangle"); }) == ErrorKind::Input);
}

TEST_CASE("ellipse perimeter against independent quadrature") {
  const double a = 2.0;
  const double b = 1.0;
  auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
  const double kronrod = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, 0.0, 2.0 * kPi, 15, 1e-14);
  const double elliptic = 4.0 * a * std::comp_ellint_2(std::sqrt(1.0 - b * b / (a * a)));
  CHECK(kronrod == doctest::Approx(9.688448).epsilon(1e-7));
  CHECK(elliptic == doctest::Approx(kronrod).epsilon(1e-13));

  const BoundaryMesh mesh = mesh_from_parametric(ShapeKind::Ellipse, {{"a", a}, {"b", b}}, 128);
  CHECK(mesh.perimeter() == doctest::Approx(elliptic).epsilon(1e-13));
  double prev = 1.0;
  for (int n : {8, 16, 32}) {
    const double err = std::abs(mesh_from_parametric(ShapeKind::Ellipse, {{"a", a}, {"b", b}}, n).perimeter() - elliptic);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("built-in shapes") {
  for (ShapeKind kind : {ShapeKind::PerturbedCircle, ShapeKind::Kite, ShapeKind::Cap, ShapeKind::Ellipse}) {
    const BoundaryMesh mesh = mesh_from_parametric(kind, {}, 256);
    CHECK(mesh.signed_area() > 0.0);
    CHECK(mesh.perimeter() > 0.0);
    CHECK(parse_shape_kind(to_string(kind)) == kind);
    // Normals are unit, outward and orthogonal to tangents.
    for (int j = 0; j < mesh.size(); ++j) {
      CHECK(std::abs(std::abs(mesh.normals[j]) - 1.0) < 1e-13);
      CHECK(std::abs((mesh.normals[j] * std::conj(mesh.tangents[j])).real()) < 1e-13);
    }
  }
  const BoundaryMesh circle = mesh_from_parametric(ShapeKind::PerturbedCircle, {{"amplitude", 0.0}}, 64);
  CHECK(circle.perimeter() == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  const auto cap = parametric_curve(ShapeKind::Cap, {});
  CHECK(cap->metadata.count("rounding_radius") == 1);

  const BoundaryMesh moved = mesh_from_parametric(ShapeKind::Kite, {{"cx", 1.0}, {"cy", -2.0}, {"scale", 2.0}}, 256);
  const BoundaryMesh base = mesh_from_parametric(ShapeKind::Kite, {}, 256);
  CHECK(moved.signed_area() == doctest::Approx(4.0 * base.signed_area()).epsilon(1e-12));
  CHECK(std::abs(moved.points[3] - (cplx(1.0, -2.0) + 2.0 * base.points[3])) < 1e-13);
}

TEST_CASE("self-intersection test and point containment") {
  Eigen::VectorXcd bowtie(4);
  bowtie << cplx(0, 0), cplx(1, 1), cplx(1, 0), cplx(0, 1);
  CHECK(find_self_intersection(bowtie).has_value());
  Eigen::VectorXcd square(4);
  square << cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 1);
  CHECK_FALSE(find_self_intersection(square).has_value());

  const BoundaryMesh disk = mesh_from_map(ConformalMap::identity(), 64);
  CHECK(contains_point(disk, 0.3));
  CHECK_FALSE(contains_point(disk, 1.2));
}

TEST_CASE("Fourier remeshing and Hausdorff distance") {
  double prev_perimeter = 1.0;
  double prev_speed = 1.0;
  for (int n : {128, 256, 512}) {
    const BoundaryMesh kite = mesh_from_parametric(ShapeKind::Kite, {}, n);
    const FourierCurve curve = FourierCurve::interpolate(kite.points);
    const BoundaryMesh re = remesh_arclength(*curve.as_curve("kite"), n);
    const double perimeter_err = std::abs(re.perimeter() - kite.perimeter());
    const double speed_err = (re.speed.array() - re.speed.mean()).abs().maxCoeff() / re.speed.mean();
    CHECK(perimeter_err < 1e-2 * prev_perimeter);
    CHECK(speed_err < 0.1 * prev_speed);
    CHECK(hausdorff_distance(re, kite) < kite.max_spacing());
    prev_perimeter = perimeter_err;
    prev_speed = speed_err;
  }
  CHECK(prev_perimeter < 1e-10);
  CHECK(prev_speed < 1e-5);

  const BoundaryMesh r1 = mesh_from_map(ConformalMap::identity(1.0), 64);
  const BoundaryMesh r2 = mesh_from_map(ConformalMap::identity(1.25), 64);
  CHECK(hausdorff_distance(r1, r2) == doctest::Approx(0.25));
}

TEST_CASE("spectral helpers") {
  const int n = 32;
  Eigen::VectorXd f(n);
  Eigen::VectorXd df(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    f[j] = std::sin(3.0 * t) + std::cos(t);
    df[j] = 3.0 * std::cos(3.0 * t) - std::sin(t);
  }
  CHECK((spectral::differentiate(f) - df).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((spectral::differentiation_matrix(n) * f - df).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXd back = spectral::integrate_mean_free(df);
  CHECK((back.array() - back[0] - (f.array() - f[0])).abs().maxCoeff() < 1e-12);

  // int_0^{2pi} ln(4 sin^2(s/2)) ds = 0 and the cos(s) moment equals -2 pi.
  const Eigen::VectorXd r = spectral::log_quadrature_weights(n);
  CHECK(std::abs(r.sum()) < 1e-12);
  double c = 0.0;
  for (int j = 0; j < n; ++j) c += r[j] * std::cos(2.0 * kPi * j / n);
  CHECK(c == doctest::Approx(-2.0 * kPi));
}
