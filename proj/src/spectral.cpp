#include "faberinv/spectral.hpp"

#include <cmath>
#include <numbers>

#include "faberinv/error.hpp"

namespace faberinv::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

void require_even(int n, const char* who) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::Input, std::string(who) + ": periodic grid size must be even, got " +
                                      std::to_string(n));
  }
}

}  // namespace

std::vector<cplx> trig_coefficients(const Eigen::VectorXcd& values) {
  const int n = static_cast<int>(values.size());
  require_even(n, "trig_coefficients");
  const int half = n / 2;
  std::vector<cplx> coeffs(n + 1, cplx(0.0));
  for (int k = -half; k < half; ++k) {
    cplx acc(0.0);
    for (int j = 0; j < n; ++j) {
      const double angle = -2.0 * kPi * k * j / n;
      acc += values[j] * cplx(std::cos(angle), std::sin(angle));
    }
    coeffs[k + half] = acc / static_cast<double>(n);
  }
  // Split the Nyquist mode so the interpolant of real data stays real.
  coeffs[0] *= 0.5;
  coeffs[n] = coeffs[0];
  return coeffs;
}

Eigen::MatrixXd differentiation_matrix(int n) {
  require_even(n, "differentiation_matrix");
  const double h = 2.0 * kPi / n;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int diff = i - j;
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sign / std::tan(0.5 * diff * h);
    }
  }
  return d;
}

Eigen::VectorXd differentiate(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  require_even(n, "differentiate");
  const double h = 2.0 * kPi / n;
  Eigen::VectorXd cot_row(n);
  cot_row[0] = 0.0;
  for (int d = 1; d < n; ++d) {
    cot_row[d] = 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) / std::tan(0.5 * d * h);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const int d = ((i - j) % n + n) % n;
      acc += cot_row[d] * values[j];
    }
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd integrate_mean_free(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  require_even(n, "integrate_mean_free");
  const auto coeffs = trig_coefficients(values.cast<cplx>());
  const int half = n / 2;
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    cplx acc(0.0);
    for (int k = -half + 1; k < half; ++k) {
      if (k == 0) continue;
      acc += coeffs[k + half] / cplx(0.0, k) * std::polar(1.0, k * t);
    }
    // The split Nyquist pair integrates to a sine term.
    const cplx ny = coeffs[0];
    acc += ny / cplx(0.0, half) * std::polar(1.0, half * t) - ny / cplx(0.0, half) * std::polar(1.0, -half * t);
    out[j] = acc.real();
  }
  out.array() -= out[0];
  return out;
}

Eigen::VectorXd log_quadrature_weights(int n) {
  require_even(n, "log_quadrature_weights");
  const int half = n / 2;
  Eigen::VectorXd r(n);
  for (int d = 0; d < n; ++d) {
    const double t = 2.0 * kPi * d / n;
    double acc = 0.0;
    for (int m = 1; m < half; ++m) acc += std::cos(m * t) / m;
    r[d] = -(2.0 * kPi / half) * acc - (kPi / (static_cast<double>(half) * half)) * std::cos(half * t);
  }
  return r;
}

}  // namespace faberinv::spectral
