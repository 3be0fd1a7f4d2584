#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "faberinv/error.hpp"

namespace faberinv {

/// Inclusion conductivity sigma0 against a unit background, with the
/// resolvent parameter lambda = (sigma0 + 1) / (2 (sigma0 - 1)).
/// sigma0 = +inf encodes lambda = 1/2 and sigma0 = 0 encodes lambda = -1/2.
class Contrast {
 public:
  static Contrast from_sigma0(double sigma0) {
    if (std::isnan(sigma0) || sigma0 < 0.0) {
      throw Error(ErrorKind::Contrast, "contrast: sigma0 must lie in [0, inf], got " + std::to_string(sigma0));
    }
    if (sigma0 == 1.0) throw Error(ErrorKind::Contrast, "contrast: sigma0 = 1 gives no inclusion");
    const double lambda = std::isinf(sigma0) ? 0.5 : (sigma0 + 1.0) / (2.0 * (sigma0 - 1.0));
    return Contrast(sigma0, lambda);
  }

  static Contrast from_lambda(double lambda) {
    if (!(std::abs(lambda) >= 0.5) || !std::isfinite(lambda)) {
      throw Error(ErrorKind::Contrast, "contrast: |lambda| must be >= 1/2, got " + std::to_string(lambda));
    }
    double sigma0;
    if (lambda == 0.5) {
      sigma0 = std::numeric_limits<double>::infinity();
    } else if (lambda == -0.5) {
      sigma0 = 0.0;
    } else {
      sigma0 = (2.0 * lambda + 1.0) / (2.0 * lambda - 1.0);
    }
    return Contrast(sigma0, lambda);
  }

  double sigma0() const noexcept { return sigma0_; }
  double lambda() const noexcept { return lambda_; }
  bool extreme() const noexcept { return std::abs(lambda_) == 0.5; }

 private:
  Contrast(double sigma0, double lambda) : sigma0_(sigma0), lambda_(lambda) {}
  double sigma0_;
  double lambda_;
};

}  // namespace faberinv
