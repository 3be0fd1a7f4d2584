#include "faberinv/conformal.hpp"

#include <cmath>
#include <string>

#include "faberinv/error.hpp"

namespace faberinv {

ConformalMap::ConformalMap(double gamma, std::vector<cplx> coeffs) : gamma_(gamma), coeffs_(std::move(coeffs)) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw Error(ErrorKind::Input, "conformal map: gamma must be positive and finite, got " + std::to_string(gamma_));
  }
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (!std::isfinite(coeffs_[n].real()) || !std::isfinite(coeffs_[n].imag())) {
      throw Error(ErrorKind::Input, "conformal map: coefficient a_" + std::to_string(n) + " is not finite");
    }
  }
}

cplx ConformalMap::operator()(cplx w) const {
  // Horner in 1/w for the tail.
  const cplx inv = 1.0 / w;
  cplx tail(0.0);
  for (int n = order(); n >= 1; --n) tail = (tail + coeffs_[n]) * inv;
  return w + coeff(0) + tail;
}

cplx ConformalMap::derivative(cplx w) const {
  const cplx inv = 1.0 / w;
  cplx acc(0.0);
  cplx pw = inv * inv;  // w^{-2}
  for (int n = 1; n <= order(); ++n) {
    acc -= static_cast<double>(n) * coeffs_[n] * pw;
    pw *= inv;
  }
  return 1.0 + acc;
}

cplx ConformalMap::second_derivative(cplx w) const {
  const cplx inv = 1.0 / w;
  cplx acc(0.0);
  cplx pw = inv * inv * inv;  // w^{-3}
  for (int n = 1; n <= order(); ++n) {
    acc += static_cast<double>(n) * (n + 1) * coeffs_[n] * pw;
    pw *= inv;
  }
  return acc;
}

ConformalMap ConformalMap::transformed(cplx shift, double angle, double scale) const {
  if (!(scale > 0.0)) throw Error(ErrorKind::Input, "conformal map: scale must be positive");
  const cplx rot = std::polar(scale, angle);
  std::vector<cplx> out(std::max<std::size_t>(coeffs_.size(), 1), cplx(0.0));
  out[0] = shift + rot * coeff(0);
  cplx factor = rot * rot;
  for (int n = 1; n <= order(); ++n) {
    out[n] = coeffs_[n] * factor;
    factor *= rot;
  }
  return ConformalMap(gamma_ * scale, std::move(out));
}

cplx evaluate_map(const ConformalMap& map, cplx w) {
  if (std::abs(w) < map.gamma() * (1.0 - 1e-14)) {
    throw Error(ErrorKind::Domain, "evaluate_map: |w| = " + std::to_string(std::abs(w)) +
                                       " is inside the disk of radius gamma = " + std::to_string(map.gamma()));
  }
  return map(w);
}

cplx FaberBasis::evaluate(int m, cplx z) const {
  const auto& r = rows_.at(m);
  cplx acc(0.0);
  for (int n = m; n >= 0; --n) acc = acc * z + r[n];
  return acc;
}

cplx FaberBasis::derivative(int m, cplx z) const {
  const auto& r = rows_.at(m);
  cplx acc(0.0);
  for (int n = m; n >= 1; --n) acc = acc * z + static_cast<double>(n) * r[n];
  return acc;
}

FaberBasis faber_coefficients(const ConformalMap& map, int order) {
  if (order < 1) throw Error(ErrorKind::Input, "faber_coefficients: order must be >= 1");
  std::vector<std::vector<cplx>> rows(order + 1);
  rows[0] = {cplx(1.0)};
  for (int n = 0; n < order; ++n) {
    std::vector<cplx> next(n + 2, cplx(0.0));
    for (int j = 0; j <= n; ++j) next[j + 1] += rows[n][j];  // z F_n
    next[0] -= static_cast<double>(n) * map.coeff(n);
    for (int s = 0; s <= n; ++s) {
      const cplx as = map.coeff(s);
      if (as == cplx(0.0)) continue;
      const auto& f = rows[n - s];
      for (std::size_t j = 0; j < f.size(); ++j) next[j] -= as * f[j];
    }
    next[n + 1] = cplx(1.0);  // monic by construction; pin it exactly
    rows[n + 1] = std::move(next);
  }
  return FaberBasis(std::move(rows));
}

namespace {

// Laurent series in w with powers in [-floor, top], stored at index p + floor.
struct Laurent {
  int floor = 0;
  int top = 0;
  std::vector<cplx> c;

  Laurent(int floor_, int top_) : floor(floor_), top(top_), c(top_ + floor_ + 1, cplx(0.0)) {}
  cplx& at(int p) { return c[p + floor]; }
  cplx at(int p) const { return (p < -floor || p > top) ? cplx(0.0) : c[p + floor]; }
};

}  // namespace

GrunskyMatrix grunsky_block(const ConformalMap& map, int rows, int cols, std::optional<int> internal_order) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::Input, "grunsky: orders must be >= 1");
  const int floor = internal_order.value_or(rows + cols + 1);
  // Each multiplication by Psi loses one exact negative order; F_m o Psi is exact
  // down to w^{-(floor - m + 1)}.
  if (floor < rows + cols - 1) {
    throw Error(ErrorKind::Resolution, "grunsky: internal Laurent truncation " + std::to_string(floor) +
                                           " cannot resolve c_{mk} for m <= " + std::to_string(rows) +
                                           ", k <= " + std::to_string(cols) + " (need >= " +
                                           std::to_string(rows + cols - 1) + ")");
  }

  const int top = rows;
  Laurent psi(floor, 1);
  psi.at(1) = 1.0;
  for (int n = 0; n <= std::min(map.order(), floor); ++n) psi.at(-n) = map.coeff(n);

  std::vector<Laurent> g;
  g.reserve(rows + 1);
  g.emplace_back(floor, top);
  g[0].at(0) = 1.0;
  for (int n = 0; n < rows; ++n) {
    Laurent next(floor, top);
    // Psi * G_n
    for (int p = -floor; p <= top; ++p) {
      const cplx gp = g[n].at(p);
      if (gp == cplx(0.0)) continue;
      for (int q = -floor; q <= 1; ++q) {
        const int r = p + q;
        if (r < -floor || r > top) continue;
        next.at(r) += gp * psi.at(q);
      }
    }
    next.at(0) -= static_cast<double>(n) * map.coeff(n);
    for (int s = 0; s <= n; ++s) {
      const cplx as = map.coeff(s);
      if (as == cplx(0.0)) continue;
      for (int p = -floor; p <= top; ++p) next.at(p) -= as * g[n - s].at(p);
    }
    g.push_back(std::move(next));
  }

  Eigen::MatrixXcd c(rows, cols);
  for (int m = 1; m <= rows; ++m) {
    for (int k = 1; k <= cols; ++k) c(m - 1, k - 1) = g[m].at(-k);
  }
  return GrunskyMatrix(std::move(c), map.gamma());
}

GrunskyMatrix grunsky_matrix(const ConformalMap& map, int order, std::optional<int> internal_order) {
  return grunsky_block(map, order, order, internal_order);
}

}  // namespace faberinv
