#pragma once

#include <cmath>

#include "quadsub/core.hpp"

namespace quadsub {

// Fixed Bargmann phase phi(x, y) = (i/2)(x.x + y.y) - i sqrt(2) x.y on
// C^n_x x C^n_y. It induces the weight phi0(x) = |x|^2 / 2 and the canonical
// map kappa(y, eta) = ((y - i eta)/sqrt(2), (eta - i y)/sqrt(2)), which sends
// R^{2n} onto the graph {(x, -i conj(x))}.
inline Complex bargmann_phase(const CVec& x, const CVec& y) {
  const Complex i(0, 1);
  const Complex xx = x.transpose() * x;
  const Complex yy = y.transpose() * y;
  const Complex xy = x.transpose() * y;
  return 0.5 * i * (xx + yy) - i * std::sqrt(2.0) * xy;
}

inline double phi0_value(const CVec& x) { return 0.5 * x.squaredNorm(); }

inline CanonicalTransform bargmann_transform(int n) {
  const Complex i(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  CMat a = CMat::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = s * CMat::Identity(n, n);
  a.topRightCorner(n, n) = -i * s * CMat::Identity(n, n);
  a.bottomLeftCorner(n, n) = -i * s * CMat::Identity(n, n);
  a.bottomRightCorner(n, n) = s * CMat::Identity(n, n);
  return CanonicalTransform{a};
}

inline CanonicalTransform bargmann_inverse(int n) {
  const Complex i(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  CMat a = CMat::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = s * CMat::Identity(n, n);
  a.topRightCorner(n, n) = i * s * CMat::Identity(n, n);
  a.bottomLeftCorner(n, n) = i * s * CMat::Identity(n, n);
  a.bottomRightCorner(n, n) = s * CMat::Identity(n, n);
  return CanonicalTransform{a};
}

/// Matrix of the conjugated symbol q o kappa^{-1}, complex symmetric.
inline CMat conjugate_by_bargmann(const QuadraticSymbol& q) {
  const CMat binv = bargmann_inverse(q.n()).a;
  return sym_part(CMat(binv.transpose() * q.q() * binv));
}

/// Value of a conjugated symbol at a point of C^{2n} (complex bilinear).
inline Complex symbol_value(const CMat& q_matrix, const CVec& z) {
  return z.transpose() * q_matrix * z;
}

}  // namespace quadsub
