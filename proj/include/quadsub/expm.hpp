#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace quadsub {

// Dense matrix exponential, scaling-and-squaring Padé. Suitable for the
// highly non-normal Galerkin matrices here (no eigendecomposition involved).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  return m.exp();
}

}  // namespace quadsub
