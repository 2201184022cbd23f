#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "quadsub/errors.hpp"
#include "quadsub/expm.hpp"

namespace quadsub {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline Mat sym_part(const Mat& m) { return 0.5 * (m + m.transpose()); }
inline CMat sym_part(const CMat& m) { return 0.5 * (m + m.transpose()); }

// Phase-space convention, fixed once for the whole library:
// coordinates X = (x, xi) with the position block first, and
// sigma(X, Y) = X^T J Y = xi.y - x.eta.
inline Mat symplectic_matrix(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return j;
}

// J^{-1} = -J = [[0, I], [-I, 0]]; multiplying a form matrix by this on the
// left gives the matrix of the Hamilton vector field (up to the factor 2).
inline Mat poisson_matrix(int n) { return -symplectic_matrix(n); }

inline double sigma_of(const Vec& x, const Vec& y) {
  const int n = static_cast<int>(x.size()) / 2;
  return x.dot(symplectic_matrix(n) * y);
}

inline Complex sigma_of(const CVec& x, const CVec& y) {
  const int n = static_cast<int>(x.size()) / 2;
  return x.transpose() * symplectic_matrix(n).cast<Complex>() * y;
}

/// Real quadratic form X -> X^T G X with G symmetric 2n x 2n.
class RealQuadForm {
 public:
  RealQuadForm() = default;
  explicit RealQuadForm(Mat g) : g_(sym_part(g)) {
    if (g_.rows() != g_.cols() || g_.rows() % 2 != 0)
      throw std::invalid_argument("RealQuadForm: matrix must be 2n x 2n");
  }

  const Mat& matrix() const { return g_; }
  int n() const { return static_cast<int>(g_.rows()) / 2; }
  double value(const Vec& x) const { return x.dot(g_ * x); }

 private:
  Mat g_;
};

/**
 * Complex quadratic symbol q on R^{2n}, stored as the pair of real symmetric
 * matrices (Q_re, Q_im). Inputs are symmetrized on construction; Re q must be
 * positive semi-definite (eigenvalues >= -1e-10 * ||Q_re||).
 */
class QuadraticSymbol {
 public:
  QuadraticSymbol(int n, Mat q_re, Mat q_im)
      : n_(n), q_re_(sym_part(q_re)), q_im_(sym_part(q_im)) {
    if (n <= 0) throw std::invalid_argument("QuadraticSymbol: n must be positive");
    const auto dim = static_cast<Eigen::Index>(2 * n);
    if (q_re_.rows() != dim || q_re_.cols() != dim || q_im_.rows() != dim ||
        q_im_.cols() != dim)
      throw std::invalid_argument("QuadraticSymbol: matrices must be 2n x 2n");
    Eigen::SelfAdjointEigenSolver<Mat> es(q_re_, Eigen::EigenvaluesOnly);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw std::invalid_argument(
          "QuadraticSymbol: the real part must be positive semi-definite");
  }

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  const Mat& q_re() const { return q_re_; }
  const Mat& q_im() const { return q_im_; }
  CMat q() const { return q_re_.cast<Complex>() + Complex(0, 1) * q_im_.cast<Complex>(); }

  RealQuadForm real_part() const { return RealQuadForm(q_re_); }
  RealQuadForm imag_part() const { return RealQuadForm(q_im_); }

  Complex value(const Vec& x) const { return Complex(x.dot(q_re_ * x), x.dot(q_im_ * x)); }

  /// Conjugate symbol, q -> conj(q).
  QuadraticSymbol conjugate() const { return QuadraticSymbol(n_, q_re_, -q_im_); }
  QuadraticSymbol scaled(double c) const { return QuadraticSymbol(n_, c * q_re_, c * q_im_); }

 private:
  int n_;
  Mat q_re_, q_im_;
};

/// The sigma-skew map F with q(X,Y) = sigma(X, FY); F = J^{-1} Q.
struct HamiltonMap {
  Mat re, im;

  CMat matrix() const { return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>(); }
  int n() const { return static_cast<int>(re.rows()) / 2; }
};

inline HamiltonMap hamilton_map(const QuadraticSymbol& q) {
  const Mat jinv = poisson_matrix(q.n());
  return HamiltonMap{jinv * q.q_re(), jinv * q.q_im()};
}

inline Mat hamilton_matrix(const RealQuadForm& f) {
  return poisson_matrix(f.n()) * f.matrix();
}

// Poisson derivative H_f g of one quadratic form along another. With
// F_f = J^{-1} G_f, the matrix of H_f g is 2 (G F_f + F_f^T G).
inline RealQuadForm poisson_derivative(const RealQuadForm& g, const RealQuadForm& f) {
  if (g.n() != f.n())
    throw std::invalid_argument("poisson_derivative: dimension mismatch");
  const Mat ff = hamilton_matrix(f);
  return RealQuadForm(2.0 * (g.matrix() * ff + ff.transpose() * g.matrix()));
}

/// Time-t flow of the Hamilton field of f, exp(2t F_f). Symplectic.
inline Mat hamiltonian_flow(const RealQuadForm& f, double t) {
  return expm(Mat(2.0 * t * hamilton_matrix(f)));
}

/// Complex linear map on C^{2n} preserving sigma.
struct CanonicalTransform {
  CMat a;

  int n() const { return static_cast<int>(a.rows()) / 2; }

  double sigma_residual() const {
    const CMat j = symplectic_matrix(n()).cast<Complex>();
    return (a.transpose() * j * a - j).cwiseAbs().maxCoeff();
  }
};

}  // namespace quadsub
