#pragma once

#include <optional>
#include <vector>

#include "quadsub/core.hpp"

namespace quadsub {

/// Orthonormal basis of a subspace of R^{2n}; dim == columns.cols().
struct SubspaceBasis {
  Mat columns;
  int dim;
};

struct SingularReport {
  int dim_s = 0;
  std::optional<int> k0;          // empty when S != {0}
  std::vector<int> ranks;         // rank of the stacked block through power j
};

namespace detail {

// Stacked matrix [Q_re; Q_re M; ...; Q_re M^j_max] with M = Im F. Its kernel
// equals the intersection of Ker[Re F (Im F)^j] over j (J is invertible).
inline Mat stacked_kalman(const QuadraticSymbol& q, int j_max) {
  const int d = q.dim();
  const Mat fim = poisson_matrix(q.n()) * q.q_im();
  Mat stacked(d * (j_max + 1), d);
  Mat power = Mat::Identity(d, d);
  for (int j = 0; j <= j_max; ++j) {
    stacked.middleRows(j * d, d) = q.q_re() * power;
    if (j < j_max) power = fim * power;
  }
  return stacked;
}

inline int svd_rank(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

// Orthonormal kernel basis (right singular vectors past the rank).
inline SubspaceBasis svd_kernel(const Mat& m, double tol) {
  const int d = static_cast<int>(m.cols());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = (s.size() > 0) ? s(0) : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > tol * smax) ++r;
  return SubspaceBasis{svd.matrixV().rightCols(d - r), d - r};
}

inline void check_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-4)
    throw std::invalid_argument("rank tolerance must lie in (0, 1e-4]");
}

}  // namespace detail

/// Per-step ranks of the stacked blocks, the dimension of S, and k0.
inline SingularReport singular_report(const QuadraticSymbol& q, double tol = 1e-10) {
  detail::check_tol(tol);
  const int d = q.dim();
  SingularReport report;
  report.ranks.reserve(d);
  for (int j = 0; j <= d - 1; ++j) {
    const int r = detail::svd_rank(detail::stacked_kalman(q, j), tol);
    report.ranks.push_back(r);
    if (!report.k0 && r == d) report.k0 = j;
  }
  report.dim_s = d - report.ranks.back();
  return report;
}

/// Orthonormal basis of the singular space S (kernel intersection form).
inline SubspaceBasis singular_space(const QuadraticSymbol& q, double tol = 1e-10) {
  detail::check_tol(tol);
  return detail::svd_kernel(detail::stacked_kalman(q, q.dim() - 1), tol);
}

/// Smallest j with the stacked block through power j of full rank.
/// Requires S = {0}.
inline int k0_index(const QuadraticSymbol& q, double tol = 1e-10) {
  const SingularReport report = singular_report(q, tol);
  if (report.dim_s > 0) throw SingularSpaceNonTrivial(report.dim_s);
  return *report.k0;
}

// S through the flow characterization: joint kernel of the iterated Poisson
// derivatives G_0 = Re q, G_{k+1} = H_{Im q} G_k. Truncation at 2n-1 suffices
// (Cayley-Hamilton on Im F), but any k_max >= 2n-1 is accepted.
inline SubspaceBasis singular_space_dynamic(const QuadraticSymbol& q, double tol = 1e-10,
                                            int k_max = -1) {
  detail::check_tol(tol);
  const int d = q.dim();
  if (k_max < 0) k_max = d - 1;
  if (k_max < d - 1)
    throw std::invalid_argument("singular_space_dynamic: k_max must be >= 2n-1");
  Mat stacked(d * (k_max + 1), d);
  RealQuadForm g = q.real_part();
  const RealQuadForm f = q.imag_part();
  for (int k = 0; k <= k_max; ++k) {
    stacked.middleRows(k * d, d) = g.matrix();
    if (k < k_max) g = poisson_derivative(g, f);
  }
  return detail::svd_kernel(stacked, tol);
}

/// Largest principal angle between two column spans, in radians.
inline double principal_angle_gap(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) return M_PI / 2.0;
  if (a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(Mat(a.transpose() * b));
  const double c = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(c);
}

}  // namespace quadsub
