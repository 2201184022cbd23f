#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "quadsub/core.hpp"
#include "quadsub/fit.hpp"
#include "quadsub/singular.hpp"

namespace quadsub {

/// Time average of Re q along the Im q Hamilton flow, as a quadratic form.
struct AveragedForm {
  double t;
  RealQuadForm form;
};

namespace detail {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 5> kGlNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659,
    0.6794095682990244062343274, 0.8650633666889845107320967,
    0.9739065285171717200779640};
inline constexpr std::array<double, 5> kGlWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269,
    0.2190863625159820439955349, 0.1494513491505805931457763,
    0.0666713443086881375935688};

template <typename F>
Mat gauss_legendre_panels(const F& integrand, double t_end, int panels, int dim) {
  Mat acc = Mat::Zero(dim, dim);
  const double h = t_end / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) {
      const double dx = 0.5 * h * kGlNodes[k];
      acc += kGlWeights[k] * (integrand(mid - dx) + integrand(mid + dx));
    }
  }
  return (0.5 * h) * acc;
}

}  // namespace detail

// Integral over [0, t] of exp(2sF_im)^T Q_re exp(2sF_im), by composite
// Gauss-Legendre with panel doubling until the relative Frobenius change
// drops below 1e-11. The reversed variant uses the flow of -Im q.
inline AveragedForm averaged_form(const QuadraticSymbol& q, double t,
                                  bool reversed = false) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("averaged_form: t must lie in [0, 1]");
  const int d = q.dim();
  if (t == 0.0) return AveragedForm{0.0, RealQuadForm(Mat::Zero(d, d))};

  const Mat fim = (reversed ? -1.0 : 1.0) * poisson_matrix(q.n()) * q.q_im();
  const auto integrand = [&](double s) -> Mat {
    const Mat flow = expm(Mat(2.0 * s * fim));
    return flow.transpose() * q.q_re() * flow;
  };

  Mat prev = detail::gauss_legendre_panels(integrand, t, 1, d);
  for (int doubling = 1; doubling <= 16; ++doubling) {
    const Mat cur = detail::gauss_legendre_panels(integrand, t, 1 << doubling, d);
    const double change = (cur - prev).norm();
    if (change <= 1e-11 * (cur.norm() + 1e-300))
      return AveragedForm{t, RealQuadForm(cur)};
    prev = cur;
  }
  throw QuadratureNotConverged("averaged_form: no convergence after 16 doublings");
}

/// Smallest eigenvalue of the averaged form on a t-grid, with a log-log fit.
/// Expected slope is 2 k0 + 1. Requires S = {0}.
inline SlopeFitReport lambda_min_curve(const QuadraticSymbol& q,
                                       const std::vector<double>& t_grid,
                                       bool reversed = false) {
  if (t_grid.empty() || !(t_grid.front() > 0.0) || t_grid.back() > 0.1)
    throw std::invalid_argument("lambda_min_curve: grid must lie in (0, 0.1]");
  const SingularReport sr = singular_report(q);
  if (sr.dim_s > 0) throw SingularSpaceNonTrivial(sr.dim_s);
  std::vector<double> values;
  values.reserve(t_grid.size());
  for (double t : t_grid) {
    const Mat j = averaged_form(q, t, reversed).form.matrix();
    Eigen::SelfAdjointEigenSolver<Mat> es(j, Eigen::EigenvaluesOnly);
    values.push_back(es.eigenvalues().minCoeff());
  }
  return fit_loglog(t_grid, values);
}

struct TaylorOrder {
  int j;     // leading power is t^{2j}
  double a;  // leading coefficient, positive
};

// Leading Taylor behavior of s -> Re q(flow_s X) at s = 0: the smallest
// j <= k0 with nonvanishing even coefficient, and that coefficient. All
// coefficients below the leading one must vanish (Re q >= 0 along the flow).
inline TaylorOrder taylor_order(const QuadraticSymbol& q, const Vec& x,
                                double tol = 1e-10) {
  if (std::abs(x.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("taylor_order: X must be a unit vector");
  const int k0 = k0_index(q);

  // c_m = (H_{Im q}^m Re q)(X) / m!
  std::vector<double> coeff;
  RealQuadForm g = q.real_part();
  const RealQuadForm f = q.imag_part();
  double factorial = 1.0;
  for (int m = 0; m <= 2 * k0; ++m) {
    if (m > 0) factorial *= m;
    coeff.push_back(g.value(x) / factorial);
    g = poisson_derivative(g, f);
  }

  for (int j = 0; j <= k0; ++j) {
    if (coeff[2 * j] > tol) {
      for (int m = 0; m < 2 * j; ++m)
        if (std::abs(coeff[m]) > tol)
          throw NoOrderFound("taylor_order: nonvanishing coefficient below the leading order");
      return TaylorOrder{j, coeff[2 * j]};
    }
  }
  throw NoOrderFound("taylor_order: all coefficients through 2 k0 vanish");
}

}  // namespace quadsub
