#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "quadsub/bargmann.hpp"
#include "quadsub/core.hpp"
#include "quadsub/fit.hpp"

namespace quadsub {

/// Real quadratic form G_t tilting the Lagrangian plane X + i H_{G_t} X.
struct WeightForm {
  double t;
  Mat gamma;  // symmetric 2n x 2n

  int n() const { return static_cast<int>(gamma.rows()) / 2; }
};

/// Weight on C^n in (Re x, Im x) coordinates; the t = 0 weight is I/2.
struct PhiForm {
  double t;
  Mat p;  // symmetric 2n x 2n over (Re x, Im x)

  int n() const { return static_cast<int>(p.rows()) / 2; }
  double value(const CVec& x) const {
    Vec w(p.rows());
    w << x.real(), x.imag();
    return w.dot(p * w);
  }
};

namespace detail {

// Right side of the weight evolution: Q_re plus the transport term along
// Im q minus the quadratic damping Re q(H_Gamma, .). Backward evolution is
// forward evolution of -q.
inline Mat riccati_rhs(const Mat& gamma, const Mat& q_re, const Mat& fim,
                       const Mat& jinv, double sign) {
  const Mat fg = jinv * gamma;
  return sign * q_re + 2.0 * (gamma * fim + fim.transpose() * gamma) -
         4.0 * sign * fg.transpose() * q_re * fg;
}

inline void rk4_step(Mat& gamma, double h, const Mat& q_re, const Mat& fim,
                     const Mat& jinv, double sign) {
  const Mat k1 = riccati_rhs(gamma, q_re, fim, jinv, sign);
  const Mat k2 = riccati_rhs(Mat(gamma + 0.5 * h * k1), q_re, fim, jinv, sign);
  const Mat k3 = riccati_rhs(Mat(gamma + 0.5 * h * k2), q_re, fim, jinv, sign);
  const Mat k4 = riccati_rhs(Mat(gamma + h * k3), q_re, fim, jinv, sign);
  gamma += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

// Weight evolution by classical RK4 with fixed step h from Gamma(0) = 0,
// returning snapshots on the requested grid. Throws WeightBlowup once
// ||Gamma|| exceeds 1e6 (t beyond the validity window).
inline std::vector<WeightForm> weight_riccati(const QuadraticSymbol& q,
                                              const std::vector<double>& t_grid,
                                              double h = 1e-4, bool backward = false) {
  if (t_grid.empty()) return {};
  if (!(h > 0.0) || h > 1e-3)
    throw std::invalid_argument("weight_riccati: step must lie in (0, 1e-3]");
  if (t_grid.front() < 0.0 || t_grid.back() > 0.3)
    throw std::invalid_argument("weight_riccati: grid must lie in [0, 0.3]");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] < t_grid[i - 1])
      throw std::invalid_argument("weight_riccati: grid must be non-decreasing");

  const double sign = backward ? -1.0 : 1.0;
  const Mat jinv = poisson_matrix(q.n());
  const Mat fim = sign * jinv * q.q_im();
  const Mat& q_re = q.q_re();

  std::vector<WeightForm> out;
  out.reserve(t_grid.size());
  Mat gamma = Mat::Zero(q.dim(), q.dim());
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0.0) {
      const int steps = static_cast<int>(std::ceil(span / h - 1e-12));
      const double step = span / steps;
      for (int i = 0; i < steps; ++i) {
        detail::rk4_step(gamma, step, q_re, fim, jinv, sign);
        if (gamma.norm() > 1e6) throw WeightBlowup(t + (i + 1) * step, gamma.norm());
      }
      t = target;
    }
    out.push_back(WeightForm{target, sym_part(gamma)});
  }
  return out;
}

// Closed form for real symbols: Gamma = sym(J tan(2tF) / 2), with
// tan(M) = -i (e^{2iM} - I)(e^{2iM} + I)^{-1}.
inline WeightForm weight_closed_form_real(const QuadraticSymbol& q, double t,
                                          double* cos_condition = nullptr) {
  if (q.q_im().cwiseAbs().maxCoeff() > 1e-14 * (1.0 + q.q_re().norm()))
    throw std::invalid_argument("weight_closed_form_real: symbol must be real");
  const int d = q.dim();
  const Mat f = poisson_matrix(q.n()) * q.q_re();
  const CMat e1 = expm(CMat(Complex(0, 1) * (2.0 * t) * f.cast<Complex>()));
  const CMat e2 = e1 * e1;
  const CMat splus = e2 + CMat::Identity(d, d);

  Eigen::PartialPivLU<CMat> lu(splus);
  const CMat sinv = lu.inverse();
  if (sinv.norm() > 1e8)
    throw TanSingular("weight_closed_form_real: tan(2tF) is singular at t=" +
                      std::to_string(t));
  if (cos_condition != nullptr) {
    const CMat cosm = 0.5 * (e1 + CMat(e1.inverse()));
    Eigen::JacobiSVD<CMat> svd(cosm);
    *cos_condition = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  }

  const CMat tanm = Complex(0, -1) * (e2 - CMat::Identity(d, d)) * sinv;
  const Mat j = symplectic_matrix(q.n());
  return WeightForm{t, sym_part(Mat(0.5 * j * tanm.real()))};
}

// Weight extracted from the evolved plane exp(2itF) R^{2n}: with
// U = A + iB and K = B A^{-1}, Gamma solves K = 2 [[0,I],[-I,0]] Gamma.
inline WeightForm lagrangian_weight(const QuadraticSymbol& q, double t,
                                    bool backward = false,
                                    double* a_inverse_norm = nullptr) {
  const int d = q.dim();
  const double sign = backward ? -1.0 : 1.0;
  const CMat f = hamilton_map(q).matrix();
  const CMat u = expm(CMat(Complex(0, sign * 2.0 * t) * f));
  const Mat a = u.real();
  const Mat b = u.imag();

  Eigen::JacobiSVD<Mat> svd(a);
  const double smin = svd.singularValues().tail(1)(0);
  if (smin < 1e-12 * svd.singularValues()(0))
    throw PlaneNotGraph("lagrangian_weight: plane is not a graph at t=" +
                        std::to_string(t));
  if (a_inverse_norm != nullptr) *a_inverse_norm = 1.0 / smin;

  // K A = B, solved as A^T K^T = B^T.
  const Mat k = Eigen::PartialPivLU<Mat>(a.transpose()).solve(b.transpose()).transpose();
  const Mat j = symplectic_matrix(q.n());
  const Mat gamma = sym_part(Mat(0.5 * j * k));

  const double residual = (k - 2.0 * poisson_matrix(q.n()) * gamma).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw PlaneNotGraph("lagrangian_weight: plane is not I-Lagrangian, residual " +
                        std::to_string(residual));
  return WeightForm{t, gamma};
}

// Critical-value reconstruction of the evolved weight from Gamma. The
// stationarity conditions in (Re y, Im y, eta) are linear under the fixed
// Bargmann phase; the critical value is assembled by polarization.
inline PhiForm phi_from_weight(const WeightForm& w) {
  const int n = w.n();
  const int d = 2 * n;
  const double s2 = std::sqrt(2.0);
  const Mat id = Mat::Identity(n, n);
  const Mat g11 = w.gamma.topLeftCorner(n, n);
  const Mat g12 = w.gamma.topRightCorner(n, n);
  const Mat g21 = w.gamma.bottomLeftCorner(n, n);
  const Mat g22 = w.gamma.bottomRightCorner(n, n);

  // Unknowns z = (Re y, Im y, eta); right side is linear in (Re x, Im x).
  Mat sys = Mat::Zero(3 * n, 3 * n);
  sys.block(0, 0, n, n) = id - 2.0 * g11;
  sys.block(0, 2 * n, n, n) = -2.0 * g12;
  sys.block(n, 0, n, n) = -2.0 * g21;
  sys.block(n, n, n, n) = id;
  sys.block(n, 2 * n, n, n) = -2.0 * g22;
  sys.block(2 * n, n, n, n) = id;
  sys.block(2 * n, 2 * n, n, n) = -id;

  Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues().tail(1)(0);
  if (!(smin > 0.0) || smax / smin > 1e10)
    throw DegenerateCriticalPoint("phi_from_weight: stationarity system condition " +
                                  std::to_string(smax / smin));

  Mat rhs = Mat::Zero(3 * n, d);
  rhs.block(0, 0, n, n) = s2 * id;
  rhs.block(2 * n, n, n, n) = s2 * id;
  const Mat crit = svd.solve(rhs);  // (Re y, Im y, eta) as functions of (Re x, Im x)

  const auto critical_value = [&](const Vec& w_in) -> double {
    const Vec z = crit * w_in;
    const Vec a = w_in.head(n), b = w_in.tail(n);
    const Vec u = z.head(n), v = z.segment(n, n), eta = z.tail(n);
    Vec ue(d);
    ue << u, eta;
    const double im_phase = 0.5 * (a.squaredNorm() - b.squaredNorm() +
                                   u.squaredNorm() - v.squaredNorm()) -
                            s2 * (a.dot(u) - b.dot(v));
    return -im_phase - eta.dot(v) + ue.dot(w.gamma * ue);
  };

  Mat p = Mat::Zero(d, d);
  std::vector<double> diag(d);
  for (int i = 0; i < d; ++i) {
    diag[i] = critical_value(Vec::Unit(d, i));
    p(i, i) = diag[i];
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double pij =
          0.5 * (critical_value(Vec(Vec::Unit(d, i) + Vec::Unit(d, j))) - diag[i] - diag[j]);
      p(i, j) = pij;
      p(j, i) = pij;
    }
  return PhiForm{w.t, p};
}

enum class WeightRoute { Riccati, Lagrangian };

struct PhiGapCurve {
  SlopeFitReport fit;
  double min_eigenvalue;  // most negative gap eigenvalue seen on the grid
  std::vector<PhiForm> phis;
};

// Gap between the evolved weight and the t = 0 weight, as the smallest
// eigenvalue of P(t) - I/2 (forward) or I/2 - P(t) (backward), with a
// log-log slope fit; expected slope 2 k0 + 1 both ways.
inline PhiGapCurve phi_gap_curve(const QuadraticSymbol& q,
                                 const std::vector<double>& t_grid,
                                 bool backward = false,
                                 WeightRoute route = WeightRoute::Riccati,
                                 double h = 1e-4) {
  std::vector<WeightForm> weights;
  if (route == WeightRoute::Riccati) {
    weights = weight_riccati(q, t_grid, h, backward);
  } else {
    weights.reserve(t_grid.size());
    for (double t : t_grid) weights.push_back(lagrangian_weight(q, t, backward));
  }
  PhiGapCurve out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  values.reserve(t_grid.size());
  const double sign = backward ? -1.0 : 1.0;
  for (const auto& w : weights) {
    const PhiForm phi = phi_from_weight(w);
    const Mat gap = sign * (phi.p - 0.5 * Mat::Identity(phi.p.rows(), phi.p.cols()));
    Eigen::SelfAdjointEigenSolver<Mat> es(gap, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    out.min_eigenvalue = std::min(out.min_eigenvalue, lmin);
    values.push_back(lmin);
    out.phis.push_back(phi);
  }
  out.fit = fit_loglog(t_grid, values);
  return out;
}

/// Backward-evolution check: slope of lambda_min(I/2 - P(t)).
inline PhiGapCurve phi_decay_check(const QuadraticSymbol& q,
                                   const std::vector<double>& t_grid,
                                   double h = 1e-4) {
  return phi_gap_curve(q, t_grid, true, WeightRoute::Riccati, h);
}

// Residual of the weight evolution equation at time t: central difference of
// Phi_t in t against Re q~ evaluated on the graph of (2/i) d_x Phi_t. The
// holomorphic derivative is exact for quadratics.
inline double hamilton_jacobi_residual(const QuadraticSymbol& q, double t,
                                       int n_samples = 10, unsigned seed = 0,
                                       double h = 1e-4, bool backward = false) {
  const int n = q.n();
  const double sign = backward ? -1.0 : 1.0;
  const PhiForm phi_minus = phi_from_weight(lagrangian_weight(q, t - h, backward));
  const PhiForm phi_plus = phi_from_weight(lagrangian_weight(q, t + h, backward));
  const PhiForm phi = phi_from_weight(lagrangian_weight(q, t, backward));
  const CMat q_tilde = sign * conjugate_by_bargmann(q);

  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    CVec x(n);
    for (int i = 0; i < n; ++i) x(i) = Complex(normal(rng), normal(rng));
    Vec w(2 * n);
    w << x.real(), x.imag();

    const double dphi_dt = (phi_plus.value(x) - phi_minus.value(x)) / (2.0 * h);
    const Vec grad = phi.p * w;
    CVec xi(n);
    for (int i = 0; i < n; ++i) xi(i) = -2.0 * Complex(0, 1) * grad(i) - 2.0 * grad(n + i);
    CVec z(2 * n);
    z << x, xi;
    const double rhs = symbol_value(q_tilde, z).real();
    worst = std::max(worst, std::abs(dphi_dt - rhs));
  }
  return worst;
}

}  // namespace quadsub
