#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "quadsub/core.hpp"
#include "quadsub/fit.hpp"
#include "quadsub/parallel.hpp"
#include "quadsub/singular.hpp"

namespace quadsub {

/**
 * Graded Hermite-function basis {psi_alpha : |alpha| <= cutoff} on R^n,
 * ordered by |alpha| and lexicographically within each level. The block of
 * levels <= m is then a leading principal block.
 */
struct HermiteBasis {
  int n = 0;
  int cutoff = 0;
  std::vector<std::vector<int>> indices;
  std::vector<int> level_start;  // level_start[m] = first index of level m

  int size() const { return static_cast<int>(indices.size()); }
  int level(int i) const {
    int s = 0;
    for (int a : indices[i]) s += a;
    return s;
  }
  int block_size(int max_level) const {
    return level_start[std::min(max_level, cutoff) + 1];
  }
  int position(const std::vector<int>& alpha) const {
    const auto it = pos_.find(alpha);
    return it == pos_.end() ? -1 : it->second;
  }

  std::map<std::vector<int>, int> pos_;
};

namespace detail {

inline void enumerate_level(int n, int total, std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (n == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int first = 0; first <= total; ++first) {
    current.push_back(first);
    enumerate_level(n - 1, total - first, current, out);
    current.pop_back();
  }
}

inline long basis_count(int n, int cutoff) {
  long count = 1;  // C(cutoff + n, n)
  for (int i = 1; i <= n; ++i) count = count * (cutoff + i) / i;
  return count;
}

}  // namespace detail

inline HermiteBasis hermite_basis(int n, int cutoff) {
  if (n < 1 || cutoff < 0) throw std::invalid_argument("hermite_basis: bad arguments");
  if (detail::basis_count(n, cutoff) > 200000)
    throw std::invalid_argument("hermite_basis: more than 2e5 basis elements");
  HermiteBasis basis;
  basis.n = n;
  basis.cutoff = cutoff;
  basis.level_start.assign(cutoff + 2, 0);
  std::vector<int> current;
  for (int m = 0; m <= cutoff; ++m) {
    basis.level_start[m] = basis.size();
    detail::enumerate_level(n, m, current, basis.indices);
  }
  basis.level_start[cutoff + 1] = basis.size();
  for (int i = 0; i < basis.size(); ++i) basis.pos_[basis.indices[i]] = i;
  return basis;
}

/// Coefficients in the graded Hermite basis; the norm is the l2 norm.
struct HermiteVector {
  int n = 0;
  int cutoff = 0;
  CVec coeffs;

  double norm() const { return coeffs.norm(); }
};

/// Matrix of the Weyl quantization of q on the Hermite basis at the cutoff.
struct GalerkinOperator {
  HermiteBasis basis;
  CMat matrix;
  Vec lambda;  // harmonic oscillator eigenvalues 2|alpha| + n

  int n() const { return basis.n; }
  int cutoff() const { return basis.cutoff; }
};

// Exact Galerkin matrix elements via the normal-ordered ladder expansion
//   q^w = sum_jk [ P2_jk a_j a_k + M_jk a_j^* a_k + C2_jk a_j^* a_k^* ] + c0,
// P2 = (Q_xx - Q_xixi)/2 - i Q_xxi,  C2 = (Q_xx - Q_xixi)/2 + i Q_xxi,
// M  = Q_xx + Q_xixi + i (Q_xxi^T - Q_xxi),  c0 = (tr Q_xx + tr Q_xixi)/2.
// Cancellations happen in the coefficients, so the harmonic oscillator comes
// out exactly diagonal with integer entries.
inline GalerkinOperator quantize(const QuadraticSymbol& q, int n_build) {
  if (n_build < 4) throw std::invalid_argument("quantize: cutoff must be >= 4");
  const int n = q.n();
  GalerkinOperator op;
  op.basis = hermite_basis(n, n_build);
  const int size = op.basis.size();

  const CMat full = q.q();
  const CMat qxx = full.topLeftCorner(n, n);
  const CMat qpp = full.bottomRightCorner(n, n);
  const CMat qxp = full.topRightCorner(n, n);
  const Complex i1(0, 1);
  const CMat p2 = 0.5 * (qxx - qpp) - i1 * qxp;
  const CMat c2 = 0.5 * (qxx - qpp) + i1 * qxp;
  const CMat m = qxx + qpp + i1 * (qxp.transpose() - qxp);
  const Complex c0 = 0.5 * (qxx.trace() + qpp.trace());

  op.matrix = CMat::Zero(size, size);
  op.lambda = Vec(size);
  std::vector<int> beta;
  for (int col = 0; col < size; ++col) {
    const std::vector<int>& alpha = op.basis.indices[col];
    op.lambda(col) = 2.0 * op.basis.level(col) + n;
    op.matrix(col, col) += c0;
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        if (alpha[k] >= 1) {
          beta = alpha;
          beta[k] -= 1;
          // a_j a_k
          if (beta[j] >= 1 && p2(j, k) != Complex(0, 0)) {
            const long w = static_cast<long>(alpha[k]) * beta[j];
            beta[j] -= 1;
            op.matrix(op.basis.position(beta), col) += p2(j, k) * std::sqrt(double(w));
            beta[j] += 1;
          }
          // a_j^* a_k
          if (m(j, k) != Complex(0, 0)) {
            const long w = static_cast<long>(alpha[k]) * (beta[j] + 1);
            beta[j] += 1;
            op.matrix(op.basis.position(beta), col) += m(j, k) * std::sqrt(double(w));
            beta[j] -= 1;
          }
          beta[k] += 1;
        }
        // a_j^* a_k^*
        if (c2(j, k) != Complex(0, 0)) {
          beta = alpha;
          beta[k] += 1;
          const long w = static_cast<long>(alpha[k] + 1) * (beta[j] + 1);
          beta[j] += 1;
          const int row = op.basis.position(beta);
          if (row >= 0) op.matrix(row, col) += c2(j, k) * std::sqrt(double(w));
        }
      }
    }
  }
  return op;
}

namespace detail {

// Quadratic symbols preserve the parity of |alpha|, so the exponential
// splits into even/odd blocks.
inline CMat expm_parity(const CMat& m, const HermiteBasis& basis) {
  const int size = static_cast<int>(m.rows());
  std::vector<int> even, odd;
  for (int i = 0; i < size; ++i) (basis.level(i) % 2 == 0 ? even : odd).push_back(i);
  if (even.empty() || odd.empty()) return expm(m);

  for (int i : even)
    for (int j : odd)
      if (m(i, j) != Complex(0, 0) || m(j, i) != Complex(0, 0)) return expm(m);

  CMat out = CMat::Zero(size, size);
  for (const auto* part : {&even, &odd}) {
    const int b = static_cast<int>(part->size());
    CMat sub(b, b);
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) sub(r, c) = m((*part)[r], (*part)[c]);
    const CMat esub = expm(sub);
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) out((*part)[r], (*part)[c]) = esub(r, c);
  }
  return out;
}

// Largest singular value through the Hermitian eigenproblem for W^* W;
// the column counts here stay in the few hundreds.
inline double spectral_norm(const CMat& w) {
  if (w.size() == 0) return 0.0;
  if (w.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const CMat gram = w.adjoint() * w;
  Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

/// Semigroup action exp(-t matrix) u, with the halving self-check and the
/// contraction guard (the Galerkin matrix is accretive when Re q >= 0).
inline HermiteVector semigroup_apply(const GalerkinOperator& op, double t,
                                     const HermiteVector& u) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
  if (u.coeffs.size() != op.basis.size())
    throw std::invalid_argument("semigroup_apply: vector/basis size mismatch");
  const CMat e_full = detail::expm_parity(CMat(-t * op.matrix), op.basis);
  const CMat e_half = detail::expm_parity(CMat(-0.5 * t * op.matrix), op.basis);
  const CVec r = e_full * u.coeffs;
  const CVec r2 = e_half * (e_half * u.coeffs);
  const double un = u.norm();
  if ((r - r2).norm() > 1e-10 * un)
    throw ExpmNotConverged("semigroup_apply: halving check failed");
  if (r.norm() > (1.0 + 1e-8) * un)
    throw ExpmNotConverged("semigroup_apply: contraction violated");
  return HermiteVector{u.n, u.cutoff, r};
}

struct SmoothingReport {
  std::vector<int> k_list;
  std::vector<SlopeFitReport> fits;  // log ||P^k exp(-t q^w)|| vs log t, per k
};

// Norm of P^k exp(-t q^w) restricted to inputs in the observation block,
// as the largest singular value of diag(lambda)^k expm(-t M) B_obs.
// Expected log-log slope is -(2 k0 + 1) k.
inline SmoothingReport smoothing_norm_report(const GalerkinOperator& op, int n_obs,
                                             const std::vector<int>& k_list,
                                             const std::vector<double>& t_grid) {
  if (2 * n_obs > op.cutoff())
    throw std::invalid_argument("smoothing_norm_report: need n_obs <= n_build / 2");
  const int b_obs = op.basis.block_size(n_obs);
  const int nt = static_cast<int>(t_grid.size());
  std::vector<std::vector<double>> norms(k_list.size(), std::vector<double>(nt));

  parallel_for(nt, [&](int ti) {
    const CMat e = detail::expm_parity(CMat(-t_grid[ti] * op.matrix), op.basis);
    const CMat cols = e.leftCols(b_obs);
    for (size_t ki = 0; ki < k_list.size(); ++ki) {
      const Vec scale = op.lambda.array().pow(k_list[ki]);
      norms[ki][ti] = detail::spectral_norm(CMat(scale.asDiagonal() * cols));
    }
  });

  SmoothingReport report;
  report.k_list = k_list;
  for (size_t ki = 0; ki < k_list.size(); ++ki)
    report.fits.push_back(fit_loglog(t_grid, norms[ki]));
  return report;
}

inline SmoothingReport smoothing_norm_report(const QuadraticSymbol& q, int n_build,
                                             int n_obs, const std::vector<int>& k_list,
                                             const std::vector<double>& t_grid) {
  return smoothing_norm_report(quantize(q, n_build), n_obs, k_list, t_grid);
}

struct DecayReport {
  std::vector<double> rates;  // fitted decay rate of log|a_alpha| vs |alpha|
  SlopeFitReport rate_fit;    // log rate vs log t; expected slope 2 k0 + 1
};

/// Hermite-coefficient decay rates of exp(-t q^w) u along a t-grid.
inline DecayReport coefficient_decay(const GalerkinOperator& op, const HermiteVector& u,
                                     const std::vector<double>& t_grid) {
  if (u.coeffs.size() != op.basis.size())
    throw std::invalid_argument("coefficient_decay: vector/basis size mismatch");
  const int nt = static_cast<int>(t_grid.size());
  DecayReport report;
  report.rates.assign(nt, 0.0);

  parallel_for(nt, [&](int ti) {
    const CMat e = detail::expm_parity(CMat(-t_grid[ti] * op.matrix), op.basis);
    const CVec a = e * u.coeffs;
    std::vector<double> levels, logs;
    for (int i = 0; i < op.basis.size(); ++i) {
      const double mag = std::abs(a(i));
      if (mag > 1e-13) {
        levels.push_back(static_cast<double>(op.basis.level(i)));
        logs.push_back(std::log(mag));
      }
    }
    if (levels.size() < 5)
      throw InsufficientDecayRange("coefficient_decay: fewer than 5 usable coefficients");
    double slope, intercept, r2;
    linear_fit(levels, logs, slope, intercept, r2);
    report.rates[ti] = std::max(0.0, -slope);
  });

  report.rate_fit = fit_loglog(t_grid, report.rates);
  return report;
}

inline DecayReport coefficient_decay(const QuadraticSymbol& q, const HermiteVector& u,
                                     const std::vector<double>& t_grid, int n_build) {
  return coefficient_decay(quantize(q, n_build), u, t_grid);
}

// Best constant in ||L^{2 delta} u|| <= c (||(q^w - i lambda) u|| + ||u||)
// over unit u in the observation block, delta = 1/(2 k0 + 1) and
// L^{2 delta} = diag((1 + lambda_alpha)^delta). Uses the exact identity
// (p + r)^2 = min_w (p^2/w + r^2/(1-w)) to reduce the sum-of-norms
// denominator to a scan of generalized eigenvalue problems.
inline double subelliptic_constant(const GalerkinOperator& op, int k0, int n_obs,
                                   double lambda_shift) {
  if (2 * n_obs > op.cutoff())
    throw std::invalid_argument("subelliptic_constant: need n_obs <= n_build / 2");
  const double delta = 1.0 / (2.0 * k0 + 1.0);
  const int b_obs = op.basis.block_size(n_obs);

  CMat shifted = op.matrix.leftCols(b_obs);
  for (int i = 0; i < b_obs; ++i) shifted(i, i) -= Complex(0, lambda_shift);
  const CMat btb = shifted.adjoint() * shifted;
  Vec num(b_obs);
  for (int i = 0; i < b_obs; ++i) num(i) = std::pow(1.0 + op.lambda(i), 2.0 * delta);

  const int grid = 199;
  std::vector<double> best(grid, 0.0);
  parallel_for(grid, [&](int gi) {
    const double w = (gi + 1) / static_cast<double>(grid + 1);
    CMat h = btb / w;
    for (int i = 0; i < b_obs; ++i) h(i, i) += 1.0 / (1.0 - w);
    Eigen::LLT<CMat> llt(h);
    if (llt.info() != Eigen::Success) return;
    // power iteration for the largest eigenvalue of H^{-1} N
    CVec v = CVec::Ones(b_obs);
    v.normalize();
    double rho = 0.0;
    for (int it = 0; it < 500; ++it) {
      const CVec nv = num.asDiagonal() * v;
      CVec z = llt.solve(nv);
      z.normalize();
      const CVec nz = num.asDiagonal() * z;
      const double next = nz.dot(z).real() / (z.dot(h * z)).real();
      v = z;
      if (it > 4 && std::abs(next - rho) <= 1e-11 * next) {
        rho = next;
        break;
      }
      rho = next;
    }
    best[gi] = rho;
  });
  return std::sqrt(*std::max_element(best.begin(), best.end()));
}

inline double subelliptic_constant(const QuadraticSymbol& q, int n_build, int n_obs,
                                   double lambda_shift) {
  const int k0 = k0_index(q);
  return subelliptic_constant(quantize(q, n_build), k0, n_obs, lambda_shift);
}

/// Closed form of the Hermite tail sum sum_alpha exp(-y |alpha|) on N^n.
inline double hermite_tail_sum(double y, int n) {
  if (!(y > 0.0)) throw std::domain_error("hermite_tail_sum: y must be positive");
  return std::pow(-std::expm1(-y), -n);
}

// Smallest C0 = 2^m such that exp(s(t) P) exp(-t q^w), s(t) = t^{2k0+1}/C0,
// keeps norm <= 2 on the observation block over the whole grid.
inline double calibrate_c0(const GalerkinOperator& op, int k0,
                           const std::vector<double>& t_grid) {
  const int n_obs = op.cutoff() / 2;
  const int b_obs = op.basis.block_size(n_obs);
  const int nt = static_cast<int>(t_grid.size());

  std::vector<CMat> cols(nt);
  parallel_for(nt, [&](int ti) {
    const CMat e = detail::expm_parity(CMat(-t_grid[ti] * op.matrix), op.basis);
    cols[ti] = e.leftCols(b_obs);
  });

  const double power = 2.0 * k0 + 1.0;
  for (int m = 0; m <= 30; ++m) {
    const double c0 = std::pow(2.0, m);
    bool ok = true;
    for (int ti = 0; ti < nt && ok; ++ti) {
      const double s = std::pow(t_grid[ti], power) / c0;
      const Vec scale = (s * op.lambda.array()).exp();
      if (detail::spectral_norm(CMat(scale.asDiagonal() * cols[ti])) > 2.0) ok = false;
    }
    if (ok) return c0;
  }
  throw NoStableC0("calibrate_c0: no stable constant up to 2^30");
}

inline double calibrate_c0(const QuadraticSymbol& q, int n_build,
                           const std::vector<double>& t_grid) {
  const int k0 = k0_index(q);
  return calibrate_c0(quantize(q, n_build), k0, t_grid);
}

// ---- ladder actions and grid evaluation ----

namespace detail {

enum class Ladder { Position, Derivative };

// Maps coefficients on basis(N) to basis(N + 1): x_j raises with
// sqrt((alpha_j+1)/2) and lowers with sqrt(alpha_j/2); d_j flips the sign
// of the raising part.
inline HermiteVector apply_ladder(const HermiteVector& u, const HermiteBasis& from,
                                  const HermiteBasis& to, int j, Ladder kind) {
  HermiteVector out;
  out.n = u.n;
  out.cutoff = to.cutoff;
  out.coeffs = CVec::Zero(to.size());
  const double up_sign = (kind == Ladder::Position) ? 1.0 : -1.0;
  std::vector<int> beta;
  for (int i = 0; i < from.size(); ++i) {
    const Complex c = u.coeffs(i);
    if (c == Complex(0, 0)) continue;
    const std::vector<int>& alpha = from.indices[i];
    beta = alpha;
    beta[j] += 1;
    out.coeffs(to.position(beta)) += up_sign * std::sqrt(0.5 * beta[j]) * c;
    if (alpha[j] >= 1) {
      beta[j] -= 2;
      out.coeffs(to.position(beta)) += std::sqrt(0.5 * alpha[j]) * c;
    }
  }
  return out;
}

// Normalized Hermite function table, rows 0..max_level, columns = grid.
// The recurrence is carried with a floating exponent so that large-x columns
// do not underflow before high levels become relevant.
inline Mat hermite_values(int max_level, const Vec& x_grid) {
  const int npts = static_cast<int>(x_grid.size());
  Mat table(max_level + 1, npts);
  const double pi_quarter = std::pow(M_PI, -0.25);
  for (int p = 0; p < npts; ++p) {
    const double x = x_grid(p);
    double log_scale = -0.5 * x * x;
    double prev = pi_quarter;  // level 0 before the Gaussian factor
    double cur = std::sqrt(2.0) * x * pi_quarter;
    table(0, p) = prev * std::exp(log_scale);
    if (max_level >= 1) table(1, p) = cur * std::exp(log_scale);
    for (int k = 1; k < max_level; ++k) {
      double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
      prev = cur;
      cur = next;
      const double mag = std::max(std::abs(prev), std::abs(cur));
      if (mag > 1e250) {
        prev *= 1e-250;
        cur *= 1e-250;
        log_scale += std::log(1e250);
      } else if (mag < 1e-250 && mag > 0.0) {
        prev *= 1e250;
        cur *= 1e250;
        log_scale -= std::log(1e250);
      }
      table(k + 1, p) = cur * std::exp(log_scale);
    }
  }
  return table;
}

}  // namespace detail

/// Pointwise values on a uniform grid over [-L, L]^n; n <= 2.
inline double grid_sup_norm(const HermiteVector& u, const HermiteBasis& basis,
                            int points_per_axis = 400) {
  const double box = std::sqrt(2.0 * basis.cutoff) + 4.0;
  Vec grid(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i)
    grid(i) = -box + 2.0 * box * i / (points_per_axis - 1);
  const Mat table = detail::hermite_values(basis.cutoff, grid);

  if (u.n == 1) {
    double sup = 0.0;
    for (int p = 0; p < points_per_axis; ++p) {
      Complex val(0, 0);
      for (int i = 0; i < basis.size(); ++i) val += u.coeffs(i) * table(i, p);
      sup = std::max(sup, std::abs(val));
    }
    return sup;
  }
  if (u.n == 2) {
    CMat a = CMat::Zero(basis.cutoff + 1, basis.cutoff + 1);
    for (int i = 0; i < basis.size(); ++i)
      a(basis.indices[i][0], basis.indices[i][1]) = u.coeffs(i);
    const CMat vals = table.transpose().cast<Complex>() * a * table.cast<Complex>();
    return vals.cwiseAbs().maxCoeff();
  }
  throw std::invalid_argument("grid_sup_norm: supported for n <= 2");
}

struct WeightedSeminorm {
  double l2;
  double sup;
};

// L2 and grid sup norms of x^mu d^nu u, applied through exact ladder actions
// in a basis extended by |mu| + |nu| levels. Fails if the top two layers of
// the result carry more than 1e-8 of its mass.
inline WeightedSeminorm weighted_seminorm(const HermiteVector& u,
                                          const std::vector<int>& mu,
                                          const std::vector<int>& nu,
                                          int points_per_axis = 400) {
  if (static_cast<int>(mu.size()) != u.n || static_cast<int>(nu.size()) != u.n)
    throw std::invalid_argument("weighted_seminorm: multi-index size mismatch");
  int total = 0;
  for (int v : mu) total += v;
  for (int v : nu) total += v;
  if (total > 6) throw std::invalid_argument("weighted_seminorm: |mu| + |nu| <= 6");

  HermiteVector cur = u;
  HermiteBasis from = hermite_basis(u.n, u.cutoff);
  for (int j = 0; j < u.n; ++j)
    for (int rep = 0; rep < nu[j]; ++rep) {
      HermiteBasis to = hermite_basis(u.n, from.cutoff + 1);
      cur = detail::apply_ladder(cur, from, to, j, detail::Ladder::Derivative);
      from = std::move(to);
    }
  for (int j = 0; j < u.n; ++j)
    for (int rep = 0; rep < mu[j]; ++rep) {
      HermiteBasis to = hermite_basis(u.n, from.cutoff + 1);
      cur = detail::apply_ladder(cur, from, to, j, detail::Ladder::Position);
      from = std::move(to);
    }

  const double norm = cur.norm();
  if (total > 0 && norm > 0.0) {
    const int top_start = from.level_start[std::max(0, from.cutoff - 1)];
    const double top_mass = cur.coeffs.tail(from.size() - top_start).norm();
    if (top_mass > 1e-8 * norm)
      throw CutoffTooSmall("weighted_seminorm: top layers carry " +
                           std::to_string(top_mass / norm) + " of the norm");
  }
  return WeightedSeminorm{norm, grid_sup_norm(cur, from, points_per_axis)};
}

}  // namespace quadsub
