#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace quadsub {

/// Least-squares fit of log(value) against log(t).
struct SlopeFitReport {
  std::vector<double> t_grid;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline std::vector<double> log_space(double tmin, double tmax, int points) {
  if (points < 2 || !(tmin > 0.0) || !(tmax > tmin))
    throw std::invalid_argument("log_space: need tmax > tmin > 0 and >= 2 points");
  std::vector<double> grid(points);
  const double step = (std::log(tmax) - std::log(tmin)) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = std::exp(std::log(tmin) + i * step);
  grid.front() = tmin;
  grid.back() = tmax;
  return grid;
}

inline std::vector<double> lin_space(double a, double b, int points) {
  if (points < 1) throw std::invalid_argument("lin_space: need >= 1 point");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = a;
    return grid;
  }
  for (int i = 0; i < points; ++i) grid[i] = a + (b - a) * i / (points - 1);
  return grid;
}

// Plain least squares on pre-transformed data.
inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                       double& slope, double& intercept, double& r_squared) {
  const int m = static_cast<int>(x.size());
  if (m < 2) throw std::invalid_argument("linear_fit: need at least two points");
  double sx = 0, sy = 0;
  for (int i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  slope = sxy / sxx;
  intercept = my - slope * mx;
  r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
}

inline SlopeFitReport fit_loglog(const std::vector<double>& t_grid,
                                 const std::vector<double>& values) {
  if (t_grid.size() != values.size())
    throw std::invalid_argument("fit_loglog: grid/value size mismatch");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("fit_loglog: grid must be strictly increasing");
  std::vector<double> lx, ly;
  lx.reserve(t_grid.size());
  ly.reserve(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_loglog: data must be positive");
    lx.push_back(std::log(t_grid[i]));
    ly.push_back(std::log(values[i]));
  }
  SlopeFitReport report;
  report.t_grid = t_grid;
  report.values = values;
  linear_fit(lx, ly, report.slope, report.intercept, report.r_squared);
  return report;
}

}  // namespace quadsub
