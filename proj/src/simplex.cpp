#include "prederr/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace prederr {

namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr double kReducedCostTolerance = 1e-10;

} // namespace

PhaseOneResult solve_phase_one(const DenseMatrix &a, std::span<const double> b,
                               double tolerance) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  if (b.size() != m)
    throw std::invalid_argument("phase one: rhs size does not match rows");

  // Columns: n structural, m artificial, then the rhs.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<double> t(m * width, 0.0);
  std::vector<double> sign(m, 1.0);
  std::vector<std::size_t> basis(m);
  std::vector<double> cost(n + m + 1, 0.0);

  for (std::size_t i = 0; i < m; ++i) {
    sign[i] = b[i] < 0 ? -1.0 : 1.0;
    double *row = &t[i * width];
    for (std::size_t j = 0; j < n; ++j)
      row[j] = sign[i] * a(i, j);
    row[n + i] = 1.0;
    row[rhs] = sign[i] * b[i];
    basis[i] = n + i;
    for (std::size_t j = 0; j < n; ++j)
      cost[j] -= row[j];
    cost[rhs] -= row[rhs];
  }

  const std::size_t max_pivots = 50 * (m + n + 10);
  std::size_t pivots = 0;
  for (;;) {
    // Bland: lowest-index improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (cost[j] < -kReducedCostTolerance) {
        enter = j;
        break;
      }
    }
    if (enter == width)
      break;

    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double coef = t[i * width + enter];
      if (coef <= kPivotTolerance)
        continue;
      double ratio = t[i * width + rhs] / coef;
      if (leave == m || ratio < best_ratio - 1e-14 ||
          (std::abs(ratio - best_ratio) <= 1e-14 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) {
      // Phase one is bounded below; a column with no positive entry can
      // only come from round-off, so stop improving.
      break;
    }

    double *prow = &t[leave * width];
    const double piv = prow[enter];
    for (std::size_t j = 0; j < width; ++j)
      prow[j] /= piv;
    prow[enter] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave)
        continue;
      double *row = &t[i * width];
      double f = row[enter];
      if (f == 0.0)
        continue;
      for (std::size_t j = 0; j < width; ++j)
        row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    double f = cost[enter];
    for (std::size_t j = 0; j < width; ++j)
      cost[j] -= f * prow[j];
    cost[enter] = 0.0;
    basis[leave] = enter;

    if (++pivots > max_pivots)
      throw std::runtime_error("phase one: pivot limit exceeded");
  }

  PhaseOneResult result;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double v = t[i * width + rhs];
    if (basis[i] < n)
      result.x[basis[i]] = std::max(0.0, v);
    else
      result.infeasibility += std::max(0.0, v);
  }
  result.dual.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    result.dual[i] = sign[i] * (1.0 - cost[n + i]);
  result.feasible = result.infeasibility <= tolerance;
  return result;
}

} // namespace prederr
