#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace prederr {

// Dense row-major matrix, just enough for the feasibility solver.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct PhaseOneResult {
  bool feasible = false;
  // Optimal sum of artificial variables; zero (up to tolerance) iff feasible.
  double infeasibility = 0.0;
  // A point with Ax = b, x >= 0 when feasible.
  std::vector<double> x;
  // Optimal dual of the phase-one problem: A^T y <= 0 and b.y = infeasibility.
  // When infeasible it is a Farkas certificate.
  std::vector<double> dual;
};

// Phase-one simplex (dense tableau, Bland's rule) for {x >= 0 : Ax = b}.
PhaseOneResult solve_phase_one(const DenseMatrix &a, std::span<const double> b,
                               double tolerance = 1e-9);

} // namespace prederr
