#pragma once

#include <cstddef>
#include <span>

#include "cht/grid.hpp"
#include "cht/operators.hpp"

namespace cht {

struct CgOptions {
  /// Stop once ||r||_2 <= rel_tol * ||b||_2 ...
  double rel_tol = 1e-10;
  /// ... and, when positive, |sum r| <= sum_tol * sum |b|. Used where the
  /// discrete integral of the solution has to match that of the right-hand
  /// side (mass conservation).
  double sum_tol = 0.0;
  /// 0 selects 10 * number of cells.
  std::size_t max_iterations = 0;
};

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Solves the symmetric positive-definite Neumann system
///
///     diag[k] * x[k] - alpha * div(c grad x)[k] = rhs[k]
///
/// with face coefficients c (nullptr means c = 1 on every interior face) by
/// conjugate gradients with Jacobi preconditioning. x holds the initial guess
/// on entry. Reductions run in a fixed order, so results are reproducible.
/// Throws SolverFailure with the final residual when the iteration cap is hit.
CgResult solve_face_system(std::span<const double> diag, const FaceFluxSet* coefficients, double alpha,
                           const Field& rhs, Field& x, const CgOptions& options = {});

}  // namespace cht
