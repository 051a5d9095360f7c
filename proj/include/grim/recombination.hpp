#pragma once

// Recombination: reduce the support of a non-negative solution x of A x = y
// while keeping A x and non-negativity unchanged. The first row of A is the
// all-ones row, so the total mass sum(x) is part of the preserved system.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace grim {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values at or below this fraction of the largest one span the kernel.
inline constexpr double kKernelRelThreshold = 1e-12;

/// Entries of a kernel direction above this fraction of its max-abs entry count
/// as strictly positive in the ratio test.
inline constexpr double kPositivityRelThreshold = 1e-12;

struct ReductionSystem {
  Matrix matrix;            // (m+1) x N, row 0 identically 1
  Vector weights;           // length N, >= 0
  double tolerance = 1e-8;  // relative; see ReducedSolution::residual_inf

  /// Throws DataError when any invariant is violated.
  void validate() const;
};

struct ReducedSolution {
  Vector weights;              // length N, >= 0, zero off the support
  std::vector<Index> support;  // ascending indices with weights > 0
  double residual_inf = 0.0;   // ||A x' - A x||_inf
};

struct Elimination {
  Vector weights;
  Index eliminated = -1;
  double theta = 0.0;
};

/// Orthonormal basis of ker(A) from the full SVD. Columns of the returned
/// N x (N - rank) matrix are the basis vectors.
Matrix svd_kernel_basis(const Matrix& matrix);
Matrix svd_kernel_basis(const ReductionSystem& system);

/// Moves `weights` along `-direction` until the first coordinate hits zero
/// (ratio test, lowest index on ties). A direction without a positive entry
/// is negated first. Round-off negatives no larger than `clamp_tol` are set
/// to zero; anything more negative raises NumericalError. A non-positive
/// `clamp_tol` selects 1e-12 * ||weights||_1.
Elimination eliminate_direction(const Vector& weights, const Vector& direction,
                                double clamp_tol = 0.0);

/// Kernel-basis elimination: one SVD, then each kernel vector in turn is used
/// to zero one coordinate, the remaining vectors being re-projected so they
/// vanish at every coordinate zeroed so far.
ReducedSolution recombine_basic(const ReductionSystem& system);

/// Divide-and-conquer variant: columns are merged into 2(m+1) blocks whose
/// weighted means form a small system, reduced with recombine_basic; blocks
/// that lose all mass are dropped and the rest rescaled, until at most 2(m+1)
/// columns remain. Cost O(N m + m^3 log(N/m)).
ReducedSolution recombine_tree(const ReductionSystem& system);

/// Checks the ReducedSolution contract against `system`. Used by tests and
/// by the recombination drivers themselves.
bool satisfies_contract(const ReductionSystem& system, const ReducedSolution& solution,
                        double residual_rel = 1e-8);

}  // namespace grim
