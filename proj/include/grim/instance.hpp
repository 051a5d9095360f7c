#pragma once

#include "grim/recombination.hpp"

#include <optional>
#include <span>
#include <vector>

namespace grim {

/// Finite encoding of a reduction task: features f_i (columns), linear
/// functionals sigma_j (rows), evaluations(j, i) = sigma_j(f_i), and the
/// target phi = sum_i weights(i) f_i.
struct ProblemInstance {
  Matrix evaluations;    // Lambda x N
  Vector weights;        // N, all non-zero
  Vector feature_norms;  // N, all > 0
  Vector target;         // Lambda, evaluations * weights
  // Row -> group id in [0, group_count), for grouped extension.
  std::optional<std::vector<Index>> group_of;
  // Lambda x Lambda dual-norm distances between functionals, for diagnostics.
  std::optional<Matrix> dual_distance;

  Index functional_count() const { return evaluations.rows(); }
  Index feature_count() const { return evaluations.cols(); }

  /// Builds an instance, computing the target. Norms default to ones.
  static ProblemInstance make(Matrix evaluations, Vector weights,
                              std::optional<Vector> feature_norms = std::nullopt);

  /// Throws DataError on any broken invariant.
  void validate() const;
};

/// Features folded to positive weights and unit norm: column i of
/// h_evaluations is sign(a_i) * evaluations(:, i) / nu_i and
/// alpha_i = |a_i| nu_i, so h_evaluations * alpha == target.
struct NormalizedInstance {
  Matrix h_evaluations;
  Vector alpha;
  double mass = 0.0;  // C = sum alpha
  std::vector<bool> sign_flips;
  Vector feature_norms;
  Vector target;

  Index functional_count() const { return h_evaluations.rows(); }
  Index feature_count() const { return h_evaluations.cols(); }
};

NormalizedInstance normalize_instance(const ProblemInstance& instance);

/// A candidate u = sum_s coefficients[s] * h_{indices[s]} in the normalized basis.
struct Candidate {
  std::vector<Index> indices;
  std::vector<double> coefficients;
};

/// sigma_j(phi - u) for every functional.
Vector residual_vector(const NormalizedInstance& norm, const Candidate& candidate);

/// Maps normalized-basis coefficients back to the original f-basis.
std::vector<double> to_original_basis(const NormalizedInstance& norm, const Candidate& candidate);

}  // namespace grim
