#pragma once

// Generalised Empirical Interpolation Method, used as a baseline.
//
// GEIM is feature-driven: step n picks the feature worst reproduced by the
// current interpolant J_{n-1} (in the X-norm), then the functional on which
// that feature's interpolation error is largest. Interpolants are kept as
// coefficient vectors in the original feature basis.

#include "grim/instance.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace grim {

/// X-norm of an element given by its coefficients in the feature basis.
class NormOracle {
 public:
  using Function = std::function<double(const Vector&)>;

  /// Inner-product norm sqrt(c' G c) from the feature Gram matrix.
  static NormOracle from_gram(Matrix gram);
  static NormOracle from_function(Function fn);

  double operator()(const Vector& coefficients) const;

  /// Present for Gram-backed oracles; enables fast batched evaluation.
  const Matrix* gram() const { return gram_ ? &*gram_ : nullptr; }

 private:
  std::optional<Matrix> gram_;
  Function fn_;
};

struct GeimState {
  std::vector<Index> selected_features;
  std::vector<Index> selected_functionals;
  Matrix basis_q;        // N x n, column j = coefficients of q_j
  Matrix q_evaluations;  // n x n, (i, j) = sigma_i(q_j); unit lower triangular
  Matrix functional_rows;  // n x N, evaluations of the selected functionals

  Index size() const { return static_cast<Index>(selected_features.size()); }
};

struct GeimFit {
  GeimState state;
  std::vector<Vector> interpolants;  // J_n[phi] coefficients, n = 1..size
  std::vector<double> selection_norms;  // ||h_n - J_{n-1}[h_n]||_X
  std::vector<double> phi_errors;       // ||phi - J_n[phi]||_X
};

/// Coefficients of J_n[w] for w given in the feature basis.
Vector geim_interpolate(const GeimState& state, const Vector& w);

/// Runs up to n_max GEIM steps, stopping early once ||phi - J_n[phi]||_X <= stop_tol.
GeimFit geim_fit(const ProblemInstance& instance, const NormOracle& norm, Index n_max,
                 double stop_tol = 0.0);

}  // namespace grim
