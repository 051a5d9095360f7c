#include "grim/instance.hpp"

#include "grim/error.hpp"

#include <cmath>
#include <string>

namespace grim {

ProblemInstance ProblemInstance::make(Matrix evaluations, Vector weights,
                                      std::optional<Vector> feature_norms) {
  if (weights.size() != evaluations.cols()) {
    throw DataError("weights length " + std::to_string(weights.size()) +
                    " does not match feature count " + std::to_string(evaluations.cols()));
  }
  ProblemInstance out;
  out.feature_norms = feature_norms ? std::move(*feature_norms) : Vector::Ones(weights.size());
  out.target = evaluations * weights;
  out.evaluations = std::move(evaluations);
  out.weights = std::move(weights);
  out.validate();
  return out;
}

void ProblemInstance::validate() const {
  const Index n = evaluations.cols();
  const Index lambda = evaluations.rows();
  if (n == 0 || lambda == 0) throw DataError("instance needs at least one feature and functional");
  if (weights.size() != n || feature_norms.size() != n) {
    throw DataError("weights/norms length does not match feature count");
  }
  if (target.size() != lambda) throw DataError("target length does not match functional count");
  if (!evaluations.allFinite() || !weights.allFinite() || !feature_norms.allFinite()) {
    throw DataError("instance has non-finite entries");
  }
  for (Index i = 0; i < n; ++i) {
    if (weights(i) == 0.0) throw DataError("weight " + std::to_string(i) + " is zero");
    if (!(feature_norms(i) > 0.0)) {
      throw DataError("feature norm " + std::to_string(i) + " must be > 0");
    }
  }
  const Vector expected = evaluations * weights;
  const double scale = (evaluations.cwiseAbs() * weights.cwiseAbs()).maxCoeff();
  if ((expected - target).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale)) {
    throw DataError("target is inconsistent with evaluations * weights");
  }
  if (group_of) {
    if (static_cast<Index>(group_of->size()) != lambda) {
      throw DataError("group map length does not match functional count");
    }
    for (Index g : *group_of) {
      if (g < 0) throw DataError("negative group id");
    }
  }
  if (dual_distance) {
    const Matrix& d = *dual_distance;
    if (d.rows() != lambda || d.cols() != lambda) throw DataError("dual distance shape mismatch");
    for (Index i = 0; i < lambda; ++i) {
      if (d(i, i) != 0.0) throw DataError("dual distance diagonal must be zero");
      for (Index j = 0; j < i; ++j) {
        if (std::abs(d(i, j) - d(j, i)) > 1e-12 * (1.0 + std::abs(d(i, j)))) {
          throw DataError("dual distance must be symmetric");
        }
      }
    }
  }
}

NormalizedInstance normalize_instance(const ProblemInstance& instance) {
  instance.validate();
  const Index n = instance.feature_count();
  NormalizedInstance out;
  out.h_evaluations = instance.evaluations;
  out.alpha.resize(n);
  out.sign_flips.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    const double a = instance.weights(i);
    const double nu = instance.feature_norms(i);
    const bool flip = a < 0.0;
    out.sign_flips[static_cast<std::size_t>(i)] = flip;
    out.h_evaluations.col(i) *= (flip ? -1.0 : 1.0) / nu;
    out.alpha(i) = std::abs(a) * nu;
  }
  out.mass = out.alpha.sum();
  out.feature_norms = instance.feature_norms;
  out.target = instance.target;
  return out;
}

Vector residual_vector(const NormalizedInstance& norm, const Candidate& candidate) {
  if (candidate.indices.size() != candidate.coefficients.size()) {
    throw DataError("candidate indices/coefficients length mismatch");
  }
  Vector r = norm.target;
  for (std::size_t s = 0; s < candidate.indices.size(); ++s) {
    const Index i = candidate.indices[s];
    if (i < 0 || i >= norm.feature_count()) {
      throw DataError("candidate feature index " + std::to_string(i) + " out of range");
    }
    r -= candidate.coefficients[s] * norm.h_evaluations.col(i);
  }
  return r;
}

std::vector<double> to_original_basis(const NormalizedInstance& norm, const Candidate& candidate) {
  std::vector<double> out(candidate.coefficients.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const auto i = static_cast<std::size_t>(candidate.indices[s]);
    const double sign = norm.sign_flips[i] ? -1.0 : 1.0;
    out[s] = sign * candidate.coefficients[s] / norm.feature_norms(static_cast<Index>(i));
  }
  return out;
}

}  // namespace grim
