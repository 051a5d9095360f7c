#include "grim/recombination.hpp"

#include "grim/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace grim {
namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " has non-finite entries");
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

ReducedSolution finish(const ReductionSystem& system, Vector reduced) {
  ReducedSolution out;
  const Vector reference = system.matrix * system.weights;
  const Vector delta = reduced - system.weights;
  out.residual_inf = inf_norm(system.matrix * delta);
  for (Index j = 0; j < reduced.size(); ++j) {
    if (reduced(j) > 0.0) out.support.push_back(j);
  }
  out.weights = std::move(reduced);
  const double bound = system.tolerance * (1.0 + inf_norm(reference));
  if (!(out.residual_inf <= bound)) {
    throw NumericalError("recombination residual " + std::to_string(out.residual_inf) +
                         " exceeds bound " + std::to_string(bound));
  }
  return out;
}

// Core elimination on a dense sub-system whose weights are all positive.
Vector reduce_dense(const Matrix& matrix, Vector x, double clamp_tol) {
  Matrix kernel = svd_kernel_basis(matrix);
  const Index dims = kernel.cols();
  for (Index j = 0; j < dims; ++j) {
    auto direction = kernel.col(j);
    const double scale = direction.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw NumericalError("kernel direction collapsed to zero");
    direction /= scale;
    Elimination step = eliminate_direction(x, direction, clamp_tol);
    x = std::move(step.weights);
    const Index i = step.eliminated;
    const Index remaining = dims - j - 1;
    if (remaining == 0) break;
    // Later directions must vanish at i so they cannot revive it.
    auto rest = kernel.rightCols(remaining);
    const Eigen::RowVectorXd factors = rest.row(i) / direction(i);
    rest.noalias() -= direction * factors;
    rest.row(i).setZero();
  }
  return x;
}

std::vector<Index> positive_indices(const Vector& x) {
  std::vector<Index> idx;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) > 0.0) idx.push_back(j);
  }
  return idx;
}

Matrix gather_columns(const Matrix& a, const std::vector<Index>& idx) {
  Matrix out(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = a.col(idx[k]);
  return out;
}

Vector gather(const Vector& x, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = x(idx[k]);
  return out;
}

}  // namespace

void ReductionSystem::validate() const {
  if (matrix.rows() == 0 || matrix.cols() == 0) throw DataError("reduction system is empty");
  if (weights.size() != matrix.cols()) {
    throw DataError("weights length " + std::to_string(weights.size()) + " != column count " +
                    std::to_string(matrix.cols()));
  }
  require_finite(matrix, "reduction matrix");
  if (!weights.allFinite()) throw DataError("reduction weights have non-finite entries");
  if ((matrix.row(0).array() != 1.0).any()) throw DataError("first matrix row must be all ones");
  if ((weights.array() < 0.0).any()) throw DataError("reduction weights must be non-negative");
  if (!(tolerance >= 0.0)) throw DataError("tolerance must be >= 0");
}

Matrix svd_kernel_basis(const Matrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) throw DataError("kernel of an empty matrix");
  require_finite(matrix, "matrix");
  const Index n = matrix.cols();
  Eigen::BDCSVD<Matrix> svd(matrix, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double cut = kKernelRelThreshold * sv(0);
    while (rank < sv.size() && sv(rank) > cut) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Matrix svd_kernel_basis(const ReductionSystem& system) {
  system.validate();
  return svd_kernel_basis(system.matrix);
}

Elimination eliminate_direction(const Vector& weights, const Vector& direction,
                                double clamp_tol) {
  if (weights.size() != direction.size()) throw DataError("direction/weights length mismatch");
  if ((weights.array() < 0.0).any()) throw DataError("weights must be non-negative");
  const double scale = direction.size() == 0 ? 0.0 : direction.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NumericalError("elimination direction is numerically zero");
  }
  const double threshold = kPositivityRelThreshold * scale;
  Vector d = direction;
  if (!(d.array() > threshold).any()) d = -d;
  if (!(d.array() > threshold).any()) {
    throw NumericalError("elimination direction has no positive entry");
  }

  Index pivot = -1;
  double theta = 0.0;
  for (Index j = 0; j < d.size(); ++j) {
    if (d(j) <= threshold) continue;
    const double ratio = weights(j) / d(j);
    if (pivot < 0 || ratio < theta) {
      pivot = j;
      theta = ratio;
    }
  }

  if (clamp_tol <= 0.0) clamp_tol = 1e-12 * weights.lpNorm<1>();
  Elimination out;
  out.weights = weights - theta * d;
  out.weights(pivot) = 0.0;
  for (Index j = 0; j < out.weights.size(); ++j) {
    double& w = out.weights(j);
    if (w >= 0.0) continue;
    if (w < -clamp_tol) {
      throw NumericalError("elimination produced weight " + std::to_string(w) + " at index " +
                           std::to_string(j));
    }
    w = 0.0;
  }
  out.eliminated = pivot;
  out.theta = theta;
  return out;
}

ReducedSolution recombine_basic(const ReductionSystem& system) {
  system.validate();
  const std::vector<Index> idx = positive_indices(system.weights);
  Vector reduced = Vector::Zero(system.weights.size());
  if (idx.size() > 1) {
    const double clamp_tol = system.tolerance * system.weights.lpNorm<1>();
    const Vector sub =
        reduce_dense(gather_columns(system.matrix, idx), gather(system.weights, idx), clamp_tol);
    for (std::size_t k = 0; k < idx.size(); ++k) reduced(idx[k]) = sub(static_cast<Index>(k));
  } else {
    reduced = system.weights;
  }
  return finish(system, std::move(reduced));
}

ReducedSolution recombine_tree(const ReductionSystem& system) {
  system.validate();
  const Index rows = system.matrix.rows();
  const std::size_t blocks = static_cast<std::size_t>(2 * rows);
  Vector x = system.weights;
  std::vector<Index> idx = positive_indices(x);

  while (idx.size() > blocks) {
    const std::size_t n = idx.size();
    Matrix means = Matrix::Zero(rows, static_cast<Index>(blocks));
    Vector mass = Vector::Zero(static_cast<Index>(blocks));
    std::vector<std::size_t> start(blocks + 1);
    for (std::size_t g = 0; g <= blocks; ++g) start[g] = g * n / blocks;
    for (std::size_t g = 0; g < blocks; ++g) {
      const Index gi = static_cast<Index>(g);
      for (std::size_t k = start[g]; k < start[g + 1]; ++k) {
        const Index j = idx[k];
        means.col(gi) += x(j) * system.matrix.col(j);
        mass(gi) += x(j);
      }
      means.col(gi) /= mass(gi);
    }
    // Block means of a ones row are ones up to rounding.
    means.row(0).setOnes();

    ReductionSystem merged{std::move(means), mass, system.tolerance};
    const ReducedSolution reduced = recombine_basic(merged);

    std::vector<Index> survivors;
    for (std::size_t g = 0; g < blocks; ++g) {
      const Index gi = static_cast<Index>(g);
      const double factor = reduced.weights(gi) / mass(gi);
      for (std::size_t k = start[g]; k < start[g + 1]; ++k) {
        const Index j = idx[k];
        if (factor > 0.0) {
          x(j) *= factor;
          if (x(j) > 0.0) survivors.push_back(j);
          else x(j) = 0.0;
        } else {
          x(j) = 0.0;
        }
      }
    }
    if (survivors.size() >= n) throw NumericalError("tree recombination made no progress");
    idx = std::move(survivors);
  }

  Vector out = Vector::Zero(x.size());
  if (idx.size() > 1) {
    const double clamp_tol = system.tolerance * system.weights.lpNorm<1>();
    const Vector sub = reduce_dense(gather_columns(system.matrix, idx), gather(x, idx), clamp_tol);
    for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k]) = sub(static_cast<Index>(k));
  } else {
    for (Index j : idx) out(j) = x(j);
  }
  return finish(system, std::move(out));
}

bool satisfies_contract(const ReductionSystem& system, const ReducedSolution& solution,
                        double residual_rel) {
  const Vector& w = solution.weights;
  if (w.size() != system.weights.size()) return false;
  if ((w.array() < 0.0).any()) return false;
  if (static_cast<Index>(solution.support.size()) > system.matrix.rows()) return false;
  std::vector<bool> in_support(static_cast<std::size_t>(w.size()), false);
  for (Index j : solution.support) {
    if (j < 0 || j >= w.size()) return false;
    in_support[static_cast<std::size_t>(j)] = true;
  }
  for (Index j = 0; j < w.size(); ++j) {
    if (!in_support[static_cast<std::size_t>(j)] && w(j) != 0.0) return false;
  }
  const double scale = 1.0 + inf_norm(system.matrix * system.weights);
  const double residual = inf_norm(system.matrix * (w - system.weights));
  return residual <= residual_rel * scale;
}

}  // namespace grim
