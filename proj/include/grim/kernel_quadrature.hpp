#pragma once

// Kernel quadrature on an empirical measure mu = sum_i mu_i delta_{x_i}.
// Features are the point masses (unit total-variation norm) and functionals
// the kernel sections k(x_j, .), so matching every functional means matching
// the kernel mean embedding of mu on the cloud.

#include "grim/grim.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace grim {

struct PointCloud {
  Matrix points;  // N x d, one point per row

  Index count() const { return points.rows(); }
  Index dimension() const { return points.cols(); }
  void validate() const;
};

struct KernelSpec {
  double bandwidth = 1.0;  // lambda in exp(-|x - y|^2 / (2 lambda^2))
};

struct QuadratureResult {
  std::vector<Index> node_indices;
  std::vector<double> weights;
  double wce_squared = 0.0;
  GrimResult run;
};

double rbf_kernel(std::span<const double> x, std::span<const double> y, const KernelSpec& spec);

/// Median pairwise Euclidean distance over a uniform subsample of at most
/// `max_sample` points (all points when the cloud is smaller).
double median_heuristic(const PointCloud& cloud, Index max_sample = 1000, std::uint64_t seed = 0);

Matrix gram_matrix(const PointCloud& cloud, const KernelSpec& spec);

/// (a - w)' K (a - w), the squared worst-case error over the RKHS unit ball.
double wce_squared(const Vector& a, const Vector& w, const Matrix& gram);

/// max_z |k(z, x_i) - k(z, x_j)| over the cloud.
double functional_sup_distance(Index i, Index j, const PointCloud& cloud, const KernelSpec& spec);

/// Same quantity for all pairs, using a precomputed Gram matrix.
Matrix functional_distance_matrix(const Matrix& gram);

/// Instance with evaluations = Gram, weights = mu, unit norms.
ProblemInstance kernel_quadrature_instance(const PointCloud& cloud, const Vector& mu_weights,
                                           const KernelSpec& spec);

QuadratureResult kernel_quadrature_grim(const PointCloud& cloud, const Vector& mu_weights,
                                        const KernelSpec& spec, const GrimConfig& config);

}  // namespace grim
