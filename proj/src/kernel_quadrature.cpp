#include "grim/kernel_quadrature.hpp"

#include "grim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace grim {
namespace {

void check_bandwidth(const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth)) {
    throw ConfigError("kernel bandwidth must be finite and > 0");
  }
}

}  // namespace

void PointCloud::validate() const {
  if (points.rows() == 0) throw DataError("point cloud is empty");
  if (points.cols() < 1) throw DataError("points need at least one coordinate");
  if (!points.allFinite()) throw DataError("point cloud has non-finite coordinates");
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, const KernelSpec& spec) {
  check_bandwidth(spec);
  if (x.size() != y.size()) throw DataError("kernel arguments differ in dimension");
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    sq += d * d;
  }
  return std::exp(-sq / (2.0 * spec.bandwidth * spec.bandwidth));
}

double median_heuristic(const PointCloud& cloud, Index max_sample, std::uint64_t seed) {
  cloud.validate();
  if (max_sample < 2) throw ConfigError("median heuristic needs max_sample >= 2");
  const Index n = cloud.count();
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  if (n > max_sample) {
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(max_sample));
  }
  if (rows.size() < 2) throw DataError("median heuristic needs at least two points");

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      dist.push_back((cloud.points.row(rows[a]) - cloud.points.row(rows[b])).norm());
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw DataError("median pairwise distance is zero; bandwidth undefined");
  return median;
}

Matrix gram_matrix(const PointCloud& cloud, const KernelSpec& spec) {
  cloud.validate();
  check_bandwidth(spec);
  const Index n = cloud.count();
  const double scale = -1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  const Matrix pts = cloud.points.transpose();  // d x N, columns contiguous
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    g(j, j) = 1.0;
    for (Index i = j + 1; i < n; ++i) {
      const double v = std::exp(scale * (pts.col(i) - pts.col(j)).squaredNorm());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double wce_squared(const Vector& a, const Vector& w, const Matrix& gram) {
  if (a.size() != w.size() || gram.rows() != a.size() || gram.cols() != a.size()) {
    throw DataError("WCE dimension mismatch");
  }
  const Vector d = a - w;
  const double value = d.dot(gram * d);
  if (value < 0.0 && value >= -1e-10) return 0.0;
  return value;
}

double functional_sup_distance(Index i, Index j, const PointCloud& cloud, const KernelSpec& spec) {
  cloud.validate();
  const Index n = cloud.count();
  if (i < 0 || j < 0 || i >= n || j >= n) throw DataError("functional index out of range");
  if (i == j) return 0.0;
  const Vector xi = cloud.points.row(i).transpose();
  const Vector xj = cloud.points.row(j).transpose();
  const auto d = static_cast<std::size_t>(cloud.dimension());
  double best = 0.0;
  for (Index z = 0; z < n; ++z) {
    const Vector pz = cloud.points.row(z).transpose();
    const std::span<const double> at(pz.data(), d);
    const double diff = rbf_kernel(at, {xi.data(), d}, spec) - rbf_kernel(at, {xj.data(), d}, spec);
    best = std::max(best, std::abs(diff));
  }
  return best;
}

Matrix functional_distance_matrix(const Matrix& gram) {
  const Index n = gram.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = (gram.col(i) - gram.col(j)).cwiseAbs().maxCoeff();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

ProblemInstance kernel_quadrature_instance(const PointCloud& cloud, const Vector& mu_weights,
                                           const KernelSpec& spec) {
  cloud.validate();
  if (mu_weights.size() != cloud.count()) throw DataError("weights do not match point count");
  if ((mu_weights.array() <= 0.0).any()) throw DataError("quadrature weights must be > 0");
  if (std::abs(mu_weights.sum() - 1.0) > 1e-10) throw DataError("quadrature weights must sum to 1");
  return ProblemInstance::make(gram_matrix(cloud, spec), mu_weights);
}

QuadratureResult kernel_quadrature_grim(const PointCloud& cloud, const Vector& mu_weights,
                                        const KernelSpec& spec, const GrimConfig& config) {
  ProblemInstance instance = kernel_quadrature_instance(cloud, mu_weights, spec);
  QuadratureResult out;
  out.run = run_grim(instance, config);
  out.node_indices = out.run.support;
  out.weights = out.run.coefficients;
  Vector w = Vector::Zero(cloud.count());
  for (std::size_t s = 0; s < out.node_indices.size(); ++s) w(out.node_indices[s]) = out.weights[s];
  out.wce_squared = wce_squared(mu_weights, w, instance.evaluations);
  return out;
}

}  // namespace grim
