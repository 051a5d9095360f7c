#pragma once

#include "grim/geim.hpp"
#include "grim/grim.hpp"
#include "grim/kernel_quadrature.hpp"

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace grim {

// ---------------------------------------------------------------------------
// L2(0,1) demo: features f_{a,b}(x) = (1 + (25 + a cos(b x)) x^2)^{-1/2} on an
// n x n grid of (a, b) in [0.01, 24.9] x [0, 15], functionals are Gaussian
// window averages centred at equally spaced points of [0, 1], phi = sum f.

struct L2DemoSpec {
  Index n_grid = 20;             // parameter points per axis
  Index n_functionals = 1000;    // window centres
  double mollifier_width = 5e-4;
  Index domain_points = 20001;   // uniform grid for L2 norms
  Index local_points = 201;      // per-window integration grid
  double window_halfwidth = 6.0; // in units of mollifier_width
  bool with_gram = true;         // assemble the L2 Gram matrix for the norm oracle

  void validate() const;
};

inline constexpr double kL2DemoAMin = 0.01;
inline constexpr double kL2DemoAMax = 24.9;
inline constexpr double kL2DemoBMin = 0.0;
inline constexpr double kL2DemoBMax = 15.0;

double l2_demo_feature(double a, double b, double x);

struct L2Demo {
  L2DemoSpec spec;
  ProblemInstance instance;
  std::optional<NormOracle> norm;  // present when spec.with_gram
  std::vector<std::pair<double, double>> params;  // (a, b) per feature, a fastest
  Vector centers;
  Vector grid;
  Vector grid_weights;  // composite trapezoid
  Vector phi_on_grid;
};

L2Demo build_l2_demo(const L2DemoSpec& spec);

/// Window average of psi at `center`, as used for every demo functional.
double mollified_average(const std::function<double(double)>& psi, double center,
                         const L2DemoSpec& spec);

struct L2Metrics {
  double l2_error = 0.0;
  double sup_error = 0.0;
};

/// Trapezoid L2 norm of phi - u on the fine grid and max_j |sigma_j(phi - u)|;
/// u is given in the original feature basis.
L2Metrics eval_l2_metrics(const L2Demo& demo, const std::vector<Index>& support,
                          const std::vector<double>& coefficients);
L2Metrics eval_l2_metrics(const L2Demo& demo, const Vector& dense_coefficients);

// ---------------------------------------------------------------------------
// Moment-preserving cubature.

struct MomentSpec {
  int max_degree = 1;
  Index dimension = 1;
};

/// All exponent vectors with total degree <= K, graded then lexicographic.
std::vector<std::vector<int>> multi_indices(int max_degree, Index dimension);

/// Rows are the monomials x^e, |e| <= K, evaluated at every point; includes
/// the constant row.
ProblemInstance build_monomial_cubature(const PointCloud& cloud, const Vector& weights,
                                        const MomentSpec& spec);

struct CubatureResult {
  std::vector<Index> nodes;
  std::vector<double> weights;
  GrimResult run;
};

/// Matches every moment in one GRIM step unless `config` says otherwise.
CubatureResult reduce_cubature(const PointCloud& cloud, const Vector& weights,
                               const MomentSpec& spec,
                               std::optional<GrimConfig> config = std::nullopt);

// ---------------------------------------------------------------------------
// Generic instances from CSV files.

ProblemInstance load_csv_instance(const std::filesystem::path& evaluations,
                                  const std::filesystem::path& weights,
                                  const std::optional<std::filesystem::path>& norms = std::nullopt);

struct LoadedCloud {
  PointCloud cloud;
  std::optional<Vector> weights;
};

/// One point per line; an optional header naming a `weight` column marks it
/// as the weight column.
LoadedCloud load_point_cloud(const std::filesystem::path& path);

}  // namespace grim
