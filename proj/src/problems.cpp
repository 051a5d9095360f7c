#include "grim/problems.hpp"

#include "grim/csv.hpp"
#include "grim/error.hpp"
#include "grim/log.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace grim {
namespace {

Vector linspace(double lo, double hi, Index n) {
  if (n == 1) return Vector::Constant(1, lo);
  return Vector::LinSpaced(n, lo, hi);
}

Vector trapezoid_weights(Index n, double h) {
  Vector w = Vector::Constant(n, h);
  if (n > 1) {
    w(0) *= 0.5;
    w(n - 1) *= 0.5;
  }
  return w;
}

// Integration nodes and normalized weights of the window centred at `center`.
struct Window {
  Vector nodes;
  Vector weights;  // sum to 1
};

Window make_window(double center, const L2DemoSpec& spec) {
  const double s = spec.mollifier_width;
  const double lo = std::max(0.0, center - spec.window_halfwidth * s);
  const double hi = std::min(1.0, center + spec.window_halfwidth * s);
  Window w;
  w.nodes = Vector::LinSpaced(spec.local_points, lo, hi);
  w.weights = trapezoid_weights(spec.local_points, (hi - lo) / double(spec.local_points - 1));
  for (Index p = 0; p < w.nodes.size(); ++p) {
    const double z = (w.nodes(p) - center) / s;
    w.weights(p) *= std::exp(-0.5 * z * z);
  }
  w.weights /= w.weights.sum();
  return w;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void L2DemoSpec::validate() const {
  if (n_grid < 1) throw ConfigError("L2 demo needs n_grid >= 1");
  if (n_functionals < 1) throw ConfigError("L2 demo needs at least one functional");
  if (!(mollifier_width > 0.0)) throw ConfigError("mollifier width must be > 0");
  if (domain_points < 2 || local_points < 2) throw ConfigError("integration grids need >= 2 points");
  if (!(window_halfwidth > 0.0)) throw ConfigError("window half-width must be > 0");
  const double per_width = mollifier_width * double(domain_points - 1);
  if (per_width < 8.0) {
    throw ConfigError("domain grid too coarse: " + std::to_string(per_width) +
                      " points per mollifier width (need >= 8)");
  }
}

double l2_demo_feature(double a, double b, double x) {
  return 1.0 / std::sqrt(1.0 + (25.0 + a * std::cos(b * x)) * x * x);
}

double mollified_average(const std::function<double(double)>& psi, double center,
                         const L2DemoSpec& spec) {
  const Window w = make_window(center, spec);
  double acc = 0.0;
  for (Index p = 0; p < w.nodes.size(); ++p) acc += w.weights(p) * psi(w.nodes(p));
  return acc;
}

L2Demo build_l2_demo(const L2DemoSpec& spec) {
  spec.validate();
  const Index n = spec.n_grid;
  const Index n_features = n * n;
  const Vector a_values = linspace(kL2DemoAMin, kL2DemoAMax, n);
  const Vector b_values = linspace(kL2DemoBMin, kL2DemoBMax, n);

  L2Demo demo;
  demo.spec = spec;
  demo.params.reserve(static_cast<std::size_t>(n_features));
  for (Index ib = 0; ib < n; ++ib) {
    for (Index ia = 0; ia < n; ++ia) demo.params.emplace_back(a_values(ia), b_values(ib));
  }
  demo.centers = linspace(0.0, 1.0, spec.n_functionals);

  // Feature values at a single x for every feature, a fastest.
  Vector cos_b(n);
  auto fill_values = [&](double x, auto&& sink) {
    for (Index ib = 0; ib < n; ++ib) cos_b(ib) = std::cos(b_values(ib) * x);
    const double x2 = x * x;
    for (Index ib = 0; ib < n; ++ib) {
      for (Index ia = 0; ia < n; ++ia) {
        sink(ib * n + ia, 1.0 / std::sqrt(1.0 + (25.0 + a_values(ia) * cos_b(ib)) * x2));
      }
    }
  };

  Matrix evaluations(spec.n_functionals, n_features);
  Eigen::RowVectorXd row(n_features);
  for (Index k = 0; k < spec.n_functionals; ++k) {
    const Window w = make_window(demo.centers(k), spec);
    row.setZero();
    for (Index p = 0; p < w.nodes.size(); ++p) {
      const double wp = w.weights(p);
      fill_values(w.nodes(p), [&](Index i, double v) { row(i) += wp * v; });
    }
    evaluations.row(k) = row;
  }

  const Index g_count = spec.domain_points;
  demo.grid = Vector::LinSpaced(g_count, 0.0, 1.0);
  demo.grid_weights = trapezoid_weights(g_count, 1.0 / double(g_count - 1));
  demo.phi_on_grid = Vector::Zero(g_count);
  Vector norms_sq = Vector::Zero(n_features);
  Matrix gram;
  if (spec.with_gram) gram = Matrix::Zero(n_features, n_features);

  constexpr Index kBlock = 1024;
  Matrix block(n_features, kBlock);
  for (Index start = 0; start < g_count; start += kBlock) {
    const Index len = std::min(kBlock, g_count - start);
    for (Index c = 0; c < len; ++c) {
      const Index g = start + c;
      fill_values(demo.grid(g), [&](Index i, double v) { block(i, c) = v; });
      demo.phi_on_grid(g) = block.col(c).sum();
    }
    auto used = block.leftCols(len);
    const Vector w = demo.grid_weights.segment(start, len);
    norms_sq += used.array().square().matrix() * w;
    if (spec.with_gram) {
      const Matrix scaled = used * w.cwiseSqrt().asDiagonal();
      gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    }
  }
  if (spec.with_gram) {
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    demo.norm = NormOracle::from_gram(std::move(gram));
  }

  demo.instance =
      ProblemInstance::make(std::move(evaluations), Vector::Ones(n_features), norms_sq.cwiseSqrt());
  return demo;
}

L2Metrics eval_l2_metrics(const L2Demo& demo, const std::vector<Index>& support,
                          const std::vector<double>& coefficients) {
  if (support.size() != coefficients.size()) throw DataError("support/coefficients mismatch");
  const ProblemInstance& inst = demo.instance;
  Vector diff = demo.phi_on_grid;
  Vector sigma = inst.target;
  for (std::size_t s = 0; s < support.size(); ++s) {
    const Index i = support[s];
    if (i < 0 || i >= inst.feature_count()) throw DataError("candidate index out of range");
    const double c = coefficients[s];
    const auto [a, b] = demo.params[static_cast<std::size_t>(i)];
    for (Index g = 0; g < demo.grid.size(); ++g) diff(g) -= c * l2_demo_feature(a, b, demo.grid(g));
    sigma -= c * inst.evaluations.col(i);
  }
  L2Metrics m;
  m.l2_error = std::sqrt(demo.grid_weights.dot(diff.cwiseAbs2()));
  m.sup_error = sigma.cwiseAbs().maxCoeff();
  return m;
}

L2Metrics eval_l2_metrics(const L2Demo& demo, const Vector& dense_coefficients) {
  if (dense_coefficients.size() != demo.instance.feature_count()) {
    throw DataError("coefficient vector length mismatch");
  }
  std::vector<Index> support;
  std::vector<double> coeffs;
  for (Index i = 0; i < dense_coefficients.size(); ++i) {
    if (dense_coefficients(i) != 0.0) {
      support.push_back(i);
      coeffs.push_back(dense_coefficients(i));
    }
  }
  return eval_l2_metrics(demo, support, coeffs);
}

std::vector<std::vector<int>> multi_indices(int max_degree, Index dimension) {
  if (max_degree < 0) throw ConfigError("moment degree must be >= 0");
  if (dimension < 1) throw ConfigError("moment dimension must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(dimension), 0);
  // Exponents of total degree `left` over coordinates pos..d-1.
  auto fill = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == e.size()) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  for (int degree = 0; degree <= max_degree; ++degree) fill(fill, 0, degree);
  return out;
}

ProblemInstance build_monomial_cubature(const PointCloud& cloud, const Vector& weights,
                                        const MomentSpec& spec) {
  cloud.validate();
  if (cloud.dimension() != spec.dimension) throw DataError("cloud dimension does not match spec");
  if (weights.size() != cloud.count()) throw DataError("weights do not match point count");
  if ((weights.array() <= 0.0).any()) throw DataError("cubature weights must be > 0");
  const auto exps = multi_indices(spec.max_degree, spec.dimension);
  Matrix rows(static_cast<Index>(exps.size()), cloud.count());
  for (std::size_t r = 0; r < exps.size(); ++r) {
    for (Index i = 0; i < cloud.count(); ++i) {
      double v = 1.0;
      for (Index k = 0; k < spec.dimension; ++k) {
        const int p = exps[r][static_cast<std::size_t>(k)];
        if (p > 0) v *= std::pow(cloud.points(i, k), p);
      }
      rows(static_cast<Index>(r), i) = v;
    }
  }
  if (!rows.allFinite()) {
    throw DataError("monomial evaluation overflowed; rescale the points into [-1, 1]^d");
  }
  return ProblemInstance::make(std::move(rows), weights);
}

CubatureResult reduce_cubature(const PointCloud& cloud, const Vector& weights,
                               const MomentSpec& spec, std::optional<GrimConfig> config) {
  const ProblemInstance instance = build_monomial_cubature(cloud, weights, spec);
  const Index lambda = instance.functional_count();
  const Index n = instance.feature_count();
  CubatureResult out;
  if (config || lambda <= n - 1) {
    GrimConfig cfg;
    if (config) {
      cfg = *config;
    } else {
      cfg = GrimConfig::uniform(weights.sum(), 1, static_cast<int>(lambda), 1);
    }
    out.run = run_grim(instance, cfg);
  } else {
    // More moments than points - 1: one recombination over every row.
    const NormalizedInstance norm = normalize_instance(instance);
    std::vector<Index> all(static_cast<std::size_t>(lambda));
    for (Index j = 0; j < lambda; ++j) all[static_cast<std::size_t>(j)] = j;
    const Candidate c = recombination_thin(norm, all);
    out.run.support = c.indices;
    out.run.coefficients = to_original_basis(norm, c);
    out.run.mass = norm.mass;
    out.run.achieved_sup = residual_vector(norm, c).cwiseAbs().maxCoeff();
  }
  out.nodes = out.run.support;
  out.weights = out.run.coefficients;
  return out;
}

ProblemInstance load_csv_instance(const std::filesystem::path& evaluations,
                                  const std::filesystem::path& weights,
                                  const std::optional<std::filesystem::path>& norms) {
  Matrix phi = csv::read_matrix(evaluations);
  Vector a = csv::read_vector(weights);
  if (a.size() != phi.cols()) {
    throw DataError(weights.string() + ": " + std::to_string(a.size()) + " weights for " +
                    std::to_string(phi.cols()) + " feature columns in " + evaluations.string());
  }
  std::optional<Vector> nu;
  if (norms) {
    nu = csv::read_vector(*norms);
    if (nu->size() != phi.cols()) {
      throw DataError(norms->string() + ": norm count does not match feature count");
    }
  } else {
    log::info("no feature norms supplied; using unit norms");
  }
  return ProblemInstance::make(std::move(phi), std::move(a), std::move(nu));
}

LoadedCloud load_point_cloud(const std::filesystem::path& path) {
  csv::Table t = csv::read_table(path, true);
  if (t.values.rows() == 0) throw DataError(path.string() + ": no points");
  LoadedCloud out;
  Index weight_col = -1;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string name = lower(t.header[c]);
    if (name == "weight" || name == "w") weight_col = static_cast<Index>(c);
  }
  if (!t.header.empty() && static_cast<Index>(t.header.size()) != t.values.cols()) {
    throw DataError(path.string() + ": header width does not match data width");
  }
  const Index d = t.values.cols() - (weight_col >= 0 ? 1 : 0);
  if (d < 1) throw DataError(path.string() + ": no coordinate columns");
  out.cloud.points.resize(t.values.rows(), d);
  Index dst = 0;
  for (Index c = 0; c < t.values.cols(); ++c) {
    if (c == weight_col) continue;
    out.cloud.points.col(dst++) = t.values.col(c);
  }
  if (weight_col >= 0) out.weights = t.values.col(weight_col);
  out.cloud.validate();
  return out;
}

}  // namespace grim
