#include "grim/diagnostics.hpp"
#include "grim/error.hpp"
#include "grim/kernel_quadrature.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace grim;

namespace {

Matrix random_distances(std::mt19937_64& rng, Index n) {
  // Euclidean distances of random points in the plane: a genuine metric.
  const Matrix p = oracle::random_matrix(rng, n, 2);
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
  }
  return d;
}

bool is_packing(const Matrix& d, const std::vector<Index>& idx, double r) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (!(d(idx[a], idx[b]) > r)) return false;
    }
  }
  return true;
}

bool is_cover(const Matrix& d, const std::vector<Index>& centers, double r) {
  for (Index i = 0; i < d.rows(); ++i) {
    bool hit = false;
    for (Index c : centers) hit = hit || d(i, c) <= r;
    if (!hit) return false;
  }
  return true;
}

struct KernelRun {
  ProblemInstance instance;
  Matrix dist;
  GrimResult result;
  GrimConfig config;
};

KernelRun kernel_run(std::uint64_t seed, Index n, double epsilon) {
  std::mt19937_64 rng(seed);
  PointCloud c;
  c.points = oracle::random_matrix(rng, n, 2);
  const KernelSpec spec{median_heuristic(c)};
  ProblemInstance inst = kernel_quadrature_instance(c, Vector::Constant(n, 1.0 / static_cast<double>(n)), spec);
  GrimConfig cfg = GrimConfig::uniform(epsilon, static_cast<int>(n - 1), 1, 1, seed);
  GrimResult r = run_grim(inst, cfg);
  return {std::move(inst), functional_distance_matrix(gram_matrix(c, spec)), std::move(r), cfg};
}

}  // namespace

TEST_CASE("packing and covering on four line points") {
  const Matrix d = oracle::line_distances({0, 1, 2, 3});
  const SubsetEstimate gp = greedy_packing_estimate(d, 1.5);
  CHECK(gp.count == 2);
  CHECK(is_packing(d, gp.indices, 1.5));
  CHECK(exact_packing_number(d, 1.5).count == 2);
  CHECK(oracle::brute_force_packing(d, 1.5) == 2);

  const SubsetEstimate gc = greedy_covering_estimate(d, 1.0);
  CHECK(gc.count == 2);
  CHECK(is_cover(d, gc.indices, 1.0));
  CHECK(exact_covering_number(d, 1.0).count == 2);
}

TEST_CASE("trivial packings and covers") {
  const Matrix close = oracle::line_distances({0, 0.1, 0.2});
  CHECK(greedy_packing_estimate(close, 1.0).count == 1);
  CHECK(exact_packing_number(close, 1.0).count == 1);
  const Matrix two = oracle::line_distances({0, 5});
  CHECK(greedy_packing_estimate(two, 1.0).count == 2);
  CHECK(greedy_covering_estimate(two, 1.0).count == 2);
  CHECK(greedy_covering_estimate(Matrix::Zero(1, 1), 1.0).count == 1);
}

TEST_CASE("distance matrix validation and limits") {
  Matrix asym = oracle::line_distances({0, 1});
  asym(0, 1) = 2;
  CHECK_THROWS_AS(validate_distance_matrix(asym), DataError);
  Matrix diag = oracle::line_distances({0, 1});
  diag(1, 1) = 0.5;
  CHECK_THROWS_AS(validate_distance_matrix(diag), DataError);
  CHECK_THROWS_AS(validate_distance_matrix(-oracle::line_distances({0, 1})), DataError);
  CHECK_THROWS_AS(validate_distance_matrix(Matrix::Zero(2, 3)), DataError);
  CHECK_THROWS_AS(greedy_packing_estimate(oracle::line_distances({0, 1}), 0.0), ConfigError);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(exact_packing_number(random_distances(rng, 21), 0.5), ConfigError);
}

TEST_CASE("property: exact numbers agree with exhaustive search") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 12)(rng);
    const Matrix d = random_distances(rng, n);
    const double r = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    const SubsetEstimate pack = exact_packing_number(d, r);
    const SubsetEstimate cov = exact_covering_number(d, r);
    CHECK(pack.count == oracle::brute_force_packing(d, r));
    CHECK(cov.count == oracle::brute_force_covering(d, r));
    CHECK(is_packing(d, pack.indices, r));
    CHECK(is_cover(d, cov.indices, r));

    const SubsetEstimate gp = greedy_packing_estimate(d, r);
    const SubsetEstimate gc = greedy_covering_estimate(d, r);
    CHECK(is_packing(d, gp.indices, r));
    CHECK(is_cover(d, gc.indices, r));
    CHECK(gp.count <= pack.count);
    CHECK(gc.count >= cov.count);
    // N_pack(2r) <= N_cov(r) <= N_pack(r).
    CHECK(exact_packing_number(d, 2 * r).count <= cov.count);
    CHECK(cov.count <= pack.count);
  }
}

TEST_CASE("separation check guards") {
  GrimTrace one;
  one.steps.push_back(GrimStep{1, {3}, 0, 0.0, 0.0, {}, {}});
  const Matrix d = oracle::line_distances({0, 1, 2, 3});
  const SeparationReport single = separation_check(one, d, 1e-3, 1e-10, 1.0, {1}, {1});
  CHECK(single.applicable);
  CHECK(single.passed());
  CHECK(single.min_distance == 0.0);

  const SeparationReport k4 = separation_check(one, d, 1e-3, 1e-10, 1.0, {4}, {1});
  CHECK_FALSE(k4.applicable);
  CHECK_FALSE(k4.passed());
  CHECK_FALSE(k4.reason.empty());
  CHECK_FALSE(separation_check(one, d, 1e-3, 1e-10, 1.0, {1}, {2}).applicable);

  // A planted violation: functionals 0 and 1 are closer than the threshold.
  GrimTrace two = one;
  two.steps[0].added = {0};
  two.steps.push_back(GrimStep{2, {1}, 0, 0.0, 0.0, {}, {}});
  const SeparationReport bad = separation_check(two, d, 4.0, 0.0, 1.0, {1}, {1});
  CHECK(bad.threshold == 2.0);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0] == std::pair<Index, Index>{0, 1});
  CHECK(bad.min_distance == 1.0);
  CHECK(to_json(bad)["violations"].size() == 1);
}

TEST_CASE("step bound on the hand instance") {
  Matrix phi(2, 3);
  phi << 1, 0, 1, 0, 1, 1;
  const ProblemInstance inst = ProblemInstance::make(phi, Vector::Ones(3));
  const GrimResult r = run_grim(inst, GrimConfig::uniform(1e-6, 2, 1, 1));
  const Matrix d = oracle::line_distances({0, 1});
  const StepBoundReport rep = step_bound_report(r.trace, d, 1e-6, r.epsilon0, r.mass, 3, 2);
  CHECK(rep.steps_completed == 2);
  CHECK(rep.hard_cap == 2);
  CHECK(rep.within_hard_cap);
  CHECK(rep.packing_exact);
  CHECK(rep.packing_bound == 2);
  REQUIRE(rep.within_packing_bound.has_value());
  CHECK(*rep.within_packing_bound);
  CHECK(to_json(rep)["packing_bound_kind"] == "exact");
}

TEST_CASE("a representable target takes one step") {
  Matrix phi(3, 2);
  phi << 1, 1, 2, 2, 3, 3;
  const ProblemInstance inst = ProblemInstance::make(phi, Vector::Constant(2, 0.5));
  const GrimResult r = run_grim(inst, GrimConfig::uniform(1e-6, 1, 1, 1));
  const StepBoundReport rep =
      step_bound_report(r.trace, oracle::line_distances({0, 1, 2}), 1e-6, r.epsilon0, r.mass, 2, 3);
  CHECK(rep.steps_completed == 1);
  CHECK(rep.within_hard_cap);
}

TEST_CASE("kernel runs respect separation and the packing bound") {
  int max_steps_seen = 0;
  for (double eps : {0.02, 0.05, 0.1, 0.2}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const KernelRun k = kernel_run(seed, 10, eps);
      const GrimResult& r = k.result;
      const SeparationReport sep =
          separation_check(r.trace, k.dist, eps, r.epsilon0, r.mass, k.config.k_schedule, k.config.s_schedule);
      CHECK(sep.passed());
      const StepBoundReport rep = step_bound_report(r.trace, k.dist, eps, r.epsilon0, r.mass, 10, 10);
      CHECK(rep.within_hard_cap);
      REQUIRE(rep.within_packing_bound.has_value());
      CHECK(*rep.within_packing_bound);
      CHECK(rep.packing_bound == oracle::brute_force_packing(k.dist, rep.radius));
      max_steps_seen = std::max(max_steps_seen, r.steps_completed);
    }
  }
  CHECK(max_steps_seen >= 3);
}

TEST_CASE("large matrices fall back to the greedy estimate") {
  const KernelRun k = kernel_run(8, 30, 0.05);
  const StepBoundReport rep = step_bound_report(k.result.trace, k.dist, 0.05, k.result.epsilon0,
                                                k.result.mass, 30, 30);
  CHECK_FALSE(rep.packing_exact);
  CHECK_FALSE(rep.within_packing_bound.has_value());
  CHECK(to_json(rep)["packing_bound_kind"] == "greedy_lower_estimate");
}
