#include "grim/error.hpp"
#include "grim/recombination.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace grim;

namespace {

ReductionSystem make_system(Matrix a, Vector x) {
  ReductionSystem s;
  s.matrix = std::move(a);
  s.weights = std::move(x);
  return s;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("kernel basis of a duplicate-column matrix") {
  const Matrix k = svd_kernel_basis(rows({{1, 1}, {1, 1}}));
  REQUIRE(k.cols() == 1);
  const double s = k(0, 0) > 0 ? 1.0 : -1.0;
  CHECK(s * k(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s * k(1, 0) == doctest::Approx(-1 / std::sqrt(2.0)));
}

TEST_CASE("kernel basis of a full-rank square matrix is empty") {
  CHECK(svd_kernel_basis(rows({{1, 1}, {0, 1}})).cols() == 0);
}

TEST_CASE("kernel basis of [[1,1,1],[0,1,2]]") {
  const Matrix k = svd_kernel_basis(rows({{1, 1, 1}, {0, 1, 2}}));
  REQUIRE(k.cols() == 1);
  const Vector expected = vec({1, -2, 1}) / std::sqrt(6.0);
  const double s = k(0, 0) > 0 ? 1.0 : -1.0;
  CHECK((s * k.col(0) - expected).norm() < 1e-12);
}

TEST_CASE("kernel basis is orthonormal and annihilated by A") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::random_system_matrix(rng, 4, 12);
    const Matrix k = svd_kernel_basis(a);
    CHECK(k.cols() == 7);
    CHECK((a * k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((k.transpose() * k - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("elimination ties go to the lowest index") {
  const Elimination e = eliminate_direction(vec({1. / 3, 1. / 3, 1. / 3}),
                                            vec({1, -2, 1}) / std::sqrt(6.0));
  CHECK(e.eliminated == 0);
  CHECK(e.weights(0) == 0.0);
  CHECK(e.weights(1) == doctest::Approx(1.0));
  CHECK(e.weights(2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("elimination with a zero ratio leaves the weights alone") {
  const Elimination e = eliminate_direction(vec({1, 0}), vec({0, 1}));
  CHECK(e.theta == 0.0);
  CHECK(e.eliminated == 1);
  CHECK(e.weights(0) == 1.0);
  CHECK(e.weights(1) == 0.0);
}

TEST_CASE("elimination along (1,-1)/sqrt2 from (2,1)") {
  const Elimination e = eliminate_direction(vec({2, 1}), vec({1, -1}) / std::sqrt(2.0));
  CHECK(e.eliminated == 0);
  CHECK(e.theta == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(e.weights(0) == 0.0);
  CHECK(e.weights(1) == doctest::Approx(3.0));
}

TEST_CASE("elimination negates a direction with no positive entry") {
  const Elimination e = eliminate_direction(vec({2, 1}), vec({-1, 1}) / std::sqrt(2.0));
  CHECK(e.eliminated == 1);
  CHECK(e.weights(0) == doctest::Approx(3.0));
}

TEST_CASE("elimination rejects a zero direction") {
  CHECK_THROWS_AS(eliminate_direction(vec({1, 1}), vec({0, 0})), NumericalError);
}

TEST_CASE("basic and tree on the three-point example") {
  const ReductionSystem sys = make_system(rows({{1, 1, 1}, {0, 1, 2}}), Vector::Constant(3, 1. / 3));
  for (const ReducedSolution& r : {recombine_basic(sys), recombine_tree(sys)}) {
    CHECK(r.support.size() <= 2);
    CHECK((sys.matrix * r.weights - vec({1, 1})).cwiseAbs().maxCoeff() < 1e-12);
    const bool middle = std::abs(r.weights(1) - 1.0) < 1e-12;
    const bool ends = std::abs(r.weights(0) - 0.5) < 1e-12 && std::abs(r.weights(2) - 0.5) < 1e-12;
    CHECK((middle || ends));
    CHECK(oracle::matches_vertex(oracle::feasible_vertices(sys.matrix, vec({1, 1})), r.weights));
  }
}

TEST_CASE("symmetric two-point case keeps the mass on one point") {
  const ReductionSystem sys = make_system(rows({{1, 1}}), vec({0.5, 0.5}));
  const ReducedSolution r = recombine_basic(sys);
  REQUIRE(r.support.size() == 1);
  CHECK(r.weights.sum() == doctest::Approx(1.0));
  CHECK(r.weights(r.support[0]) == doctest::Approx(1.0));
}

TEST_CASE("full-rank square system is returned unchanged") {
  const ReductionSystem sys = make_system(rows({{1, 1, 1}, {0, 1, 2}, {0, 1, 4}}), vec({0.2, 0.3, 0.5}));
  for (const ReducedSolution& r : {recombine_basic(sys), recombine_tree(sys)}) {
    CHECK((r.weights - sys.weights).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.support.size() == 3);
  }
}

TEST_CASE("zero-weight columns stay out of the support") {
  std::mt19937_64 rng(5);
  Matrix a = oracle::random_system_matrix(rng, 2, 10);
  Vector x = oracle::random_positive(rng, 10);
  x(3) = 0.0;
  x(7) = 0.0;
  const ReductionSystem sys = make_system(a, x);
  for (const ReducedSolution& r : {recombine_basic(sys), recombine_tree(sys)}) {
    CHECK(r.weights(3) == 0.0);
    CHECK(r.weights(7) == 0.0);
    CHECK(satisfies_contract(sys, r));
  }
}

TEST_CASE("invalid systems are rejected") {
  CHECK_THROWS_AS(recombine_basic(make_system(rows({{1, 2}}), vec({1, 1}))), DataError);
  CHECK_THROWS_AS(recombine_basic(make_system(rows({{1, 1}}), vec({1, -1}))), DataError);
  CHECK_THROWS_AS(recombine_tree(make_system(rows({{1, 1}}), vec({1}))), DataError);
  CHECK_THROWS_AS(svd_kernel_basis(rows({{1, std::nan("")}})), DataError);
}

TEST_CASE("large random system through the tree") {
  std::mt19937_64 rng(4096);
  const ReductionSystem sys =
      make_system(oracle::random_system_matrix(rng, 8, 4096), oracle::random_positive(rng, 4096));
  const ReducedSolution r = recombine_tree(sys);
  CHECK(r.support.size() <= 9);
  CHECK(satisfies_contract(sys, r));
}

TEST_CASE("duplicate columns collapse") {
  const ReductionSystem sys = make_system(rows({{1, 1, 1, 1}, {2, 2, 5, 5}}), vec({.25, .25, .25, .25}));
  for (const ReducedSolution& r : {recombine_basic(sys), recombine_tree(sys)}) {
    CHECK(r.support.size() <= 2);
    CHECK(satisfies_contract(sys, r));
  }
}

TEST_CASE("property: small systems land on an oracle vertex") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick_m(0, 3);
  for (int trial = 0; trial < 150; ++trial) {
    const Index m = pick_m(rng);
    const Index n = std::uniform_int_distribution<Index>(1, 8)(rng);
    const ReductionSystem sys =
        make_system(oracle::random_system_matrix(rng, m, n), oracle::random_positive(rng, n));
    const Vector y = sys.matrix * sys.weights;
    const auto vertices = oracle::feasible_vertices(sys.matrix, y);
    REQUIRE_FALSE(vertices.empty());
    for (const ReducedSolution& r : {recombine_basic(sys), recombine_tree(sys)}) {
      CHECK(satisfies_contract(sys, r));
      CHECK(oracle::matches_vertex(vertices, r.weights));
    }
  }
}

TEST_CASE("property: contract on random medium systems") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = std::uniform_int_distribution<Index>(1, 16)(rng);
    const Index n = std::uniform_int_distribution<Index>(2, 300)(rng);
    ReductionSystem sys =
        make_system(oracle::random_system_matrix(rng, m, n), oracle::random_positive(rng, n));
    const ReducedSolution b = recombine_basic(sys);
    const ReducedSolution t = recombine_tree(sys);
    CHECK(satisfies_contract(sys, b));
    CHECK(satisfies_contract(sys, t));
    CHECK(static_cast<Index>(t.support.size()) <= m + 1);
  }
}
