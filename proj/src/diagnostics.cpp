#include "grim/diagnostics.hpp"

#include "grim/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace grim {
namespace {

using Mask = std::uint32_t;

void require_small(const Matrix& dist) {
  if (dist.rows() > kMaxExhaustive) {
    throw ConfigError("exhaustive search limited to " + std::to_string(kMaxExhaustive) + " points");
  }
}

void require_radius(double r) {
  if (!(r > 0.0)) throw ConfigError("radius must be > 0");
}

std::vector<Index> mask_to_indices(Mask m) {
  std::vector<Index> out;
  for (Index i = 0; m != 0; ++i, m >>= 1) {
    if (m & 1u) out.push_back(i);
  }
  return out;
}

struct CliqueSearch {
  const std::vector<Mask>& adjacent;
  int best = 0;
  Mask best_set = 0;

  void run(Mask chosen, Mask candidates, int count) {
    if (candidates == 0) {
      if (count > best) {
        best = count;
        best_set = chosen;
      }
      return;
    }
    if (count + std::popcount(candidates) <= best) return;
    const int v = std::countr_zero(candidates);
    const Mask bit = Mask{1} << v;
    run(chosen | bit, candidates & adjacent[static_cast<std::size_t>(v)], count + 1);
    run(chosen, candidates & ~bit, count);
  }
};

bool cover_search(const std::vector<Mask>& balls, Mask full, Mask covered, int start, int left,
                  Mask chosen, Mask& found) {
  if (covered == full) {
    found = chosen;
    return true;
  }
  if (left == 0) return false;
  // The lowest uncovered point must be covered by one of the remaining picks.
  const int target = std::countr_zero(static_cast<Mask>(full & ~covered));
  for (int c = start; c < static_cast<int>(balls.size()); ++c) {
    if (!(balls[static_cast<std::size_t>(c)] & (Mask{1} << target))) continue;
    if (cover_search(balls, full, covered | balls[static_cast<std::size_t>(c)], 0, left - 1,
                     chosen | (Mask{1} << c), found)) {
      return true;
    }
  }
  return false;
}

}  // namespace

void validate_distance_matrix(const Matrix& dist) {
  if (dist.rows() != dist.cols()) throw DataError("distance matrix must be square");
  for (Index i = 0; i < dist.rows(); ++i) {
    if (dist(i, i) != 0.0) throw DataError("distance matrix diagonal must be zero");
    for (Index j = 0; j < i; ++j) {
      if (!(dist(i, j) >= 0.0)) throw DataError("distances must be non-negative");
      if (std::abs(dist(i, j) - dist(j, i)) > 1e-12 * (1.0 + std::abs(dist(i, j)))) {
        throw DataError("distance matrix must be symmetric");
      }
    }
  }
}

SubsetEstimate greedy_packing_estimate(const Matrix& dist, double r) {
  validate_distance_matrix(dist);
  require_radius(r);
  SubsetEstimate out;
  const Index n = dist.rows();
  if (n == 0) return out;
  Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
  Index next = 0;
  while (true) {
    out.indices.push_back(next);
    nearest = nearest.cwiseMin(dist.col(next));
    Index far = 0;
    for (Index i = 1; i < n; ++i) {
      if (nearest(i) > nearest(far)) far = i;
    }
    if (!(nearest(far) > r)) break;
    next = far;
  }
  out.count = static_cast<Index>(out.indices.size());
  return out;
}

SubsetEstimate greedy_covering_estimate(const Matrix& dist, double r) {
  validate_distance_matrix(dist);
  require_radius(r);
  SubsetEstimate out;
  const Index n = dist.rows();
  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  Index remaining = n;
  while (remaining > 0) {
    Index best = -1;
    Index best_gain = 0;
    for (Index c = 0; c < n; ++c) {
      Index gain = 0;
      for (Index i = 0; i < n; ++i) {
        if (!covered[static_cast<std::size_t>(i)] && dist(i, c) <= r) ++gain;
      }
      if (gain > best_gain) {
        best = c;
        best_gain = gain;
      }
    }
    out.indices.push_back(best);
    for (Index i = 0; i < n; ++i) {
      if (!covered[static_cast<std::size_t>(i)] && dist(i, best) <= r) {
        covered[static_cast<std::size_t>(i)] = true;
        --remaining;
      }
    }
  }
  out.count = static_cast<Index>(out.indices.size());
  return out;
}

SubsetEstimate exact_packing_number(const Matrix& dist, double r) {
  validate_distance_matrix(dist);
  require_radius(r);
  require_small(dist);
  const Index n = dist.rows();
  std::vector<Mask> adjacent(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && dist(i, j) > r) adjacent[static_cast<std::size_t>(i)] |= Mask{1} << j;
    }
  }
  CliqueSearch search{adjacent};
  const Mask all = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
  search.run(0, all, 0);
  return {static_cast<Index>(search.best), mask_to_indices(search.best_set)};
}

SubsetEstimate exact_covering_number(const Matrix& dist, double r) {
  validate_distance_matrix(dist);
  require_radius(r);
  require_small(dist);
  const Index n = dist.rows();
  if (n == 0) return {};
  std::vector<Mask> balls(static_cast<std::size_t>(n), 0);
  for (Index c = 0; c < n; ++c) {
    for (Index i = 0; i < n; ++i) {
      if (dist(i, c) <= r) balls[static_cast<std::size_t>(c)] |= Mask{1} << i;
    }
  }
  const Mask full = static_cast<Mask>((std::uint64_t{1} << n) - 1);
  for (int k = 1; k <= n; ++k) {
    Mask found = 0;
    if (cover_search(balls, full, 0, 0, k, 0, found)) {
      return {static_cast<Index>(k), mask_to_indices(found)};
    }
  }
  return {};  // unreachable: every point covers itself
}

SeparationReport separation_check(const GrimTrace& trace, const Matrix& dist, double epsilon,
                                  double epsilon0, double mass,
                                  const std::vector<int>& k_schedule,
                                  const std::vector<int>& s_schedule) {
  SeparationReport out;
  const auto not_one = [](int v) { return v != 1; };
  if (std::any_of(k_schedule.begin(), k_schedule.end(), not_one) ||
      std::any_of(s_schedule.begin(), s_schedule.end(), not_one)) {
    out.reason = "separation holds only for one functional and one shuffle per step";
    return out;
  }
  validate_distance_matrix(dist);
  out.applicable = true;
  out.threshold = (epsilon - epsilon0) / (2.0 * mass);
  const int last = trace.steps.empty() ? 0 : trace.steps.back().step;
  const std::vector<Index> selected = trace.selected_through(last);
  out.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < selected.size(); ++a) {
    for (std::size_t b = a + 1; b < selected.size(); ++b) {
      const double d = dist(selected[a], selected[b]);
      out.min_distance = std::min(out.min_distance, d);
      if (d < out.threshold) out.violations.emplace_back(selected[a], selected[b]);
    }
  }
  if (selected.size() < 2) out.min_distance = 0.0;
  return out;
}

StepBoundReport step_bound_report(const GrimTrace& trace, const Matrix& dist, double epsilon,
                                  double epsilon0, double mass, Index n_features, Index lambda) {
  StepBoundReport out;
  out.steps_completed = trace.steps.empty() ? 0 : trace.steps.back().step;
  out.hard_cap = std::min(n_features - 1, lambda);
  out.within_hard_cap = out.steps_completed <= out.hard_cap;
  out.radius = (epsilon - epsilon0) / (2.0 * mass);
  if (dist.rows() <= kMaxExhaustive) {
    out.packing_bound = exact_packing_number(dist, out.radius).count;
    out.packing_exact = true;
    out.within_packing_bound = out.steps_completed <= out.packing_bound;
  } else {
    out.packing_bound = greedy_packing_estimate(dist, out.radius).count;
  }
  return out;
}

nlohmann::json to_json(const SeparationReport& report) {
  nlohmann::json j;
  j["applicable"] = report.applicable;
  if (!report.applicable) {
    j["reason"] = report.reason;
    return j;
  }
  j["threshold"] = report.threshold;
  j["min_distance"] = report.min_distance;
  j["violations"] = report.violations.size();
  j["passed"] = report.passed();
  return j;
}

nlohmann::json to_json(const StepBoundReport& report) {
  nlohmann::json j;
  j["steps_completed"] = report.steps_completed;
  j["hard_cap"] = report.hard_cap;
  j["within_hard_cap"] = report.within_hard_cap;
  j["radius"] = report.radius;
  j["packing_bound"] = report.packing_bound;
  j["packing_bound_kind"] = report.packing_exact ? "exact" : "greedy_lower_estimate";
  if (report.within_packing_bound) j["within_packing_bound"] = *report.within_packing_bound;
  return j;
}

}  // namespace grim
