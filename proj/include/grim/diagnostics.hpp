#pragma once

// Geometry of the functional set that bounds how many steps GRIM can take:
// packing and covering numbers of the functionals under a caller-supplied
// dual-norm distance matrix, plus checks of the separation and step-count
// corollaries on completed runs.

#include "grim/grim.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace grim {

/// Symmetric, zero-diagonal, non-negative; throws DataError otherwise.
void validate_distance_matrix(const Matrix& dist);

struct SubsetEstimate {
  Index count = 0;
  std::vector<Index> indices;
};

/// Farthest-point packing from index 0: keeps adding the point farthest from
/// the chosen set while that distance exceeds r. Always a valid packing.
SubsetEstimate greedy_packing_estimate(const Matrix& dist, double r);

/// Greedy set cover by closed r-balls centred at data points, largest
/// uncovered count first, ties to the lowest index.
SubsetEstimate greedy_covering_estimate(const Matrix& dist, double r);

/// Largest subset with all pairwise distances > r (branch and bound).
/// Limited to kMaxExhaustive points.
SubsetEstimate exact_packing_number(const Matrix& dist, double r);

/// Fewest data-centred closed r-balls covering every point. Limited to
/// kMaxExhaustive points.
SubsetEstimate exact_covering_number(const Matrix& dist, double r);

inline constexpr Index kMaxExhaustive = 20;

struct SeparationReport {
  bool applicable = false;
  std::string reason;  // why not applicable
  double threshold = 0.0;  // (eps - eps0) / (2 C)
  double min_distance = 0.0;
  std::vector<std::pair<Index, Index>> violations;
  bool passed() const { return applicable && violations.empty(); }
};

/// Checks every pair of selected functionals is at least (eps - eps0)/(2C)
/// apart. Only meaningful for runs with one functional and one shuffle per step.
SeparationReport separation_check(const GrimTrace& trace, const Matrix& dist, double epsilon,
                                  double epsilon0, double mass,
                                  const std::vector<int>& k_schedule,
                                  const std::vector<int>& s_schedule);

struct StepBoundReport {
  int steps_completed = 0;
  Index hard_cap = 0;  // min(N - 1, Lambda)
  bool within_hard_cap = false;
  double radius = 0.0;  // (eps - eps0) / (2 C)
  Index packing_bound = 0;
  bool packing_exact = false;  // false: greedy lower estimate only
  std::optional<bool> within_packing_bound;  // set only when packing_exact
};

StepBoundReport step_bound_report(const GrimTrace& trace, const Matrix& dist, double epsilon,
                                  double epsilon0, double mass, Index n_features, Index lambda);

nlohmann::json to_json(const SeparationReport& report);
nlohmann::json to_json(const StepBoundReport& report);

}  // namespace grim
