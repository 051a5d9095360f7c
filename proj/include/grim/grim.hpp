#pragma once

// Greedy Recombination Interpolation Method.
//
// Each step grows the set of matched functionals by the k_t functionals with
// the largest current residual |sigma(phi - u)|, then re-solves for u with
// recombination on the enlarged system, keeping the best of s_t row-order
// shuffles. The loop stops once every functional is within epsilon, or after
// max_steps steps.

#include "grim/instance.hpp"
#include "grim/thinning.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace grim {

struct GrimConfig {
  double epsilon = 1e-6;
  // Defaults to 1e-10 * C when unset.
  std::optional<double> epsilon0;
  int max_steps = 1;
  std::vector<int> k_schedule{1};
  std::vector<int> s_schedule{1};
  std::uint64_t seed = 0;
  bool grouped = false;
  RecombinationMethod method = RecombinationMethod::tree;

  /// Constant schedules k_t = k, s_t = s for t = 1..max_steps.
  static GrimConfig uniform(double epsilon, int max_steps, int k, int s, std::uint64_t seed = 0);

  /// k functionals per step until kappa are matched (last step takes the
  /// remainder), so the result has at most kappa + 1 terms.
  static GrimConfig for_budget(double epsilon, int kappa, int k, int s, std::uint64_t seed = 0);

  /// Checks schedule shapes, epsilon ordering and the kappa constraint
  /// sum(k_t) <= min(N - 1, Lambda) (grouped: sum(k_t) <= group count).
  void validate(const ProblemInstance& instance) const;
};

struct GrimStep {
  int step = 0;                // 1-based
  std::vector<Index> added;    // functionals added at this step, in selection order
  int shuffle_winner = 0;      // trial index of the kept recombination
  double residual_sup = 0.0;   // max over all functionals of |sigma(phi - u_t)|
  double selected_residual = 0.0;  // max over the matched functionals
  std::vector<Index> support;      // original feature indices
  std::vector<double> coefficients;  // original f-basis
};

struct GrimTrace {
  std::vector<GrimStep> steps;
  int best_step = 0;  // step with the smallest residual_sup (0 when empty)

  /// All functionals matched by the end of step `t` (1-based), in selection order.
  std::vector<Index> selected_through(int t) const;
};

struct GrimResult {
  std::vector<Index> support;
  std::vector<double> coefficients;
  double achieved_sup = 0.0;
  int steps_completed = 0;
  bool terminated_early = false;
  double mass = 0.0;      // C
  double epsilon0 = 0.0;  // value actually used
  GrimTrace trace;
};

/// The m unselected indices with the largest |residual|, in decreasing
/// order, ties to the lowest index.
std::vector<Index> extension_step(const Vector& residual, std::span<const Index> already_selected,
                                  Index m);

struct GroupExtension {
  std::vector<Index> groups;
  std::vector<Index> rows;  // all rows of the chosen groups, group by group, ascending
};

/// Chooses the m unselected groups whose worst row residual is largest, ties
/// to the lowest group id, and returns all their rows.
GroupExtension grouped_extension_step(const Vector& residual, std::span<const Index> group_of,
                                      std::span<const Index> already_selected_groups,
                                      Index m_groups);

struct RecombinationOutcome {
  Candidate candidate;       // normalized basis
  double e_value = 0.0;      // max_j |sigma_j(phi - u)|
  double selected_residual = 0.0;
  int winner = 0;
};

/// Runs `shuffles` recombination trials over row orderings of `selected`
/// and keeps the one with the smallest full-data residual (ties to the lowest
/// trial). Trial 0 uses the given order; trial t > 0 a permutation drawn from
/// a stream seeded by (seed, step, t). Trials whose residual on `selected`
/// exceeds `selected_bound` are discarded.
RecombinationOutcome recombination_step(const NormalizedInstance& norm,
                                        std::span<const Index> selected, int shuffles,
                                        std::uint64_t seed, int step, double selected_bound,
                                        RecombinationMethod method = RecombinationMethod::tree);

GrimResult run_grim(const ProblemInstance& instance, const GrimConfig& config);

}  // namespace grim
