#include "grim/grim.hpp"

#include "grim/error.hpp"
#include "grim/log.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace grim {
namespace {

std::mt19937_64 trial_stream(std::uint64_t seed, int step, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

// Orders (index, |value|) pairs by decreasing magnitude, then increasing index.
struct ByMagnitude {
  const Vector& values;
  bool operator()(Index a, Index b) const {
    const double va = values(a);
    const double vb = values(b);
    if (va != vb) return va > vb;
    return a < b;
  }
};

Index group_count_of(std::span<const Index> group_of) {
  Index count = 0;
  for (Index g : group_of) count = std::max(count, g + 1);
  return count;
}

}  // namespace

GrimConfig GrimConfig::uniform(double epsilon, int max_steps, int k, int s, std::uint64_t seed) {
  GrimConfig c;
  c.epsilon = epsilon;
  c.max_steps = max_steps;
  c.k_schedule.assign(static_cast<std::size_t>(std::max(max_steps, 0)), k);
  c.s_schedule.assign(static_cast<std::size_t>(std::max(max_steps, 0)), s);
  c.seed = seed;
  return c;
}

GrimConfig GrimConfig::for_budget(double epsilon, int kappa, int k, int s, std::uint64_t seed) {
  if (kappa < 1 || k < 1) throw ConfigError("budget and per-step count must be >= 1");
  GrimConfig c;
  c.epsilon = epsilon;
  c.k_schedule.clear();
  for (int left = kappa; left > 0; left -= k) c.k_schedule.push_back(std::min(k, left));
  c.max_steps = static_cast<int>(c.k_schedule.size());
  c.s_schedule.assign(c.k_schedule.size(), s);
  c.seed = seed;
  return c;
}

void GrimConfig::validate(const ProblemInstance& instance) const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (epsilon0 && !(*epsilon0 >= 0.0 && *epsilon0 < epsilon)) {
    throw ConfigError("epsilon0 must lie in [0, epsilon)");
  }
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  const auto m = static_cast<std::size_t>(max_steps);
  if (k_schedule.size() != m || s_schedule.size() != m) {
    throw ConfigError("k/s schedules must have max_steps entries");
  }
  long long kappa = 0;
  for (std::size_t t = 0; t < m; ++t) {
    if (k_schedule[t] < 1) throw ConfigError("k_schedule entries must be >= 1");
    if (s_schedule[t] < 1) throw ConfigError("s_schedule entries must be >= 1");
    kappa += k_schedule[t];
  }
  if (grouped) {
    if (!instance.group_of) throw ConfigError("grouped extension needs a group map");
    const Index groups = group_count_of(*instance.group_of);
    if (kappa > groups) {
      throw ConfigError("sum of k_schedule (" + std::to_string(kappa) + ") exceeds group count " +
                        std::to_string(groups));
    }
  } else {
    // A single feature still gets one step, which returns it unchanged.
    const long long cap = std::min<long long>(std::max<Index>(instance.feature_count() - 1, 1),
                                              instance.functional_count());
    if (kappa > cap) {
      throw ConfigError("sum of k_schedule (" + std::to_string(kappa) +
                        ") exceeds min(N - 1, Lambda) = " + std::to_string(cap));
    }
  }
}

std::vector<Index> GrimTrace::selected_through(int t) const {
  std::vector<Index> out;
  for (const GrimStep& s : steps) {
    if (s.step > t) break;
    out.insert(out.end(), s.added.begin(), s.added.end());
  }
  return out;
}

std::vector<Index> extension_step(const Vector& residual, std::span<const Index> already_selected,
                                  Index m) {
  const Index lambda = residual.size();
  std::vector<bool> taken(static_cast<std::size_t>(lambda), false);
  for (Index j : already_selected) {
    if (j < 0 || j >= lambda) throw DataError("selected index out of range");
    taken[static_cast<std::size_t>(j)] = true;
  }
  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(lambda));
  for (Index j = 0; j < lambda; ++j) {
    if (!taken[static_cast<std::size_t>(j)]) pool.push_back(j);
  }
  if (m < 1 || m > static_cast<Index>(pool.size())) {
    throw ConfigError("extension by " + std::to_string(m) + " exceeds the " +
                      std::to_string(pool.size()) + " remaining functionals");
  }
  const Vector magnitude = residual.cwiseAbs();
  std::partial_sort(pool.begin(), pool.begin() + m, pool.end(), ByMagnitude{magnitude});
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

GroupExtension grouped_extension_step(const Vector& residual, std::span<const Index> group_of,
                                      std::span<const Index> already_selected_groups,
                                      Index m_groups) {
  if (static_cast<Index>(group_of.size()) != residual.size()) {
    throw DataError("group map length does not match residual length");
  }
  const Index groups = group_count_of(group_of);
  Vector worst = Vector::Constant(groups, -1.0);
  for (std::size_t j = 0; j < group_of.size(); ++j) {
    const Index g = group_of[j];
    worst(g) = std::max(worst(g), std::abs(residual(static_cast<Index>(j))));
  }
  // Empty group ids never get picked.
  std::vector<Index> selected_mask(static_cast<std::size_t>(groups), 0);
  for (Index g : already_selected_groups) {
    if (g < 0 || g >= groups) throw DataError("selected group out of range");
    selected_mask[static_cast<std::size_t>(g)] = 1;
  }
  std::vector<Index> pool;
  for (Index g = 0; g < groups; ++g) {
    if (!selected_mask[static_cast<std::size_t>(g)] && worst(g) >= 0.0) pool.push_back(g);
  }
  if (m_groups < 1 || m_groups > static_cast<Index>(pool.size())) {
    throw ConfigError("grouped extension by " + std::to_string(m_groups) + " exceeds the " +
                      std::to_string(pool.size()) + " remaining groups");
  }
  std::partial_sort(pool.begin(), pool.begin() + m_groups, pool.end(), ByMagnitude{worst});
  pool.resize(static_cast<std::size_t>(m_groups));

  GroupExtension out;
  out.groups = pool;
  for (Index g : pool) {
    for (std::size_t j = 0; j < group_of.size(); ++j) {
      if (group_of[j] == g) out.rows.push_back(static_cast<Index>(j));
    }
  }
  return out;
}

RecombinationOutcome recombination_step(const NormalizedInstance& norm,
                                        std::span<const Index> selected, int shuffles,
                                        std::uint64_t seed, int step, double selected_bound,
                                        RecombinationMethod method) {
  if (shuffles < 1) throw ConfigError("shuffle count must be >= 1");
  std::optional<RecombinationOutcome> best;
  std::string last_failure;
  std::vector<Index> order(selected.begin(), selected.end());
  for (int trial = 0; trial < shuffles; ++trial) {
    if (trial > 0) {
      order.assign(selected.begin(), selected.end());
      auto rng = trial_stream(seed, step, trial);
      std::shuffle(order.begin(), order.end(), rng);
    }
    Candidate candidate;
    try {
      candidate = recombination_thin(norm, order, method);
    } catch (const NumericalError& e) {
      last_failure = e.what();
      log::debug("trial " + std::to_string(trial) + " failed: " + last_failure);
      continue;
    }
    const Vector residual = residual_vector(norm, candidate);
    double on_selected = 0.0;
    for (Index j : selected) on_selected = std::max(on_selected, std::abs(residual(j)));
    if (on_selected > selected_bound) {
      last_failure = "residual " + std::to_string(on_selected) + " on matched functionals";
      continue;
    }
    const double e_value = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
    if (!best || e_value < best->e_value) {
      best = RecombinationOutcome{std::move(candidate), e_value, on_selected, trial};
    }
  }
  if (!best) {
    throw NumericalError("every recombination trial failed at step " + std::to_string(step) +
                         ": " + last_failure);
  }
  return std::move(*best);
}

GrimResult run_grim(const ProblemInstance& instance, const GrimConfig& config) {
  config.validate(instance);
  const NormalizedInstance norm = normalize_instance(instance);
  const double mass = norm.mass;
  const double eps0 = config.epsilon0.value_or(1e-10 * mass);
  if (!(eps0 < config.epsilon)) throw ConfigError("epsilon0 must be smaller than epsilon");
  const double selected_bound = eps0 + 1e-9 * mass;

  GrimResult result;
  result.mass = mass;
  result.epsilon0 = eps0;

  std::vector<Index> selected;
  std::vector<Index> selected_groups;
  Vector residual = norm.target;  // u_0 = 0
  Candidate current;
  double current_sup = residual.cwiseAbs().maxCoeff();

  for (int t = 1; t <= config.max_steps; ++t) {
    if (t >= 2 && current_sup <= config.epsilon) {
      result.terminated_early = true;
      break;
    }
    const auto ti = static_cast<std::size_t>(t - 1);
    std::vector<Index> added;
    if (config.grouped) {
      GroupExtension ext = grouped_extension_step(residual, *instance.group_of, selected_groups,
                                                  config.k_schedule[ti]);
      selected_groups.insert(selected_groups.end(), ext.groups.begin(), ext.groups.end());
      added = std::move(ext.rows);
    } else {
      added = extension_step(residual, selected, config.k_schedule[ti]);
    }
    selected.insert(selected.end(), added.begin(), added.end());

    RecombinationOutcome outcome =
        recombination_step(norm, selected, config.s_schedule[ti], config.seed, t, selected_bound,
                           config.method);
    current = std::move(outcome.candidate);
    residual = residual_vector(norm, current);
    current_sup = outcome.e_value;

    GrimStep record;
    record.step = t;
    record.added = std::move(added);
    record.shuffle_winner = outcome.winner;
    record.residual_sup = current_sup;
    record.selected_residual = outcome.selected_residual;
    record.support = current.indices;
    record.coefficients = to_original_basis(norm, current);
    result.trace.steps.push_back(std::move(record));
    result.steps_completed = t;
    log::debug("grim step " + std::to_string(t) + ": sup residual " +
               std::to_string(current_sup) + ", support " +
               std::to_string(current.indices.size()));
  }

  if (!result.trace.steps.empty()) {
    const auto& steps = result.trace.steps;
    auto best = std::min_element(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
      return a.residual_sup < b.residual_sup;
    });
    result.trace.best_step = best->step;
  }
  result.support = current.indices;
  result.coefficients = to_original_basis(norm, current);
  result.achieved_sup = current_sup;
  return result;
}

}  // namespace grim
