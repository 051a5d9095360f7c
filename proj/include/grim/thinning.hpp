#pragma once

#include "grim/instance.hpp"

#include <span>

namespace grim {

enum class RecombinationMethod { basic, tree };

/// Builds the system [1; h_{selected}] x = [C; sigma_selected(phi)] with
/// x = alpha and reduces it. The returned candidate has non-negative
/// coefficients summing to C, at most min(N, |selected| + 1) terms, and
/// matches phi on every selected functional up to recombination round-off.
/// `selected` order is the row order of the system.
Candidate recombination_thin(const NormalizedInstance& norm, std::span<const Index> selected,
                             RecombinationMethod method = RecombinationMethod::tree);

}  // namespace grim
