#include "grim/thinning.hpp"

#include "grim/error.hpp"

#include <string>

namespace grim {

Candidate recombination_thin(const NormalizedInstance& norm, std::span<const Index> selected,
                             RecombinationMethod method) {
  const Index n = norm.feature_count();
  if (norm.alpha.size() != n) throw DataError("alpha length does not match feature count");
  if ((norm.alpha.array() <= 0.0).any()) {
    throw DataError("recombination thinning needs strictly positive weights");
  }

  const Index rows = 1 + static_cast<Index>(selected.size());
  ReductionSystem system;
  system.matrix.resize(rows, n);
  system.matrix.row(0).setOnes();
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const Index j = selected[r];
    if (j < 0 || j >= norm.functional_count()) {
      throw DataError("selected functional " + std::to_string(j) + " out of range");
    }
    system.matrix.row(static_cast<Index>(r) + 1) = norm.h_evaluations.row(j);
  }
  system.weights = norm.alpha;

  const ReducedSolution reduced =
      method == RecombinationMethod::tree ? recombine_tree(system) : recombine_basic(system);

  Candidate out;
  out.indices = reduced.support;
  out.coefficients.reserve(reduced.support.size());
  for (Index i : reduced.support) out.coefficients.push_back(reduced.weights(i));
  return out;
}

}  // namespace grim
