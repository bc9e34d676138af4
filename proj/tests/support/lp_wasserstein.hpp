#pragma once

#include "treeflow/transport.hpp"

namespace treeflow::testsupport {

/// Transportation problem solved head-on: pairwise path distances as costs,
/// dense two-phase simplex with Bland's rule on the full coupling matrix.
/// Deliberately shares nothing with the production edge-splitting routine
/// beyond the adjacency lists, so it can arbitrate that routine. Intended
/// for small instances only (costs are O(n^2) variables).
double lp_wasserstein(const WeightedTree& tree, const Metric& metric,
                      const ProbabilityMeasure& mu, const ProbabilityMeasure& nu);

} // namespace treeflow::testsupport
