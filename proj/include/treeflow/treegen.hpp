#pragma once

#include <random>
#include <string>
#include <vector>

#include "treeflow/metric.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

/// All pairwise non-isomorphic trees with min_n..max_n vertices, unit
/// weights, vertices named 'a', 'b', ... in a breadth pattern fixed by the
/// generator. Requires 2 <= min_n <= max_n <= 16.
std::vector<WeightedTree> enumerate_trees(int min_n, int max_n);

/// Isomorphism-invariant certificate: two trees get the same string exactly
/// when they are isomorphic (ignoring names and weights).
std::string tree_certificate(const WeightedTree& tree);

/// Uniform random labelled tree on n vertices (2 <= n <= 26), unit weights.
WeightedTree random_tree(std::mt19937_64& rng, int n);

/// Independent log-uniform weights on [lo, hi] for every edge.
Metric random_metric(std::mt19937_64& rng, const WeightedTree& tree, double lo, double hi);

} // namespace treeflow
