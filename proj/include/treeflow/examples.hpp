#pragma once

#include <string>
#include <vector>

#include "treeflow/tree.hpp"

namespace treeflow {

/// Names accepted by builtin_tree, in presentation order.
const std::vector<std::string>& builtin_names();

/// One-line description shown by the CLI listing.
std::string builtin_summary(const std::string& name);

/// Small named trees used throughout the tests and the CLI. Weights are
/// baked in (unit unless the name says otherwise). Unknown names throw.
WeightedTree builtin_tree(const std::string& name);

} // namespace treeflow
