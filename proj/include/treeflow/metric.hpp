#pragma once

#include <vector>

#include "treeflow/tree.hpp"

namespace treeflow {

/// Edge weights in edge-id order. The `normalized` flag is a contract:
/// when set, the total weight must be 1 within 1e-9.
struct Metric {
	std::vector<double> w;
	bool normalized = false;
};

/// Throws unless the metric matches the tree, is strictly positive and
/// finite, and honors its normalization flag.
void validate_metric(const WeightedTree& tree, const Metric& metric);

/// Metric copied from the tree's input weights.
Metric initial_metric(const WeightedTree& tree);

Metric unit_metric(const WeightedTree& tree);

double total_weight(const Metric& metric);

/// Rescaled copy with total weight 1 and the normalized flag set.
Metric normalize(const Metric& metric);

/// Vertex-to-edge weight function gamma used inside weighted degrees.
/// `reciprocal` is the standard 1/x choice; `power` is A * x^a with A > 0
/// and a != 0 (gamma must stay one-to-one on (0, inf)).
struct GammaFunction {
	enum class Kind { reciprocal, power };

	Kind kind = Kind::reciprocal;
	double scale = 1.0;
	double exponent = -1.0;

	static GammaFunction standard() { return GammaFunction{}; }
	static GammaFunction power(double scale, double exponent);

	double operator()(double x) const;
};

} // namespace treeflow
