#pragma once

#include <vector>

#include "treeflow/metric.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

/// Probability mass per vertex, dense in vertex-id order. Mass must be
/// nonnegative and total 1 within 1e-12.
struct ProbabilityMeasure {
	std::vector<double> mass;
};

void validate_measure(const WeightedTree& tree, const ProbabilityMeasure& mu);

/// Per-vertex potential values for the duality check.
struct PotentialFunction {
	std::vector<double> value;
};

/// Lazy random-walk step measure seen from x: mass alpha stays at x and the
/// rest spreads over the neighbors proportionally to gamma(w). alpha must
/// lie in [0, 1].
ProbabilityMeasure walk_measure(const WeightedTree& tree, const Metric& metric,
                                const GammaFunction& gamma, VertexId x, double alpha);

/// Exact 1-Wasserstein distance between two measures on the weighted tree:
/// each edge contributes its weight times the absolute net mass that must
/// cross it, read off from subtree totals.
double wasserstein_tree(const WeightedTree& tree, const Metric& metric,
                        const ProbabilityMeasure& mu, const ProbabilityMeasure& nu);

/// Closed-form optimal potential for the pair of walk measures at the two
/// endpoints of e (alpha >= 1/2): g peaks past u at w_ux + w_uv, holds w_uv
/// at u, 0 at v, dips to -w_vy past v, and is 0 elsewhere. 1-Lipschitz on
/// the union of the two supports.
PotentialFunction kantorovich_potential(const WeightedTree& tree, const Metric& metric, EdgeId e);

/// Kantorovich dual objective: sum of g * (mu - nu).
double dual_value(const WeightedTree& tree, const PotentialFunction& g,
                  const ProbabilityMeasure& mu, const ProbabilityMeasure& nu);

/// Coarse curvature at laziness alpha: 1 - W(mu_u, mu_v) / w_uv.
double alpha_curvature(const WeightedTree& tree, const Metric& metric,
                       const GammaFunction& gamma, EdgeId e, double alpha);

/// Limit curvature recovered purely through transport: evaluates
/// alpha_curvature/(1-alpha) at alpha = 0.5, 0.9, 0.99, demands the three
/// agree within 1e-9 (they are exactly equal in exact arithmetic), and
/// returns the alpha = 0.5 value. Never touches the closed-form formulas,
/// so it serves as an independent oracle for them.
double lly_oracle(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                  EdgeId e);

/// Path-length distances from src under the metric.
std::vector<double> distances_from(const WeightedTree& tree, const Metric& metric, VertexId src);

double tree_distance(const WeightedTree& tree, const Metric& metric, VertexId x, VertexId y);

} // namespace treeflow
