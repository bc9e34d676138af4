#pragma once

#include <vector>

#include "treeflow/metric.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

/// Edge curvatures for the standard gamma = 1/x choice, with the two
/// one-sided contributions and the weighted vertex degrees they divide by.
/// kappa[e] is always the sum of the two directional halves.
struct CurvatureVector {
	std::vector<double> kappa;    ///< per edge
	std::vector<double> kappa_ab; ///< contribution of endpoint a of the edge
	std::vector<double> kappa_ba; ///< contribution of endpoint b
	std::vector<double> degree;   ///< per vertex, D_u = sum of 1/w over incident edges
};

/// D_v = sum over incident edges of gamma(w).
double weighted_degree(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                       VertexId v);

/// One-sided curvature share of endpoint u on edge e: (2 - d_u) / (w_e D_u),
/// gamma = 1/x. Equals 1 when u is a leaf and 0 when d_u = 2.
double kappa_directional(const WeightedTree& tree, const Metric& metric, EdgeId e, VertexId u);

/// Edge curvature for gamma = 1/x.
double kappa_edge(const WeightedTree& tree, const Metric& metric, EdgeId e);

/// Edge curvature for an arbitrary admissible gamma. Specializes to
/// kappa_edge when gamma is 1/x.
double kappa_general(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                     EdgeId e);

CurvatureVector kappa_all(const WeightedTree& tree, const Metric& metric);

/// Total curvature minus 2. Zero in exact arithmetic on every tree.
double gauss_bonnet_residual(const CurvatureVector& curv);

/// Sum over edges of kappa_e * w_e, evaluated through the vertex-side
/// identity: every leaf contributes its edge weight and every internal
/// vertex u contributes (2 - d_u) d_u / D_u. Matches the direct dot
/// product, which tests check independently.
double kappa_weight_sum(const WeightedTree& tree, const Metric& metric);

/// Time derivative of each edge curvature along the unnormalized flow.
std::vector<double> kappa_derivative(const WeightedTree& tree, const Metric& metric);

} // namespace treeflow
