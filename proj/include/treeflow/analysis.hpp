#pragma once

#include <string>
#include <vector>

#include "treeflow/flow.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

/// Long-time curvature class of an edge, decided from the shape of the tree
/// alone. For a leaf edge the deciding quantity is the leaf count d' of its
/// internal endpoint u; for an internal edge, whether either endpoint
/// carries three or more internal edges. The two shapes the general rules
/// do not cover, a single edge and a star, get their own classes.
enum class EdgeLimitClass {
	leaf_constant_two,     ///< single-edge tree: curvature is identically 2
	leaf_identity_one,     ///< d_u = 2: curvature is identically 1
	star_leaf,             ///< d'_u = d_u (star center): limit 2 / d_u
	leaf_positive,         ///< d'_u = d_u - 1: limit 1 / (d_u - 1)
	leaf_zero,             ///< d'_u = d_u - 2: limit 0
	leaf_negative_bounded, ///< d'_u <= d_u - 3: eventually kappa <= -(d''_u - 2) / d_u
	internal_zero,         ///< both endpoints carry at most two internal edges
	internal_unknown,      ///< some endpoint carries three or more internal edges
};

const char* limit_class_name(EdgeLimitClass cls) noexcept;

struct LimitPrediction {
	EdgeLimitClass cls = EdgeLimitClass::internal_unknown;
	/// Predicted curvature limit; for leaf_negative_bounded the eventual
	/// upper bound -(d''_u - 2)/d_u; NaN when nothing is pinned down.
	double value = 0.0;
	std::string why;
};

std::vector<LimitPrediction> predict_limits(const WeightedTree& tree);

enum class WeightLimitClass { zero, finite, diverging };

const char* weight_class_name(WeightLimitClass cls) noexcept;

struct EdgeVerdict {
	WeightLimitClass weight_class = WeightLimitClass::finite;
	double weight_tail_mean = 0.0;      ///< trajectory weights over the window
	double weight_log_slope = 0.0;      ///< d log w / dt fitted over the window
	double normalized_tail_mean = 0.0;  ///< weights rescaled to total 1
	double normalized_log_slope = 0.0;
	double kappa_tail_mean = 0.0;
	double kappa_tail_spread = 0.0;     ///< max - min over the window
};

enum class CurvatureVerdict { constant, not_constant, inconclusive };

const char* curvature_verdict_name(CurvatureVerdict v) noexcept;

/// What a finished run says about the limit. e_plus collects the edges
/// whose normalized weight stays positive — above the zero threshold and no
/// longer falling — and the constancy verdict compares curvature tails
/// across exactly those edges.
struct EmpiricalVerdict {
	std::vector<EdgeVerdict> edges;
	std::vector<EdgeId> e_plus;
	CurvatureVerdict verdict = CurvatureVerdict::inconclusive;
	double tau = 0.0; ///< common curvature value when verdict is constant
};

/// Thresholds for reading limits off a finite trajectory. An edge diverges
/// when its log-weight keeps a slope of at least diverging_slope across the
/// tail window; it has died when its normalized weight sits below
/// zero_threshold without growing, or froze at the weight floor.
struct DetectOptions {
	double tail_fraction = 0.25;
	double constancy_tol = 1e-2;
	double diverging_slope = 1e-3;
	double zero_threshold = 1e-6;
};

EmpiricalVerdict detect_limits(const Trajectory& traj, const DetectOptions& opt = {});

/// One named pass/fail observation inside a report.
struct CheckItem {
	std::string name;
	bool passed = false;
	double measured = 0.0;
	double expected = 0.0;
	double tolerance = 0.0;
	std::string detail;
};

struct CheckReport {
	bool passed = true;
	std::vector<CheckItem> items;
	void add(CheckItem item);
};

/// Confronts a finished unnormalized run with the dichotomy the shape
/// dictates: caterpillars must show every leaf curvature at its predicted
/// limit, vanishing normalized leaf weights, and a bounded product over the
/// internal edges plus the interior-spine leaves; non-caterpillars must show
/// growing total internal weight, at least one diverging internal weight,
/// and exponential normalized decay on every zero-curvature edge.
CheckReport check_caterpillar_theorem(const Trajectory& traj, const DetectOptions& opt = {});

/// Per-leaf bound checks on a finished run: leaves classed
/// leaf_negative_bounded stay below their eventual bound; the heaviest
/// starting leaf at each vertex keeps kappa above 1 - (d_u - 2)/d'_u at
/// every sample; leaves with nonnegative predicted limits stay bounded and
/// eventually shrink.
CheckReport verify_prop_bounds(const Trajectory& traj, const DetectOptions& opt = {});

/// Alternating balance relation along one maximal path of the positively
/// weighted subtree at a constant-curvature limit. Coefficients are +-kappa,
/// with kappa - 1 in place of kappa at a terminal edge that is a leaf edge
/// of the tree.
struct BalancedPathSystem {
	std::vector<EdgeId> path;
	std::vector<double> coefficients;
	double kappa = 0.0;
	/// All coefficients vanish (kappa = 0 with no leaf terminals), so the
	/// relation holds for any weights and pins nothing down.
	bool degenerate = false;
};

/// All maximal paths of the subgraph spanned by e_plus: one per unordered
/// pair of tip edges in each connected component.
std::vector<std::vector<EdgeId>> maximal_paths(const WeightedTree& tree,
                                               const std::vector<EdgeId>& e_plus);

/// Builds the balance relation for the given maximal path. Throws
/// not_maximal_path when the edges are not a path in e_plus or when either
/// end could be extended inside e_plus.
BalancedPathSystem balance_system(const WeightedTree& tree, const std::vector<EdgeId>& e_plus,
                                  const std::vector<EdgeId>& path, double kappa);

/// | sum of coefficient * weight | over the path.
double balance_residual(const BalancedPathSystem& system, const std::vector<double>& weights);

} // namespace treeflow
