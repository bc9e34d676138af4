#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "treeflow/curvature.hpp"
#include "treeflow/metric.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

enum class FlowVariant { unnormalized, normalized };

/// Classic fourth-order fixed step, kept for byte-reproducible golden runs.
struct FixedRk4 {
	double dt = 1e-3;
};

/// Embedded 5(4) pair with step control. A trial step that would drive any
/// weight nonpositive is rejected and retried at half the step, independent
/// of its error estimate.
struct AdaptiveDp54 {
	double rel_tol = 1e-8;
	double abs_tol = 1e-12;
	double dt_init = 1e-3;
	double dt_min = 1e-12;
	double dt_max = 1.0;
};

using Integrator = std::variant<AdaptiveDp54, FixedRk4>;

struct FlowSpec {
	FlowVariant variant = FlowVariant::unnormalized;
	double t_end = 40.0;
	Integrator integrator = AdaptiveDp54{};
	double record_every = 0.1;
	/// Below this weight an edge counts as converged to zero: it is pinned
	/// here, flagged, and excluded from further motion. Never zero silently.
	double weight_floor = 1e-14;
};

/// Conservation-law and comparison residuals evaluated at a sample.
/// product_log_residual and the leaf-pair residuals exist only for the
/// unnormalized variant, total_weight_residual only for the normalized one.
/// The product residual is dropped from the first floor freeze on, since a
/// clamped weight no longer follows the decay law.
struct MonitorRecord {
	double gauss_bonnet_residual = 0.0;
	std::optional<double> product_log_residual;
	std::optional<double> total_weight_residual;
	std::vector<double> leaf_pair_residuals;
	double internal_sum = 0.0;     ///< S(t): total weight of internal edges
	double internal_product = 1.0; ///< P(t): product of internal edge weights
};

/// Two leaf edges hanging off the same vertex; their weight difference must
/// decay like exp(-t) under the unnormalized flow.
struct LeafPair {
	EdgeId e = -1;
	EdgeId g = -1;
	VertexId shared = -1;
	double initial_difference = 0.0;
};

enum class Termination {
	reached_t_end,
	weight_floor,   ///< every edge froze at the floor; nothing left to move
	step_underflow, ///< adaptive control could not proceed above dt_min
};

struct Sample {
	double t = 0.0;
	std::vector<double> w;
	CurvatureVector curvature;
	MonitorRecord monitors;
};

struct Trajectory {
	WeightedTree tree;
	FlowVariant variant = FlowVariant::unnormalized;
	std::vector<LeafPair> leaf_pairs;
	std::vector<Sample> samples;
	Termination termination = Termination::reached_t_end;
	double t_final = 0.0;
	std::vector<char> floored;        ///< per edge: hit the weight floor
	std::vector<double> floor_time;   ///< per edge, NaN when never floored
	/// Accepted steps where an internal edge decreased beyond roundoff slack
	/// under the unnormalized flow. Always zero if the solver is sound.
	int monotonicity_violations = 0;
	int accepted_steps = 0;
	int rejected_steps = 0;
};

/// dw_e/dt = -kappa_e w_e.
std::vector<double> rhs_unnormalized(const WeightedTree& tree, const std::vector<double>& w);

/// dw_e/dt = -kappa_e w_e + w_e * sum_h kappa_h w_h; tangent to the simplex,
/// so the outputs sum to zero. Requires total weight 1 within 1e-9.
std::vector<double> rhs_normalized(const WeightedTree& tree, const std::vector<double>& w);

MonitorRecord evaluate_monitors(const WeightedTree& tree, FlowVariant variant,
                                const std::vector<LeafPair>& pairs,
                                const std::vector<double>& w0, double t,
                                const std::vector<double>& w, const CurvatureVector& curv);

std::vector<LeafPair> leaf_pairs(const WeightedTree& tree, const Metric& start);

Trajectory integrate(const WeightedTree& tree, const Metric& start, const FlowSpec& spec);

/// Pointwise rescale of an unnormalized trajectory onto the weight simplex,
/// with curvature and monitors recomputed for the normalized variant. For
/// gamma = 1/x this solves the normalized flow exactly, which tests confirm
/// against direct normalized integration.
Trajectory normalized_from_unnormalized(const Trajectory& traj);

const char* termination_name(Termination t) noexcept;

} // namespace treeflow
