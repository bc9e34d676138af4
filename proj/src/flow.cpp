#include "treeflow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kShrinkMin = 0.2;
constexpr double kGrowMax = 10.0;

CurvatureVector kappa_from_weights(const WeightedTree& tree, const std::vector<double>& w) {
	Metric m;
	m.w = w;
	return kappa_all(tree, m);
}

double dot_kappa_weight(const CurvatureVector& curv, const std::vector<double>& w) {
	StableSum sum;
	for (std::size_t e = 0; e < w.size(); ++e) sum.add(curv.kappa[e] * w[e]);
	return sum.value();
}

/// Flow field shared by both variants; zeroes the frozen components so a
/// floored edge stays exactly at the floor.
class FlowField {
public:
	FlowField(const WeightedTree& tree, FlowVariant variant, const std::vector<char>& frozen)
	    : tree_(tree), variant_(variant), frozen_(frozen) {}

	/// False when some live weight is nonpositive (the caller must shrink
	/// the step); throws on non-finite state.
	bool operator()(const std::vector<double>& y, std::vector<double>& f) const {
		for (std::size_t e = 0; e < y.size(); ++e) {
			if (!std::isfinite(y[e]))
				fail(Errc::non_finite_state, "weight became non-finite during integration");
			if (y[e] <= 0.0 && !frozen_[e]) return false;
		}
		CurvatureVector curv = kappa_from_weights(tree_, y);
		f.resize(y.size());
		if (variant_ == FlowVariant::unnormalized) {
			for (std::size_t e = 0; e < y.size(); ++e)
				f[e] = frozen_[e] ? 0.0 : -curv.kappa[e] * y[e];
		} else {
			double k = dot_kappa_weight(curv, y);
			for (std::size_t e = 0; e < y.size(); ++e)
				f[e] = frozen_[e] ? 0.0 : y[e] * (k - curv.kappa[e]);
		}
		for (double v : f)
			if (!std::isfinite(v))
				fail(Errc::non_finite_state, "flow field became non-finite during integration");
		return true;
	}

private:
	const WeightedTree& tree_;
	FlowVariant variant_;
	const std::vector<char>& frozen_;
};

struct StepResult {
	enum class Status { accepted, error_reject, positivity_reject } status;
	double error = 0.0; ///< scaled error estimate, adaptive only
};

class Dp54Stepper {
public:
	explicit Dp54Stepper(std::size_t n) { for (auto* v : slots()) v->resize(n); }

	StepResult attempt(const FlowField& f, const std::vector<double>& y, double dt,
	                   double abs_tol, double rel_tol, std::vector<double>& out) {
		const std::size_t n = y.size();

		if (!f(y, k1_)) return {StepResult::Status::positivity_reject};
		for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * (a21 * k1_[i]);
		if (!f(tmp_, k2_)) return {StepResult::Status::positivity_reject};
		for (std::size_t i = 0; i < n; ++i)
			tmp_[i] = y[i] + dt * (a31 * k1_[i] + a32 * k2_[i]);
		if (!f(tmp_, k3_)) return {StepResult::Status::positivity_reject};
		for (std::size_t i = 0; i < n; ++i)
			tmp_[i] = y[i] + dt * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
		if (!f(tmp_, k4_)) return {StepResult::Status::positivity_reject};
		for (std::size_t i = 0; i < n; ++i)
			tmp_[i] = y[i] + dt * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
		if (!f(tmp_, k5_)) return {StepResult::Status::positivity_reject};
		for (std::size_t i = 0; i < n; ++i)
			tmp_[i] = y[i] + dt * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
			                       a65 * k5_[i]);
		if (!f(tmp_, k6_)) return {StepResult::Status::positivity_reject};

		out.resize(n);
		for (std::size_t i = 0; i < n; ++i)
			out[i] = y[i] + dt * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] +
			                      b6 * k6_[i]);
		if (!f(out, k7_)) return {StepResult::Status::positivity_reject};

		StableSum err2;
		for (std::size_t i = 0; i < n; ++i) {
			double err = dt * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
			                   e6 * k6_[i] + e7 * k7_[i]);
			double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out[i]));
			err2.add((err / scale) * (err / scale));
		}
		double err = std::sqrt(err2.value() / static_cast<double>(n));
		if (err > 1.0) return {StepResult::Status::error_reject, err};
		return {StepResult::Status::accepted, err};
	}

private:
	std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_;
	std::array<std::vector<double>*, 8> slots() {
		return {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_};
	}
};

class Rk4Stepper {
public:
	explicit Rk4Stepper(std::size_t n) {
		k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n); tmp_.resize(n);
	}

	StepResult attempt(const FlowField& f, const std::vector<double>& y, double dt,
	                   std::vector<double>& out) {
		const std::size_t n = y.size();
		auto stage = [&](const std::vector<double>& k, double c) {
			for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * c * k[i];
		};
		if (!f(y, k1_)) return {StepResult::Status::positivity_reject};
		stage(k1_, 0.5);
		if (!f(tmp_, k2_)) return {StepResult::Status::positivity_reject};
		stage(k2_, 0.5);
		if (!f(tmp_, k3_)) return {StepResult::Status::positivity_reject};
		stage(k3_, 1.0);
		if (!f(tmp_, k4_)) return {StepResult::Status::positivity_reject};
		out.resize(n);
		for (std::size_t i = 0; i < n; ++i)
			out[i] = y[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
		for (double v : out) {
			if (!std::isfinite(v))
				fail(Errc::non_finite_state, "weight became non-finite during integration");
			if (v <= 0.0) return {StepResult::Status::positivity_reject};
		}
		return {StepResult::Status::accepted};
	}

private:
	std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

bool nearly(double x, double y) {
	return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
}

} // namespace

std::vector<double> rhs_unnormalized(const WeightedTree& tree, const std::vector<double>& w) {
	Metric m;
	m.w = w;
	validate_metric(tree, m);
	CurvatureVector curv = kappa_from_weights(tree, w);
	std::vector<double> f(w.size());
	for (std::size_t e = 0; e < w.size(); ++e) f[e] = -curv.kappa[e] * w[e];
	return f;
}

std::vector<double> rhs_normalized(const WeightedTree& tree, const std::vector<double>& w) {
	Metric m;
	m.w = w;
	m.normalized = true;
	validate_metric(tree, m);
	CurvatureVector curv = kappa_from_weights(tree, w);
	double k = dot_kappa_weight(curv, w);
	std::vector<double> f(w.size());
	for (std::size_t e = 0; e < w.size(); ++e) f[e] = w[e] * (k - curv.kappa[e]);
	return f;
}

std::vector<LeafPair> leaf_pairs(const WeightedTree& tree, const Metric& start) {
	std::vector<LeafPair> pairs;
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		if (tree.is_leaf(v)) continue;
		std::vector<EdgeId> leaves;
		for (const Neighbor& n : tree.neighbors(v))
			if (tree.is_leaf(n.vertex)) leaves.push_back(n.edge);
		for (std::size_t i = 0; i < leaves.size(); ++i)
			for (std::size_t j = i + 1; j < leaves.size(); ++j)
				pairs.push_back(LeafPair{leaves[i], leaves[j], v,
				                         start.w[static_cast<std::size_t>(leaves[i])] -
				                             start.w[static_cast<std::size_t>(leaves[j])]});
	}
	return pairs;
}

MonitorRecord evaluate_monitors(const WeightedTree& tree, FlowVariant variant,
                                const std::vector<LeafPair>& pairs,
                                const std::vector<double>& w0, double t,
                                const std::vector<double>& w, const CurvatureVector& curv) {
	MonitorRecord rec;
	rec.gauss_bonnet_residual = std::abs(gauss_bonnet_residual(curv));

	std::vector<EdgeKind> kinds = classify_edges(tree);
	StableSum s;
	double p = 1.0;
	for (std::size_t e = 0; e < w.size(); ++e) {
		if (kinds[e] != EdgeKind::internal) continue;
		s.add(w[e]);
		p *= w[e];
	}
	rec.internal_sum = s.value();
	rec.internal_product = p;

	if (variant == FlowVariant::unnormalized) {
		StableSum now, start;
		for (std::size_t e = 0; e < w.size(); ++e) {
			now.add(std::log(w[e]));
			start.add(std::log(w0[e]));
		}
		rec.product_log_residual = std::abs(now.value() - (start.value() - 2.0 * t));
		rec.leaf_pair_residuals.reserve(pairs.size());
		for (const LeafPair& pair : pairs)
			rec.leaf_pair_residuals.push_back(std::abs(
			    (w[static_cast<std::size_t>(pair.e)] - w[static_cast<std::size_t>(pair.g)]) -
			    pair.initial_difference * std::exp(-t)));
	} else {
		rec.total_weight_residual = std::abs(stable_total(w) - 1.0);
	}
	return rec;
}

Trajectory integrate(const WeightedTree& tree, const Metric& start, const FlowSpec& spec) {
	validate_metric(tree, start);
	if (spec.variant == FlowVariant::normalized &&
	    std::abs(total_weight(start) - 1.0) > 1e-9)
		fail(Errc::not_normalized, "normalized flow needs a start metric with total weight 1, got " +
		                               format_double(total_weight(start)));
	if (!(spec.t_end > 0.0) || !(spec.record_every > 0.0))
		fail(Errc::parse_error, "t_end and record_every must be positive");

	const std::size_t n = static_cast<std::size_t>(tree.edge_count());
	Trajectory traj;
	traj.tree = tree;
	traj.variant = spec.variant;
	traj.leaf_pairs = leaf_pairs(tree, start);
	traj.floored.assign(n, 0);
	traj.floor_time.assign(n, std::numeric_limits<double>::quiet_NaN());

	std::vector<double> w = start.w;
	const std::vector<double> w0 = start.w;
	std::vector<EdgeKind> kinds = classify_edges(tree);

	FlowField field(tree, spec.variant, traj.floored);

	auto record = [&](double t) {
		Sample s;
		s.t = t;
		s.w = w;
		s.curvature = kappa_from_weights(tree, w);
		s.monitors = evaluate_monitors(tree, spec.variant, traj.leaf_pairs, w0, t, w, s.curvature);
		// A clamped weight no longer follows the decay law, so the product
		// residual is meaningless from the first freeze on.
		for (std::size_t e = 0; e < n; ++e)
			if (traj.floored[e]) {
				s.monitors.product_log_residual.reset();
				break;
			}
		traj.samples.push_back(std::move(s));
		traj.t_final = t;
	};
	record(0.0);

	const bool adaptive = std::holds_alternative<AdaptiveDp54>(spec.integrator);
	AdaptiveDp54 ad = adaptive ? std::get<AdaptiveDp54>(spec.integrator) : AdaptiveDp54{};
	FixedRk4 fx = adaptive ? FixedRk4{} : std::get<FixedRk4>(spec.integrator);
	if (!adaptive && !(fx.dt > 0.0)) fail(Errc::parse_error, "fixed step size must be positive");

	Dp54Stepper dp(n);
	Rk4Stepper rk(n);

	double t = 0.0;
	double dt = adaptive ? std::min({ad.dt_init, ad.dt_max, spec.record_every}) : fx.dt;
	long next_record = 1;
	std::vector<double> w_new(n);
	long attempts = 0;

	auto after_accept = [&](double t_new) -> bool {
		// Per-step soundness checks: positivity is enforced by construction;
		// internal edges must not shrink under the unnormalized flow.
		if (spec.variant == FlowVariant::unnormalized) {
			for (std::size_t e = 0; e < n; ++e)
				if (kinds[e] == EdgeKind::internal &&
				    w_new[e] < w[e] - 1e-12 * std::max(1.0, w[e]))
					++traj.monotonicity_violations;
		} else {
			// Re-project onto the simplex without moving frozen edges: the
			// live weights absorb whatever mass keeps the total at exactly 1.
			StableSum live, frozen;
			for (std::size_t e = 0; e < n; ++e)
				(traj.floored[e] ? frozen : live).add(w_new[e]);
			double factor = (1.0 - frozen.value()) / live.value();
			for (std::size_t e = 0; e < n; ++e)
				if (!traj.floored[e]) w_new[e] *= factor;
		}
		bool all_frozen = true;
		for (std::size_t e = 0; e < n; ++e) {
			if (!traj.floored[e] && w_new[e] < spec.weight_floor) {
				w_new[e] = spec.weight_floor;
				traj.floored[e] = 1;
				traj.floor_time[e] = t_new;
			}
			if (!traj.floored[e]) all_frozen = false;
		}
		w = w_new;
		++traj.accepted_steps;
		return all_frozen;
	};

	while (true) {
		if (++attempts > 100'000'000)
			fail(Errc::non_finite_state, "integration exceeded the step-attempt budget");

		double t_record = static_cast<double>(next_record) * spec.record_every;
		double t_target = std::min(t_record, spec.t_end);
		double gap = t_target - t;
		double h = std::min(dt, gap);
		bool capped = h >= gap;

		StepResult res = adaptive
		                     ? dp.attempt(field, w, h, ad.abs_tol, ad.rel_tol, w_new)
		                     : rk.attempt(field, w, h, w_new);

		if (res.status == StepResult::Status::positivity_reject) {
			if (!adaptive)
				fail(Errc::step_underflow,
				     "fixed-step run drove a weight nonpositive; reduce dt");
			++traj.rejected_steps;
			dt = h * 0.5;
			if (dt < ad.dt_min) {
				if (!nearly(traj.t_final, t)) record(t);
				traj.termination = Termination::step_underflow;
				return traj;
			}
			continue;
		}
		if (res.status == StepResult::Status::error_reject) {
			++traj.rejected_steps;
			double fac = std::max(kShrinkMin, kSafety * std::pow(res.error, -0.2));
			dt = h * std::min(1.0, fac);
			if (dt < ad.dt_min) {
				if (!nearly(traj.t_final, t)) record(t);
				traj.termination = Termination::step_underflow;
				return traj;
			}
			continue;
		}

		double t_new = capped ? t_target : t + h;
		bool all_frozen = after_accept(t_new);
		t = t_new;

		if (adaptive) {
			double fac = res.error > 0.0
			                 ? std::clamp(kSafety * std::pow(res.error, -0.2), kShrinkMin, kGrowMax)
			                 : kGrowMax;
			dt = std::clamp(h * fac, ad.dt_min, ad.dt_max);
		}

		if (capped) {
			record(t);
			if (nearly(t, spec.t_end)) {
				traj.termination = Termination::reached_t_end;
				return traj;
			}
			++next_record;
		}
		if (all_frozen) {
			if (!nearly(traj.t_final, t)) record(t);
			traj.termination = Termination::weight_floor;
			return traj;
		}
	}
}

Trajectory normalized_from_unnormalized(const Trajectory& traj) {
	Trajectory out;
	out.tree = traj.tree;
	out.variant = FlowVariant::normalized;
	out.termination = traj.termination;
	out.t_final = traj.t_final;
	out.floored = traj.floored;
	out.floor_time = traj.floor_time;
	out.monotonicity_violations = traj.monotonicity_violations;
	out.accepted_steps = traj.accepted_steps;
	out.rejected_steps = traj.rejected_steps;

	if (traj.samples.empty()) return out;

	std::vector<double> w0 = traj.samples.front().w;
	double total0 = stable_total(w0);
	for (double& x : w0) x /= total0;

	Metric m0;
	m0.w = w0;
	out.leaf_pairs = leaf_pairs(traj.tree, m0);

	for (const Sample& s : traj.samples) {
		Sample ns;
		ns.t = s.t;
		ns.w = s.w;
		double total = stable_total(ns.w);
		for (double& x : ns.w) x /= total;
		ns.curvature = kappa_from_weights(traj.tree, ns.w);
		ns.monitors = evaluate_monitors(traj.tree, FlowVariant::normalized, out.leaf_pairs, w0,
		                                ns.t, ns.w, ns.curvature);
		out.samples.push_back(std::move(ns));
	}
	return out;
}

const char* termination_name(Termination t) noexcept {
	switch (t) {
	case Termination::reached_t_end: return "reached_t_end";
	case Termination::weight_floor: return "weight_floor";
	case Termination::step_underflow: return "step_underflow";
	}
	return "unknown";
}

} // namespace treeflow
