#include "treeflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

namespace {

constexpr double kLeafLimitTol = 5e-2;    ///< empirical curvature limit vs prediction
constexpr double kBoundSlack = 1e-3;      ///< eventual-bound slack for negative leaves
constexpr double kFlatSlope = 1e-3;       ///< |log slope| below this counts as flat
constexpr double kStrictSlack = 1e-9;     ///< roundoff slack for strict inequalities

double nan_value() {
	return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

const char* limit_class_name(EdgeLimitClass cls) noexcept {
	switch (cls) {
	case EdgeLimitClass::leaf_constant_two: return "leaf_constant_two";
	case EdgeLimitClass::leaf_identity_one: return "leaf_identity_one";
	case EdgeLimitClass::star_leaf: return "star_leaf";
	case EdgeLimitClass::leaf_positive: return "leaf_positive";
	case EdgeLimitClass::leaf_zero: return "leaf_zero";
	case EdgeLimitClass::leaf_negative_bounded: return "leaf_negative_bounded";
	case EdgeLimitClass::internal_zero: return "internal_zero";
	case EdgeLimitClass::internal_unknown: return "internal_unknown";
	}
	return "unknown";
}

const char* weight_class_name(WeightLimitClass cls) noexcept {
	switch (cls) {
	case WeightLimitClass::zero: return "zero";
	case WeightLimitClass::finite: return "finite";
	case WeightLimitClass::diverging: return "diverging";
	}
	return "unknown";
}

const char* curvature_verdict_name(CurvatureVerdict v) noexcept {
	switch (v) {
	case CurvatureVerdict::constant: return "constant";
	case CurvatureVerdict::not_constant: return "not_constant";
	case CurvatureVerdict::inconclusive: return "inconclusive";
	}
	return "unknown";
}

std::vector<LimitPrediction> predict_limits(const WeightedTree& tree) {
	std::vector<EdgeKind> kinds = classify_edges(tree);
	std::vector<LimitPrediction> out;
	out.reserve(kinds.size());
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		const Edge& ed = tree.edge(e);
		LimitPrediction p;
		if (kinds[static_cast<std::size_t>(e)] == EdgeKind::leaf) {
			if (tree.is_leaf(ed.a) && tree.is_leaf(ed.b)) {
				p.cls = EdgeLimitClass::leaf_constant_two;
				p.value = 2.0;
				p.why = "single edge: each leaf end contributes exactly 1";
			} else {
				VertexId u = tree.is_leaf(ed.a) ? ed.b : ed.a;
				VertexProfile prof = vertex_profile(tree, u);
				int d = prof.degree;
				if (d == 2) {
					p.cls = EdgeLimitClass::leaf_identity_one;
					p.value = 1.0;
					p.why = "inner end has degree 2, its share vanishes";
				} else if (prof.leaf_degree == d) {
					p.cls = EdgeLimitClass::star_leaf;
					p.value = 2.0 / d;
					p.why = "star center: leaf ratios even out at 1";
				} else if (prof.leaf_degree == d - 1) {
					p.cls = EdgeLimitClass::leaf_positive;
					p.value = 1.0 / (d - 1);
					p.why = "all but one neighbor is a leaf";
				} else if (prof.leaf_degree == d - 2) {
					p.cls = EdgeLimitClass::leaf_zero;
					p.value = 0.0;
					p.why = "all but two neighbors are leaves";
				} else {
					// With d'' >= 3 internal edges at the inner end, the
					// Cauchy-Schwarz step bounds the tail curvature by
					// 1 - (d-2) / (d' + (d''-2)d''/(d''-2+d)), which
					// collapses to -(d''-2)/d; symmetric-hub equilibria
					// sit exactly on that value.
					p.cls = EdgeLimitClass::leaf_negative_bounded;
					p.value = -static_cast<double>(prof.internal_degree - 2) / d;
					p.why = "three or more internal edges at the inner end";
				}
			}
		} else {
			bool few_a = vertex_profile(tree, ed.a).internal_degree <= 2;
			bool few_b = vertex_profile(tree, ed.b).internal_degree <= 2;
			if (few_a && few_b) {
				p.cls = EdgeLimitClass::internal_zero;
				p.value = 0.0;
				p.why = "no endpoint carries three internal edges";
			} else {
				p.cls = EdgeLimitClass::internal_unknown;
				p.value = nan_value();
				p.why = "an endpoint carries three or more internal edges";
			}
		}
		out.push_back(std::move(p));
	}
	return out;
}

namespace {

struct Window {
	std::size_t begin = 0; ///< first sample index inside the window
	std::vector<double> t;
};

Window tail_window(const Trajectory& traj, double tail_fraction) {
	const std::size_t n = traj.samples.size();
	if (n < 10)
		fail(Errc::trajectory_too_short,
		     "need at least 10 recorded samples, have " + std::to_string(n));
	std::size_t want = static_cast<std::size_t>(
	    std::ceil(tail_fraction * static_cast<double>(n)));
	want = std::min(n, std::max<std::size_t>(want, 10));
	Window win;
	win.begin = n - want;
	win.t.reserve(want);
	for (std::size_t i = win.begin; i < n; ++i) win.t.push_back(traj.samples[i].t);
	return win;
}

} // namespace

EmpiricalVerdict detect_limits(const Trajectory& traj, const DetectOptions& opt) {
	Window win = tail_window(traj, opt.tail_fraction);
	const std::size_t n_samples = traj.samples.size();
	const std::size_t n_edges = traj.samples.front().w.size();

	std::vector<double> totals(n_samples);
	for (std::size_t i = 0; i < n_samples; ++i) totals[i] = stable_total(traj.samples[i].w);

	EmpiricalVerdict out;
	out.edges.resize(n_edges);
	for (std::size_t e = 0; e < n_edges; ++e) {
		EdgeVerdict& v = out.edges[e];
		std::vector<double> logw, lognorm, kappa;
		StableSum wsum, normsum;
		double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
		for (std::size_t i = win.begin; i < n_samples; ++i) {
			double w = traj.samples[i].w[e];
			double norm = w / totals[i];
			double k = traj.samples[i].curvature.kappa[e];
			logw.push_back(std::log(w));
			lognorm.push_back(std::log(norm));
			kappa.push_back(k);
			wsum.add(w);
			normsum.add(norm);
			kmin = std::min(kmin, k);
			kmax = std::max(kmax, k);
		}
		const double count = static_cast<double>(win.t.size());
		v.weight_tail_mean = wsum.value() / count;
		v.normalized_tail_mean = normsum.value() / count;
		v.weight_log_slope = fit_slope(win.t, logw);
		v.normalized_log_slope = fit_slope(win.t, lognorm);
		v.kappa_tail_mean = stable_total(kappa) / count;
		v.kappa_tail_spread = kmax - kmin;

		bool grew = traj.samples.back().w[e] >= traj.samples[win.begin].w[e];
		if (traj.floored[e]) {
			v.weight_class = WeightLimitClass::zero;
		} else if (v.weight_log_slope >= opt.diverging_slope && grew) {
			v.weight_class = WeightLimitClass::diverging;
		} else if (v.normalized_tail_mean <= opt.zero_threshold &&
		           v.normalized_log_slope <= kStrictSlack) {
			v.weight_class = WeightLimitClass::zero;
		} else {
			v.weight_class = WeightLimitClass::finite;
		}

		// Survivors hold a visible share of the total and are no longer
		// shedding it: leaves hanging at spine vertices with two spine
		// neighbors die only like 1/t, so at any finite horizon the slope is
		// what separates them from genuine limit mass.
		if (v.normalized_tail_mean > opt.zero_threshold &&
		    v.normalized_log_slope > -kFlatSlope)
			out.e_plus.push_back(static_cast<EdgeId>(e));
	}

	bool settled = true;
	double mean_lo = std::numeric_limits<double>::infinity(), mean_hi = -mean_lo;
	StableSum mean_sum;
	for (EdgeId e : out.e_plus) {
		const EdgeVerdict& v = out.edges[static_cast<std::size_t>(e)];
		settled = settled && v.kappa_tail_spread <= opt.constancy_tol;
		mean_lo = std::min(mean_lo, v.kappa_tail_mean);
		mean_hi = std::max(mean_hi, v.kappa_tail_mean);
		mean_sum.add(v.kappa_tail_mean);
	}
	if (out.e_plus.empty() || !settled) {
		out.verdict = CurvatureVerdict::inconclusive;
	} else if (mean_hi - mean_lo <= opt.constancy_tol) {
		out.verdict = CurvatureVerdict::constant;
		out.tau = mean_sum.value() / static_cast<double>(out.e_plus.size());
	} else {
		out.verdict = CurvatureVerdict::not_constant;
	}
	return out;
}

void CheckReport::add(CheckItem item) {
	passed = passed && item.passed;
	items.push_back(std::move(item));
}

CheckReport check_caterpillar_theorem(const Trajectory& traj, const DetectOptions& opt) {
	const WeightedTree& tree = traj.tree;
	CheckReport report;
	CaterpillarReport shape = caterpillar_classify(tree);
	EmpiricalVerdict verdict = detect_limits(traj, opt);
	std::vector<LimitPrediction> pred = predict_limits(tree);
	std::vector<EdgeKind> kinds = classify_edges(tree);
	Window win = tail_window(traj, opt.tail_fraction);

	bool has_internal_edge = false;
	for (EdgeKind k : kinds) has_internal_edge |= k == EdgeKind::internal;

	if (shape.is_caterpillar) {
		for (EdgeId e = 0; e < tree.edge_count(); ++e) {
			const EdgeVerdict& v = verdict.edges[static_cast<std::size_t>(e)];
			if (kinds[static_cast<std::size_t>(e)] == EdgeKind::leaf) {
				report.add({"leaf " + tree.edge_label(e) + " curvature limit",
				            std::abs(v.kappa_tail_mean - pred[static_cast<std::size_t>(e)].value) <=
				                kLeafLimitTol,
				            v.kappa_tail_mean, pred[static_cast<std::size_t>(e)].value,
				            kLeafLimitTol, pred[static_cast<std::size_t>(e)].why});
				// Leaves at interior spine vertices only reach zero like 1/t,
				// so at a finite horizon "dead or still clearly dying" is the
				// honest version of the vanishing claim. Trees without any
				// internal edge (a lone edge or a star) keep their leaves.
				if (has_internal_edge)
					report.add({"leaf " + tree.edge_label(e) + " normalized weight dies",
					            v.normalized_tail_mean <= opt.zero_threshold ||
					                v.normalized_log_slope <= -1e-4,
					            v.normalized_tail_mean, 0.0, opt.zero_threshold,
					            "level below threshold, or log slope " +
					                format_double(v.normalized_log_slope) + " still negative"});
			} else {
				report.add({"internal " + tree.edge_label(e) + " curvature limit",
				            std::abs(v.kappa_tail_mean) <= kLeafLimitTol, v.kappa_tail_mean, 0.0,
				            kLeafLimitTol, ""});
			}
		}
		if (!has_internal_edge) {
			// Fixed-shape survivors: every edge keeps positive normalized
			// weight and the common curvature settles at the predicted value.
			double want = pred.front().value;
			report.add({"surviving curvature settles at its predicted constant",
			            verdict.verdict == CurvatureVerdict::constant &&
			                std::abs(verdict.tau - want) <= opt.constancy_tol,
			            verdict.tau, want, opt.constancy_tol, ""});
		}

		// Product over internal edges plus the leaves at interior spine
		// vertices must stop moving: its log derivative is minus the sum of
		// exactly the curvatures that converge to zero.
		std::set<VertexId> interior(shape.spine.begin(), shape.spine.end());
		if (shape.spine.size() >= 2) {
			interior.erase(shape.spine.front());
			interior.erase(shape.spine.back());
		}
		std::vector<std::size_t> product_edges;
		for (EdgeId e = 0; e < tree.edge_count(); ++e) {
			const Edge& ed = tree.edge(e);
			if (kinds[static_cast<std::size_t>(e)] == EdgeKind::internal) {
				product_edges.push_back(static_cast<std::size_t>(e));
			} else {
				VertexId inner = tree.is_leaf(ed.a) ? ed.b : ed.a;
				if (interior.count(inner)) product_edges.push_back(static_cast<std::size_t>(e));
			}
		}
		std::vector<double> logp;
		for (std::size_t i = win.begin; i < traj.samples.size(); ++i) {
			StableSum s;
			for (std::size_t e : product_edges) s.add(std::log(traj.samples[i].w[e]));
			logp.push_back(s.value());
		}
		double slope = logp.empty() ? 0.0 : fit_slope(win.t, logp);
		report.add({"interior product stays bounded", std::abs(slope) <= kFlatSlope, slope, 0.0,
		            kFlatSlope, "log slope of the product over internal edges and interior leaves"});
		return report;
	}

	// Non-caterpillar branch.
	std::vector<double> logs;
	for (std::size_t i = win.begin; i < traj.samples.size(); ++i)
		logs.push_back(std::log(traj.samples[i].monitors.internal_sum));
	double s_slope = fit_slope(win.t, logs);
	report.add({"internal weight total grows", s_slope > 0.0, s_slope, 0.0, 0.0,
	            "log slope of S(t) over the tail"});

	int diverging_internal = 0;
	for (EdgeId e = 0; e < tree.edge_count(); ++e)
		if (kinds[static_cast<std::size_t>(e)] == EdgeKind::internal &&
		    verdict.edges[static_cast<std::size_t>(e)].weight_class == WeightLimitClass::diverging)
			++diverging_internal;
	report.add({"some internal weight diverges", diverging_internal >= 1,
	            static_cast<double>(diverging_internal), 1.0, 0.0, ""});

	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		const EdgeVerdict& v = verdict.edges[static_cast<std::size_t>(e)];
		if (std::abs(v.kappa_tail_mean) > opt.constancy_tol) continue;
		report.add({"zero-curvature edge " + tree.edge_label(e) + " sheds normalized weight",
		            v.normalized_log_slope <= -kFlatSlope, v.normalized_log_slope, 0.0, kFlatSlope,
		            "normalized log slope must stay below -" + format_double(kFlatSlope)});
	}
	return report;
}

CheckReport verify_prop_bounds(const Trajectory& traj, const DetectOptions& opt) {
	const WeightedTree& tree = traj.tree;
	CheckReport report;
	EmpiricalVerdict verdict = detect_limits(traj, opt);
	std::vector<LimitPrediction> pred = predict_limits(tree);
	const std::vector<double>& w0 = traj.samples.front().w;
	const double scale0 = stable_total(w0);

	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		const LimitPrediction& p = pred[static_cast<std::size_t>(e)];
		const EdgeVerdict& v = verdict.edges[static_cast<std::size_t>(e)];
		if (p.cls == EdgeLimitClass::leaf_negative_bounded) {
			report.add({"leaf " + tree.edge_label(e) + " eventually below its bound",
			            v.kappa_tail_mean <= p.value + kBoundSlack, v.kappa_tail_mean, p.value,
			            kBoundSlack, ""});
		}
		if (p.cls == EdgeLimitClass::leaf_positive || p.cls == EdgeLimitClass::leaf_zero) {
			double peak = 0.0;
			for (const Sample& s : traj.samples)
				peak = std::max(peak, s.w[static_cast<std::size_t>(e)]);
			bool shrinking = traj.floored[static_cast<std::size_t>(e)] ||
			                 v.weight_log_slope < 0.0;
			report.add({"leaf " + tree.edge_label(e) + " weight stays bounded",
			            peak <= 1e3 * scale0, peak, scale0, 1e3 * scale0, ""});
			report.add({"leaf " + tree.edge_label(e) + " weight eventually shrinks", shrinking,
			            v.weight_log_slope, 0.0, 0.0, ""});
		}
	}

	// The heaviest starting leaf at each vertex keeps its curvature above
	// 1 - (d - 2)/d'. Strict when the vertex touches any internal edge; a
	// star center can sit exactly on the bound, so only roundoff slack is
	// granted either way.
	for (VertexId u = 0; u < tree.vertex_count(); ++u) {
		VertexProfile prof = vertex_profile(tree, u);
		if (prof.degree < 3 || prof.leaf_degree < 1) continue;
		EdgeId heaviest = -1;
		double best = -1.0;
		for (const Neighbor& n : tree.neighbors(u)) {
			if (!tree.is_leaf(n.vertex)) continue;
			double w = w0[static_cast<std::size_t>(n.edge)];
			if (w > best) {
				best = w;
				heaviest = n.edge;
			}
		}
		double bound = 1.0 - static_cast<double>(prof.degree - 2) / prof.leaf_degree;
		double margin = std::numeric_limits<double>::infinity();
		for (const Sample& s : traj.samples)
			margin = std::min(margin,
			                  s.curvature.kappa[static_cast<std::size_t>(heaviest)] - bound);
		report.add({"heaviest leaf at " + tree.vertex_name(u) + " stays above 1-(d-2)/d'",
		            margin >= -kStrictSlack, margin, 0.0, kStrictSlack,
		            "minimum margin over all samples"});
	}
	return report;
}

std::vector<std::vector<EdgeId>> maximal_paths(const WeightedTree& tree,
                                               const std::vector<EdgeId>& e_plus) {
	std::vector<char> in_plus(static_cast<std::size_t>(tree.edge_count()), 0);
	for (EdgeId e : e_plus) {
		if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
		in_plus[static_cast<std::size_t>(e)] = 1;
	}

	std::vector<int> plus_degree(static_cast<std::size_t>(tree.vertex_count()), 0);
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		if (!in_plus[static_cast<std::size_t>(e)]) continue;
		++plus_degree[static_cast<std::size_t>(tree.edge(e).a)];
		++plus_degree[static_cast<std::size_t>(tree.edge(e).b)];
	}

	// Component label per vertex, walking only e_plus edges.
	std::vector<int> comp(static_cast<std::size_t>(tree.vertex_count()), -1);
	int n_comp = 0;
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		if (plus_degree[static_cast<std::size_t>(v)] == 0 || comp[static_cast<std::size_t>(v)] >= 0)
			continue;
		std::vector<VertexId> queue{v};
		comp[static_cast<std::size_t>(v)] = n_comp;
		for (std::size_t head = 0; head < queue.size(); ++head) {
			for (const Neighbor& n : tree.neighbors(queue[head])) {
				if (!in_plus[static_cast<std::size_t>(n.edge)]) continue;
				if (comp[static_cast<std::size_t>(n.vertex)] >= 0) continue;
				comp[static_cast<std::size_t>(n.vertex)] = n_comp;
				queue.push_back(n.vertex);
			}
		}
		++n_comp;
	}

	std::vector<VertexId> tips;
	for (VertexId v = 0; v < tree.vertex_count(); ++v)
		if (plus_degree[static_cast<std::size_t>(v)] == 1) tips.push_back(v);

	std::vector<std::vector<EdgeId>> paths;
	for (std::size_t i = 0; i < tips.size(); ++i) {
		for (std::size_t j = i + 1; j < tips.size(); ++j) {
			if (comp[static_cast<std::size_t>(tips[i])] != comp[static_cast<std::size_t>(tips[j])])
				continue;
			// Unique tree path between the two tips; inside one component it
			// stays on e_plus edges.
			std::vector<EdgeId> via(static_cast<std::size_t>(tree.vertex_count()), -1);
			std::vector<VertexId> parent(static_cast<std::size_t>(tree.vertex_count()), -1);
			std::vector<VertexId> queue{tips[i]};
			parent[static_cast<std::size_t>(tips[i])] = tips[i];
			for (std::size_t head = 0; head < queue.size(); ++head) {
				for (const Neighbor& n : tree.neighbors(queue[head])) {
					if (parent[static_cast<std::size_t>(n.vertex)] >= 0) continue;
					parent[static_cast<std::size_t>(n.vertex)] = queue[head];
					via[static_cast<std::size_t>(n.vertex)] = n.edge;
					queue.push_back(n.vertex);
				}
			}
			std::vector<EdgeId> path;
			for (VertexId v = tips[j]; v != tips[i]; v = parent[static_cast<std::size_t>(v)])
				path.push_back(via[static_cast<std::size_t>(v)]);
			std::reverse(path.begin(), path.end());
			paths.push_back(std::move(path));
		}
	}
	return paths;
}

BalancedPathSystem balance_system(const WeightedTree& tree, const std::vector<EdgeId>& e_plus,
                                  const std::vector<EdgeId>& path, double kappa) {
	if (path.empty()) fail(Errc::not_maximal_path, "empty edge path");
	std::vector<char> in_plus(static_cast<std::size_t>(tree.edge_count()), 0);
	for (EdgeId e : e_plus) in_plus[static_cast<std::size_t>(e)] = 1;
	for (EdgeId e : path) {
		if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
		if (!in_plus[static_cast<std::size_t>(e)])
			fail(Errc::not_maximal_path,
			     "edge " + tree.edge_label(e) + " is not in the positive set");
	}

	// Reconstruct the vertex walk v0, v1, ..., vl along the edges.
	std::vector<VertexId> walk;
	if (path.size() == 1) {
		walk = {tree.edge(path[0]).a, tree.edge(path[0]).b};
	} else {
		const Edge& e0 = tree.edge(path[0]);
		const Edge& e1 = tree.edge(path[1]);
		VertexId shared = (e0.a == e1.a || e0.a == e1.b) ? e0.a : e0.b;
		if (shared != e1.a && shared != e1.b)
			fail(Errc::not_maximal_path, "edges do not form a connected path");
		walk.push_back(tree.opposite(path[0], shared));
		walk.push_back(shared);
		for (std::size_t i = 1; i < path.size(); ++i) {
			const Edge& e = tree.edge(path[i]);
			VertexId prev = walk.back();
			if (e.a != prev && e.b != prev)
				fail(Errc::not_maximal_path, "edges do not form a connected path");
			walk.push_back(tree.opposite(path[i], prev));
		}
	}
	std::set<VertexId> distinct(walk.begin(), walk.end());
	if (distinct.size() != walk.size())
		fail(Errc::not_maximal_path, "edge sequence revisits a vertex");

	// Maximality: neither end vertex may touch another positive edge.
	for (VertexId end : {walk.front(), walk.back()}) {
		int touching = 0;
		for (const Neighbor& n : tree.neighbors(end))
			if (in_plus[static_cast<std::size_t>(n.edge)]) ++touching;
		if (touching != 1)
			fail(Errc::not_maximal_path, "path could be extended at vertex '" +
			                                 tree.vertex_name(end) + "'");
	}

	BalancedPathSystem sys;
	sys.path = path;
	sys.kappa = kappa;
	sys.coefficients.resize(path.size());
	for (std::size_t i = 0; i < path.size(); ++i)
		sys.coefficients[i] = (i % 2 == 0 ? kappa : -kappa);
	// A path end stopping at a tree leaf shifts that terminal coefficient
	// from kappa to kappa - 1 (the leaf side contributes exactly 1).
	if (tree.is_leaf(walk.front())) sys.coefficients.front() -= 1.0;
	if (tree.is_leaf(walk.back()))
		sys.coefficients.back() -= (path.size() % 2 == 1 ? 1.0 : -1.0);

	double peak = 0.0;
	for (double c : sys.coefficients) peak = std::max(peak, std::abs(c));
	sys.degenerate = peak <= 1e-12;
	return sys;
}

double balance_residual(const BalancedPathSystem& system, const std::vector<double>& weights) {
	StableSum sum;
	for (std::size_t i = 0; i < system.path.size(); ++i)
		sum.add(system.coefficients[i] *
		        weights[static_cast<std::size_t>(system.path[i])]);
	return std::abs(sum.value());
}

} // namespace treeflow
