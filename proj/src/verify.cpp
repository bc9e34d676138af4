#include "treeflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>

#include "treeflow/curvature.hpp"
#include "treeflow/errors.hpp"
#include "treeflow/flow.hpp"
#include "treeflow/numerics.hpp"
#include "treeflow/transport.hpp"
#include "treeflow/treegen.hpp"

namespace treeflow {

namespace {

std::string brief(double x) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.3g", x);
	return buf;
}

/// Collects the worst observation for one property across a batch.
class Worst {
public:
	void note(double value) { value_ = std::max(value_, value); }
	double value() const { return value_; }

	CheckItem item(std::string name, double tol, std::string detail = "") const {
		return {std::move(name), value_ <= tol, value_, 0.0, tol, std::move(detail)};
	}

private:
	double value_ = 0.0;
};

ProbabilityMeasure random_measure(std::mt19937_64& rng, int n) {
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	ProbabilityMeasure mu;
	mu.mass.resize(static_cast<std::size_t>(n));
	double total = 0.0;
	for (double& m : mu.mass) {
		m = unit(rng);
		total += m;
	}
	for (double& m : mu.mass) m /= total;
	return mu;
}

} // namespace

CheckReport run_self_checks(const VerifyOptions& opt) {
	std::mt19937_64 rng(opt.seed);
	std::uniform_int_distribution<int> tree_size(2, 12);
	std::uniform_int_distribution<int> small_size(3, 7);
	std::uniform_real_distribution<double> lazy(0.5, 1.0);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	const GammaFunction gamma = GammaFunction::standard();
	const bool corrupt = std::getenv("TRF_VERIFY_CORRUPT") != nullptr;

	Worst gauss_bonnet, bounds, identity, halves, general_gamma, scale_pow2, scale_any;
	Worst oracle, duality, sym, self_zero, triangle;
	Worst derivative, product_law, simplex_total, variant_gap;

	for (int i = 0; i < opt.trees; ++i) {
		WeightedTree tree = random_tree(rng, tree_size(rng));
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		CurvatureVector curv = kappa_all(tree, m);

		gauss_bonnet.note(std::abs(gauss_bonnet_residual(curv)));

		for (EdgeId e = 0; e < tree.edge_count(); ++e) {
			const Edge& ed = tree.edge(e);
			int da = tree.degree(ed.a), db = tree.degree(ed.b);
			double k = curv.kappa[static_cast<std::size_t>(e)];
			if (da + db >= 3) bounds.note(k - 1.0);
			bounds.note((4.0 - da - db) - k);
			halves.note(std::abs(kappa_edge(tree, m, e) - k));
			general_gamma.note(std::abs(kappa_general(tree, m, gamma, e) - k));
		}

		{
			StableSum dot;
			for (EdgeId e = 0; e < tree.edge_count(); ++e)
				dot.add(curv.kappa[static_cast<std::size_t>(e)] * m.w[static_cast<std::size_t>(e)]);
			identity.note(std::abs(dot.value() - kappa_weight_sum(tree, m)));
		}

		{
			Metric doubled = m;
			for (double& w : doubled.w) w *= 4.0; // power of two: exact in binary64
			Metric scaled = m;
			double c = 0.1 + 9.9 * unit(rng);
			for (double& w : scaled.w) w *= c;
			CurvatureVector kd = kappa_all(tree, doubled);
			CurvatureVector ks = kappa_all(tree, scaled);
			for (EdgeId e = 0; e < tree.edge_count(); ++e) {
				scale_pow2.note(std::abs(kd.kappa[static_cast<std::size_t>(e)] -
				                         curv.kappa[static_cast<std::size_t>(e)]));
				scale_any.note(std::abs(ks.kappa[static_cast<std::size_t>(e)] -
				                        curv.kappa[static_cast<std::size_t>(e)]));
			}
		}

		{
			std::uniform_int_distribution<EdgeId> pick(0, tree.edge_count() - 1);
			EdgeId e = pick(rng);
			oracle.note(std::abs(lly_oracle(tree, m, gamma, e) - kappa_edge(tree, m, e)));

			EdgeId f = pick(rng);
			double alpha = lazy(rng);
			const Edge& ed = tree.edge(f);
			ProbabilityMeasure mu = walk_measure(tree, m, gamma, ed.a, alpha);
			ProbabilityMeasure nu = walk_measure(tree, m, gamma, ed.b, alpha);
			double w1 = wasserstein_tree(tree, m, mu, nu);
			PotentialFunction g = kantorovich_potential(tree, m, f);
			duality.note(std::abs(dual_value(tree, g, mu, nu) - w1));
		}

		{
			ProbabilityMeasure a = random_measure(rng, tree.vertex_count());
			ProbabilityMeasure b = random_measure(rng, tree.vertex_count());
			ProbabilityMeasure c = random_measure(rng, tree.vertex_count());
			double ab = wasserstein_tree(tree, m, a, b);
			sym.note(std::abs(ab - wasserstein_tree(tree, m, b, a)));
			self_zero.note(wasserstein_tree(tree, m, a, a));
			triangle.note(ab - (wasserstein_tree(tree, m, a, c) + wasserstein_tree(tree, m, c, b)));
		}

		{
			// Central difference along the flow direction vs the closed form.
			std::vector<double> dot = rhs_unnormalized(tree, m.w);
			const double h = 1e-6;
			Metric plus = m, minus = m;
			for (std::size_t e = 0; e < m.w.size(); ++e) {
				plus.w[e] += h * dot[e];
				minus.w[e] -= h * dot[e];
			}
			CurvatureVector kp = kappa_all(tree, plus);
			CurvatureVector km = kappa_all(tree, minus);
			std::vector<double> exact = kappa_derivative(tree, m);
			for (std::size_t e = 0; e < m.w.size(); ++e)
				derivative.note(std::abs((kp.kappa[e] - km.kappa[e]) / (2.0 * h) - exact[e]));
		}
	}

	for (int i = 0; i < opt.flow_runs; ++i) {
		WeightedTree tree = random_tree(rng, small_size(rng));
		Metric m = random_metric(rng, tree, 0.5, 2.0);

		FlowSpec spec;
		spec.variant = FlowVariant::unnormalized;
		spec.t_end = 5.0;
		spec.record_every = 0.5;
		Trajectory un = integrate(tree, m, spec);
		for (const Sample& s : un.samples)
			product_law.note(std::abs(s.monitors.product_log_residual.value()));

		FlowSpec nspec = spec;
		nspec.variant = FlowVariant::normalized;
		Trajectory direct = integrate(tree, normalize(m), nspec);
		for (const Sample& s : direct.samples)
			simplex_total.note(std::abs(s.monitors.total_weight_residual.value()));

		Trajectory rescaled = normalized_from_unnormalized(un);
		std::size_t common = std::min(rescaled.samples.size(), direct.samples.size());
		for (std::size_t k = 0; k < common; ++k)
			for (std::size_t e = 0; e < m.w.size(); ++e)
				variant_gap.note(std::abs(rescaled.samples[k].w[e] - direct.samples[k].w[e]));
	}

	if (corrupt) gauss_bonnet.note(1e-3);

	CheckReport report;
	report.add(gauss_bonnet.item("total curvature equals 2", 1e-10));
	report.add(bounds.item("curvature bounds 4-d_u-d_v <= kappa <= 1", 1e-12,
	                       "upper bound skipped on a lone edge, where kappa is 2"));
	report.add(identity.item("vertex-side identity for sum kappa*w", 1e-10));
	report.add(halves.item("directional halves agree with batch curvature", 1e-12));
	report.add(general_gamma.item("general-gamma formula matches 1/x closed form", 1e-12));
	report.add(scale_pow2.item("scale invariance, power-of-two factor", 0.0,
	                           "binary64 scaling is exact, so the match must be bitwise"));
	report.add(scale_any.item("scale invariance, arbitrary factor", 1e-12));
	report.add(oracle.item("transport-limit oracle matches closed form", 1e-9));
	report.add(duality.item("dual potential attains the transport distance", 1e-10));
	report.add(sym.item("transport distance is symmetric", 1e-12));
	report.add(self_zero.item("transport distance of a measure to itself", 1e-12));
	report.add(triangle.item("triangle inequality", 1e-12));
	report.add(derivative.item("curvature derivative matches central difference", 1e-5));
	report.add(product_law.item("log-product conservation along unnormalized runs", 1e-6));
	report.add(simplex_total.item("normalized runs stay on the weight simplex", 1e-9));
	report.add(variant_gap.item("rescaled unnormalized run matches normalized run", 1e-6));

	if (opt.log) {
		for (const CheckItem& item : report.items)
			*opt.log << (item.passed ? "[ ok ] " : "[FAIL] ") << item.name << ": worst "
			         << brief(item.measured) << " (tolerance " << brief(item.tolerance) << ")\n";
	}
	return report;
}

} // namespace treeflow
