#include "treeflow/metric.hpp"

#include <cmath>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

void validate_metric(const WeightedTree& tree, const Metric& metric) {
	if (static_cast<int>(metric.w.size()) != tree.edge_count())
		fail(Errc::unknown_edge, "metric has " + std::to_string(metric.w.size()) +
		                             " weights for " + std::to_string(tree.edge_count()) +
		                             " edges");
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		double w = metric.w[static_cast<std::size_t>(e)];
		if (!std::isfinite(w))
			fail(Errc::non_finite_state, "weight of " + tree.edge_label(e) + " is not finite");
		if (w <= 0.0)
			fail(Errc::non_positive_weight,
			     "weight of " + tree.edge_label(e) + " is " + format_double(w));
	}
	if (metric.normalized) {
		double total = total_weight(metric);
		if (std::abs(total - 1.0) > 1e-9)
			fail(Errc::not_normalized,
			     "normalized metric sums to " + format_double(total) + ", not 1");
	}
}

Metric initial_metric(const WeightedTree& tree) {
	Metric m;
	m.w.reserve(static_cast<std::size_t>(tree.edge_count()));
	for (const Edge& e : tree.edges()) m.w.push_back(e.weight);
	return m;
}

Metric unit_metric(const WeightedTree& tree) {
	Metric m;
	m.w.assign(static_cast<std::size_t>(tree.edge_count()), 1.0);
	return m;
}

double total_weight(const Metric& metric) {
	return stable_total(metric.w);
}

Metric normalize(const Metric& metric) {
	Metric out = metric;
	double total = total_weight(metric);
	for (double& w : out.w) w /= total;
	out.normalized = true;
	return out;
}

GammaFunction GammaFunction::power(double scale, double exponent) {
	if (!(scale > 0.0) || !std::isfinite(scale) || exponent == 0.0 || !std::isfinite(exponent))
		fail(Errc::invalid_gamma,
		     "power gamma needs scale > 0 and exponent != 0, got scale=" + format_double(scale) +
		         " exponent=" + format_double(exponent));
	GammaFunction g;
	g.kind = Kind::power;
	g.scale = scale;
	g.exponent = exponent;
	return g;
}

double GammaFunction::operator()(double x) const {
	if (kind == Kind::reciprocal) return 1.0 / x;
	return scale * std::pow(x, exponent);
}

} // namespace treeflow
