#include "treeflow/transport.hpp"

#include <cmath>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

void validate_measure(const WeightedTree& tree, const ProbabilityMeasure& mu) {
	if (static_cast<int>(mu.mass.size()) != tree.vertex_count())
		fail(Errc::measure_not_normalized,
		     "measure has " + std::to_string(mu.mass.size()) + " entries for " +
		         std::to_string(tree.vertex_count()) + " vertices");
	StableSum total;
	for (double m : mu.mass) {
		if (!std::isfinite(m) || m < 0.0)
			fail(Errc::measure_not_normalized, "mass " + format_double(m) + " is not in [0, 1]");
		total.add(m);
	}
	if (std::abs(total.value() - 1.0) > 1e-12)
		fail(Errc::measure_not_normalized,
		     "masses sum to " + format_double(total.value()) + ", not 1");
}

ProbabilityMeasure walk_measure(const WeightedTree& tree, const Metric& metric,
                                const GammaFunction& gamma, VertexId x, double alpha) {
	if (x < 0 || x >= tree.vertex_count()) fail(Errc::unknown_vertex, "vertex id out of range");
	if (!(alpha >= 0.0 && alpha <= 1.0))
		fail(Errc::alpha_out_of_range, "alpha " + format_double(alpha) + " outside [0, 1]");
	validate_metric(tree, metric);

	StableSum degree;
	for (const Neighbor& n : tree.neighbors(x))
		degree.add(gamma(metric.w[static_cast<std::size_t>(n.edge)]));

	ProbabilityMeasure mu;
	mu.mass.assign(static_cast<std::size_t>(tree.vertex_count()), 0.0);
	mu.mass[static_cast<std::size_t>(x)] = alpha;
	for (const Neighbor& n : tree.neighbors(x))
		mu.mass[static_cast<std::size_t>(n.vertex)] =
		    (1.0 - alpha) * gamma(metric.w[static_cast<std::size_t>(n.edge)]) / degree.value();
	return mu;
}

namespace {

/// Vertex order with children after parents when rooted at vertex 0,
/// plus the parent edge of each vertex. Lets subtree sums run in one
/// reverse sweep.
struct RootedView {
	std::vector<VertexId> order;
	std::vector<EdgeId> parent_edge;  // -1 at the root
	std::vector<VertexId> parent;     // -1 at the root
};

RootedView root_at_zero(const WeightedTree& tree) {
	RootedView rv;
	const std::size_t n = static_cast<std::size_t>(tree.vertex_count());
	rv.parent_edge.assign(n, -1);
	rv.parent.assign(n, -1);
	rv.order.reserve(n);
	std::vector<char> seen(n, 0);
	rv.order.push_back(0);
	seen[0] = 1;
	for (std::size_t head = 0; head < rv.order.size(); ++head) {
		VertexId v = rv.order[head];
		for (const Neighbor& nb : tree.neighbors(v)) {
			if (seen[static_cast<std::size_t>(nb.vertex)]) continue;
			seen[static_cast<std::size_t>(nb.vertex)] = 1;
			rv.parent[static_cast<std::size_t>(nb.vertex)] = v;
			rv.parent_edge[static_cast<std::size_t>(nb.vertex)] = nb.edge;
			rv.order.push_back(nb.vertex);
		}
	}
	return rv;
}

} // namespace

double wasserstein_tree(const WeightedTree& tree, const Metric& metric,
                        const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
	validate_metric(tree, metric);
	validate_measure(tree, mu);
	validate_measure(tree, nu);

	RootedView rv = root_at_zero(tree);
	std::vector<double> net(static_cast<std::size_t>(tree.vertex_count()));
	for (VertexId v = 0; v < tree.vertex_count(); ++v)
		net[static_cast<std::size_t>(v)] =
		    mu.mass[static_cast<std::size_t>(v)] - nu.mass[static_cast<std::size_t>(v)];

	// Reverse sweep accumulates each subtree's net mass; that net mass is
	// exactly what crosses the parent edge.
	StableSum cost;
	for (std::size_t i = rv.order.size(); i-- > 1;) {
		VertexId v = rv.order[i];
		VertexId p = rv.parent[static_cast<std::size_t>(v)];
		EdgeId pe = rv.parent_edge[static_cast<std::size_t>(v)];
		cost.add(metric.w[static_cast<std::size_t>(pe)] *
		         std::abs(net[static_cast<std::size_t>(v)]));
		net[static_cast<std::size_t>(p)] += net[static_cast<std::size_t>(v)];
	}
	return cost.value();
}

PotentialFunction kantorovich_potential(const WeightedTree& tree, const Metric& metric, EdgeId e) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	validate_metric(tree, metric);
	const Edge& ed = tree.edge(e);
	const double w = metric.w[static_cast<std::size_t>(e)];

	PotentialFunction g;
	g.value.assign(static_cast<std::size_t>(tree.vertex_count()), 0.0);
	g.value[static_cast<std::size_t>(ed.a)] = w;
	g.value[static_cast<std::size_t>(ed.b)] = 0.0;
	for (const Neighbor& n : tree.neighbors(ed.a)) {
		if (n.vertex == ed.b) continue;
		g.value[static_cast<std::size_t>(n.vertex)] =
		    metric.w[static_cast<std::size_t>(n.edge)] + w;
	}
	for (const Neighbor& n : tree.neighbors(ed.b)) {
		if (n.vertex == ed.a) continue;
		g.value[static_cast<std::size_t>(n.vertex)] = -metric.w[static_cast<std::size_t>(n.edge)];
	}
	return g;
}

double dual_value(const WeightedTree& tree, const PotentialFunction& g,
                  const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
	StableSum sum;
	for (VertexId v = 0; v < tree.vertex_count(); ++v)
		sum.add(g.value[static_cast<std::size_t>(v)] *
		        (mu.mass[static_cast<std::size_t>(v)] - nu.mass[static_cast<std::size_t>(v)]));
	return sum.value();
}

double alpha_curvature(const WeightedTree& tree, const Metric& metric,
                       const GammaFunction& gamma, EdgeId e, double alpha) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	const Edge& ed = tree.edge(e);
	ProbabilityMeasure mu = walk_measure(tree, metric, gamma, ed.a, alpha);
	ProbabilityMeasure nu = walk_measure(tree, metric, gamma, ed.b, alpha);
	double w = metric.w[static_cast<std::size_t>(e)];
	return 1.0 - wasserstein_tree(tree, metric, mu, nu) / w;
}

double lly_oracle(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                  EdgeId e) {
	constexpr double alphas[] = {0.5, 0.9, 0.99};
	double q[3];
	for (int i = 0; i < 3; ++i)
		q[i] = alpha_curvature(tree, metric, gamma, e, alphas[i]) / (1.0 - alphas[i]);
	double lo = std::min({q[0], q[1], q[2]});
	double hi = std::max({q[0], q[1], q[2]});
	if (hi - lo > 1e-9)
		fail(Errc::nonlinear_alpha_profile,
		     "alpha profile of " + tree.edge_label(e) + " spreads " + format_double(hi - lo) +
		         " across alpha samples");
	return q[0];
}

std::vector<double> distances_from(const WeightedTree& tree, const Metric& metric, VertexId src) {
	if (src < 0 || src >= tree.vertex_count()) fail(Errc::unknown_vertex, "vertex id out of range");
	std::vector<double> dist(static_cast<std::size_t>(tree.vertex_count()), -1.0);
	std::vector<VertexId> queue{src};
	dist[static_cast<std::size_t>(src)] = 0.0;
	for (std::size_t head = 0; head < queue.size(); ++head) {
		VertexId v = queue[head];
		for (const Neighbor& n : tree.neighbors(v)) {
			if (dist[static_cast<std::size_t>(n.vertex)] >= 0.0) continue;
			dist[static_cast<std::size_t>(n.vertex)] =
			    dist[static_cast<std::size_t>(v)] + metric.w[static_cast<std::size_t>(n.edge)];
			queue.push_back(n.vertex);
		}
	}
	return dist;
}

double tree_distance(const WeightedTree& tree, const Metric& metric, VertexId x, VertexId y) {
	return distances_from(tree, metric, x)[static_cast<std::size_t>(y)];
}

} // namespace treeflow
