#include "treeflow/curvature.hpp"

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

namespace {

double edge_weight(const Metric& metric, EdgeId e) {
	return metric.w[static_cast<std::size_t>(e)];
}

std::vector<double> reciprocal_degrees(const WeightedTree& tree, const Metric& metric) {
	std::vector<double> deg(static_cast<std::size_t>(tree.vertex_count()));
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		StableSum sum;
		for (const Neighbor& n : tree.neighbors(v)) sum.add(1.0 / edge_weight(metric, n.edge));
		deg[static_cast<std::size_t>(v)] = sum.value();
	}
	return deg;
}

} // namespace

double weighted_degree(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                       VertexId v) {
	if (v < 0 || v >= tree.vertex_count()) fail(Errc::unknown_vertex, "vertex id out of range");
	validate_metric(tree, metric);
	StableSum sum;
	for (const Neighbor& n : tree.neighbors(v)) sum.add(gamma(edge_weight(metric, n.edge)));
	return sum.value();
}

double kappa_directional(const WeightedTree& tree, const Metric& metric, EdgeId e, VertexId u) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	const Edge& ed = tree.edge(e);
	if (ed.a != u && ed.b != u)
		fail(Errc::not_endpoint,
		     "vertex '" + tree.vertex_name(u) + "' is not an endpoint of " + tree.edge_label(e));
	StableSum du;
	for (const Neighbor& n : tree.neighbors(u)) du.add(1.0 / edge_weight(metric, n.edge));
	return (2.0 - tree.degree(u)) / (edge_weight(metric, e) * du.value());
}

double kappa_edge(const WeightedTree& tree, const Metric& metric, EdgeId e) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	const Edge& ed = tree.edge(e);
	return kappa_directional(tree, metric, e, ed.a) + kappa_directional(tree, metric, e, ed.b);
}

double kappa_general(const WeightedTree& tree, const Metric& metric, const GammaFunction& gamma,
                     EdgeId e) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	validate_metric(tree, metric);
	const Edge& ed = tree.edge(e);
	const double w = edge_weight(metric, e);
	const double gw = gamma(w);

	double side[2];
	for (int i = 0; i < 2; ++i) {
		VertexId u = i == 0 ? ed.a : ed.b;
		StableSum deg, mass;
		for (const Neighbor& n : tree.neighbors(u)) {
			double wn = edge_weight(metric, n.edge);
			deg.add(gamma(wn));
			mass.add(wn * gamma(wn));
		}
		// 2 gamma(w)/D_u minus the gamma-weighted neighborhood mass spread
		// over the edge length.
		side[i] = (2.0 * gw - mass.value() / w) / deg.value();
	}
	return side[0] + side[1];
}

CurvatureVector kappa_all(const WeightedTree& tree, const Metric& metric) {
	CurvatureVector out;
	out.degree = reciprocal_degrees(tree, metric);
	out.kappa.resize(static_cast<std::size_t>(tree.edge_count()));
	out.kappa_ab.resize(static_cast<std::size_t>(tree.edge_count()));
	out.kappa_ba.resize(static_cast<std::size_t>(tree.edge_count()));
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		const Edge& ed = tree.edge(e);
		const double w = edge_weight(metric, e);
		double ka = (2.0 - tree.degree(ed.a)) / (w * out.degree[static_cast<std::size_t>(ed.a)]);
		double kb = (2.0 - tree.degree(ed.b)) / (w * out.degree[static_cast<std::size_t>(ed.b)]);
		out.kappa_ab[static_cast<std::size_t>(e)] = ka;
		out.kappa_ba[static_cast<std::size_t>(e)] = kb;
		out.kappa[static_cast<std::size_t>(e)] = ka + kb;
	}
	return out;
}

double gauss_bonnet_residual(const CurvatureVector& curv) {
	StableSum sum;
	for (double k : curv.kappa) sum.add(k);
	return sum.value() - 2.0;
}

double kappa_weight_sum(const WeightedTree& tree, const Metric& metric) {
	std::vector<double> deg = reciprocal_degrees(tree, metric);
	StableSum sum;
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		int d = tree.degree(v);
		if (d == 1)
			sum.add(metric.w[static_cast<std::size_t>(tree.neighbors(v).front().edge)]);
		else
			sum.add((2.0 - d) * d / deg[static_cast<std::size_t>(v)]);
	}
	return sum.value();
}

std::vector<double> kappa_derivative(const WeightedTree& tree, const Metric& metric) {
	CurvatureVector curv = kappa_all(tree, metric);
	// R[u] = sum over incident edges of kappa / w.
	std::vector<double> r(static_cast<std::size_t>(tree.vertex_count()));
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		StableSum sum;
		for (const Neighbor& n : tree.neighbors(v))
			sum.add(curv.kappa[static_cast<std::size_t>(n.edge)] /
			        metric.w[static_cast<std::size_t>(n.edge)]);
		r[static_cast<std::size_t>(v)] = sum.value();
	}
	std::vector<double> out(static_cast<std::size_t>(tree.edge_count()));
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		const Edge& ed = tree.edge(e);
		const double w = metric.w[static_cast<std::size_t>(e)];
		const double k = curv.kappa[static_cast<std::size_t>(e)];
		double acc = 0.0;
		for (VertexId u : {ed.a, ed.b}) {
			double du = curv.degree[static_cast<std::size_t>(u)];
			acc += (tree.degree(u) - 2.0) / (w * du) * (r[static_cast<std::size_t>(u)] / du - k);
		}
		out[static_cast<std::size_t>(e)] = acc;
	}
	return out;
}

} // namespace treeflow
