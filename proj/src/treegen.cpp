#include "treeflow/treegen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "treeflow/errors.hpp"

namespace treeflow {

namespace {

/// Canonical level sequences of rooted trees on n vertices (root at level 1,
/// preorder depths), emitted in decreasing lexicographic order. Starts at
/// the path [1, 2, ..., n]; the successor rule trims the deepest branch and
/// tiles the tail with the block that preceded it; ends at the star
/// [1, 2, 2, ..., 2].
std::vector<std::vector<int>> rooted_level_sequences(int n) {
	std::vector<std::vector<int>> out;
	std::vector<int> level(static_cast<std::size_t>(n));
	for (int i = 0; i < n; ++i) level[static_cast<std::size_t>(i)] = i + 1;
	for (;;) {
		out.push_back(level);
		int p = -1;
		for (int i = n - 1; i >= 0; --i) {
			if (level[static_cast<std::size_t>(i)] > 2) {
				p = i;
				break;
			}
		}
		if (p < 0) break;
		int q = -1;
		for (int i = p - 1; i >= 0; --i) {
			if (level[static_cast<std::size_t>(i)] == level[static_cast<std::size_t>(p)] - 1) {
				q = i;
				break;
			}
		}
		for (int i = p; i < n; ++i)
			level[static_cast<std::size_t>(i)] =
			    level[static_cast<std::size_t>(i - (p - q))];
	}
	return out;
}

std::vector<std::string> letter_names(int n) {
	std::vector<std::string> names(static_cast<std::size_t>(n));
	for (int i = 0; i < n; ++i) names[static_cast<std::size_t>(i)] = std::string(1, static_cast<char>('a' + i));
	return names;
}

WeightedTree tree_from_levels(const std::vector<int>& level) {
	const int n = static_cast<int>(level.size());
	std::vector<std::string> names = letter_names(n);
	std::vector<WeightedTree::RawEdge> edges;
	std::vector<int> ancestor(static_cast<std::size_t>(n) + 1, -1);
	for (int i = 0; i < n; ++i) {
		int depth = level[static_cast<std::size_t>(i)];
		if (depth > 1)
			edges.push_back({names[static_cast<std::size_t>(ancestor[static_cast<std::size_t>(depth - 1)])],
			                 names[static_cast<std::size_t>(i)], 1.0, i});
		ancestor[static_cast<std::size_t>(depth)] = i;
	}
	return WeightedTree::from_edges(edges);
}

/// Center vertices (one or two) found by repeatedly peeling leaves.
std::vector<VertexId> tree_centers(const WeightedTree& tree) {
	const int n = tree.vertex_count();
	if (n <= 2) {
		std::vector<VertexId> all;
		for (VertexId v = 0; v < n; ++v) all.push_back(v);
		return all;
	}
	std::vector<int> degree(static_cast<std::size_t>(n));
	std::vector<char> gone(static_cast<std::size_t>(n), 0);
	std::vector<VertexId> layer;
	for (VertexId v = 0; v < n; ++v) {
		degree[static_cast<std::size_t>(v)] = tree.degree(v);
		if (degree[static_cast<std::size_t>(v)] == 1) layer.push_back(v);
	}
	int remaining = n;
	while (remaining > 2) {
		std::vector<VertexId> next;
		for (VertexId v : layer) {
			gone[static_cast<std::size_t>(v)] = 1;
			--remaining;
			for (const Neighbor& nb : tree.neighbors(v)) {
				if (gone[static_cast<std::size_t>(nb.vertex)]) continue;
				if (--degree[static_cast<std::size_t>(nb.vertex)] == 1)
					next.push_back(nb.vertex);
			}
		}
		layer = std::move(next);
	}
	std::vector<VertexId> centers;
	for (VertexId v = 0; v < n; ++v)
		if (!gone[static_cast<std::size_t>(v)]) centers.push_back(v);
	return centers;
}

std::string encode_rooted(const WeightedTree& tree, VertexId root, VertexId banned) {
	std::vector<std::string> parts;
	for (const Neighbor& nb : tree.neighbors(root))
		if (nb.vertex != banned) parts.push_back(encode_rooted(tree, nb.vertex, root));
	std::sort(parts.begin(), parts.end());
	std::string out = "(";
	for (const std::string& p : parts) out += p;
	out += ")";
	return out;
}

} // namespace

std::string tree_certificate(const WeightedTree& tree) {
	std::vector<VertexId> centers = tree_centers(tree);
	if (centers.size() == 1) return encode_rooted(tree, centers[0], -1);
	std::string s1 = encode_rooted(tree, centers[0], centers[1]);
	std::string s2 = encode_rooted(tree, centers[1], centers[0]);
	if (s2 < s1) std::swap(s1, s2);
	return "[" + s1 + s2 + "]";
}

std::vector<WeightedTree> enumerate_trees(int min_n, int max_n) {
	if (min_n < 2 || max_n < min_n || max_n > 16)
		fail(Errc::parse_error, "vertex count range must sit inside [2, 16]");
	std::vector<WeightedTree> out;
	for (int n = min_n; n <= max_n; ++n) {
		std::set<std::string> seen;
		for (const std::vector<int>& level : rooted_level_sequences(n)) {
			WeightedTree tree = tree_from_levels(level);
			if (seen.insert(tree_certificate(tree)).second) out.push_back(std::move(tree));
		}
	}
	return out;
}

WeightedTree random_tree(std::mt19937_64& rng, int n) {
	if (n < 2 || n > 26) fail(Errc::parse_error, "random trees support 2 to 26 vertices");
	std::vector<std::string> names = letter_names(n);
	std::vector<WeightedTree::RawEdge> edges;
	if (n == 2) {
		edges.push_back({names[0], names[1], 1.0, 0});
		return WeightedTree::from_edges(edges);
	}
	std::uniform_int_distribution<int> pick(0, n - 1);
	std::vector<int> code(static_cast<std::size_t>(n - 2));
	for (int& c : code) c = pick(rng);

	std::vector<int> degree(static_cast<std::size_t>(n), 1);
	for (int c : code) ++degree[static_cast<std::size_t>(c)];
	std::set<int> leaves;
	for (int v = 0; v < n; ++v)
		if (degree[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
	int line = 0;
	for (int c : code) {
		int leaf = *leaves.begin();
		leaves.erase(leaves.begin());
		edges.push_back({names[static_cast<std::size_t>(leaf)], names[static_cast<std::size_t>(c)],
		                 1.0, line++});
		if (--degree[static_cast<std::size_t>(c)] == 1) leaves.insert(c);
	}
	int u = *leaves.begin();
	int v = *std::next(leaves.begin());
	edges.push_back({names[static_cast<std::size_t>(u)], names[static_cast<std::size_t>(v)], 1.0, line});
	return WeightedTree::from_edges(edges);
}

Metric random_metric(std::mt19937_64& rng, const WeightedTree& tree, double lo, double hi) {
	if (!(lo > 0.0) || !(hi >= lo)) fail(Errc::non_positive_weight, "weight range must be positive");
	std::uniform_real_distribution<double> logs(std::log(lo), std::log(hi));
	Metric m;
	m.w.resize(static_cast<std::size_t>(tree.edge_count()));
	for (double& w : m.w) w = std::exp(logs(rng));
	return m;
}

} // namespace treeflow
