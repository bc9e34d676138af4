#include "treeflow/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

namespace {

std::string line_tag(int line) {
	return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

/// Union-find over vertex ids, used for cycle and connectivity checks.
class DisjointSet {
public:
	explicit DisjointSet(std::size_t n) : parent_(n) {
		std::iota(parent_.begin(), parent_.end(), VertexId{0});
	}

	VertexId find(VertexId x) {
		while (parent_[static_cast<std::size_t>(x)] != x) {
			parent_[static_cast<std::size_t>(x)] =
			    parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
			x = parent_[static_cast<std::size_t>(x)];
		}
		return x;
	}

	/// Returns false if x and y were already connected.
	bool unite(VertexId x, VertexId y) {
		VertexId rx = find(x), ry = find(y);
		if (rx == ry) return false;
		parent_[static_cast<std::size_t>(rx)] = ry;
		return true;
	}

private:
	std::vector<VertexId> parent_;
};

} // namespace

WeightedTree WeightedTree::from_edges(const std::vector<RawEdge>& raw) {
	if (raw.empty()) fail(Errc::parse_error, "no edges; a tree needs at least one");

	WeightedTree t;

	std::set<std::string> name_set;
	for (const RawEdge& r : raw) {
		if (r.u == r.v)
			fail(Errc::self_loop, line_tag(r.line) + "edge joins '" + r.u + "' to itself");
		name_set.insert(r.u);
		name_set.insert(r.v);
	}
	t.names_.assign(name_set.begin(), name_set.end());

	std::map<std::string_view, VertexId> index;
	for (std::size_t i = 0; i < t.names_.size(); ++i)
		index.emplace(t.names_[i], static_cast<VertexId>(i));

	DisjointSet components(t.names_.size());
	std::set<std::pair<VertexId, VertexId>> seen;
	std::vector<Edge> edges;
	edges.reserve(raw.size());
	for (const RawEdge& r : raw) {
		VertexId u = index.at(r.u);
		VertexId v = index.at(r.v);
		if (u > v) std::swap(u, v);
		if (!seen.insert({u, v}).second)
			fail(Errc::duplicate_edge,
			     line_tag(r.line) + "edge " + t.names_[static_cast<std::size_t>(u)] + "-" +
			         t.names_[static_cast<std::size_t>(v)] + " appears twice");
		if (!std::isfinite(r.weight))
			fail(Errc::parse_error, line_tag(r.line) + "weight is not a finite number");
		if (r.weight <= 0.0)
			fail(Errc::non_positive_weight,
			     line_tag(r.line) + "weight " + format_double(r.weight) + " must be positive");
		if (!components.unite(u, v))
			fail(Errc::cycle, line_tag(r.line) + "edge " + t.names_[static_cast<std::size_t>(u)] +
			                      "-" + t.names_[static_cast<std::size_t>(v)] + " closes a cycle");
		edges.push_back(Edge{u, v, r.weight});
	}

	VertexId root = components.find(0);
	for (VertexId v = 1; v < static_cast<VertexId>(t.names_.size()); ++v) {
		if (components.find(v) != root)
			fail(Errc::disconnected, "vertex '" + t.names_[static_cast<std::size_t>(v)] +
			                             "' is not connected to '" + t.names_[0] + "'");
	}

	std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
		return std::pair(x.a, x.b) < std::pair(y.a, y.b);
	});
	t.edges_ = std::move(edges);

	t.adjacency_.resize(t.names_.size());
	for (std::size_t e = 0; e < t.edges_.size(); ++e) {
		const Edge& ed = t.edges_[e];
		t.adjacency_[static_cast<std::size_t>(ed.a)].push_back(
		    Neighbor{ed.b, static_cast<EdgeId>(e)});
		t.adjacency_[static_cast<std::size_t>(ed.b)].push_back(
		    Neighbor{ed.a, static_cast<EdgeId>(e)});
	}
	for (auto& nbrs : t.adjacency_)
		std::sort(nbrs.begin(), nbrs.end(),
		          [](const Neighbor& x, const Neighbor& y) { return x.vertex < y.vertex; });

	return t;
}

std::optional<VertexId> WeightedTree::vertex_id(std::string_view name) const {
	auto it = std::lower_bound(names_.begin(), names_.end(), name);
	if (it == names_.end() || *it != name) return std::nullopt;
	return static_cast<VertexId>(it - names_.begin());
}

VertexId WeightedTree::require_vertex(std::string_view name) const {
	auto id = vertex_id(name);
	if (!id) fail(Errc::unknown_vertex, "no vertex named '" + std::string(name) + "'");
	return *id;
}

std::optional<EdgeId> WeightedTree::edge_between(VertexId u, VertexId v) const {
	if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return std::nullopt;
	for (const Neighbor& n : neighbors(u))
		if (n.vertex == v) return n.edge;
	return std::nullopt;
}

EdgeId WeightedTree::require_edge(VertexId u, VertexId v) const {
	auto e = edge_between(u, v);
	if (!e)
		fail(Errc::unknown_edge, "no edge between '" + vertex_name(u) + "' and '" +
		                             vertex_name(v) + "'");
	return *e;
}

std::string WeightedTree::edge_label(EdgeId e) const {
	const Edge& ed = edge(e);
	return vertex_name(ed.a) + "-" + vertex_name(ed.b);
}

VertexId WeightedTree::opposite(EdgeId e, VertexId u) const {
	const Edge& ed = edge(e);
	if (ed.a == u) return ed.b;
	if (ed.b == u) return ed.a;
	fail(Errc::not_endpoint,
	     "vertex '" + vertex_name(u) + "' is not an endpoint of " + edge_label(e));
}

VertexProfile vertex_profile(const WeightedTree& tree, VertexId v) {
	if (v < 0 || v >= tree.vertex_count()) fail(Errc::unknown_vertex, "vertex id out of range");
	VertexProfile p;
	p.degree = tree.degree(v);
	for (const Neighbor& n : tree.neighbors(v)) {
		if (tree.is_leaf(n.vertex))
			++p.leaf_degree;
		else
			++p.internal_degree;
	}
	return p;
}

std::vector<EdgeKind> classify_edges(const WeightedTree& tree) {
	std::vector<EdgeKind> kinds;
	kinds.reserve(static_cast<std::size_t>(tree.edge_count()));
	for (const Edge& e : tree.edges())
		kinds.push_back(tree.degree(e.a) >= 2 && tree.degree(e.b) >= 2 ? EdgeKind::internal
		                                                               : EdgeKind::leaf);
	return kinds;
}

namespace {

/// Hop distances from src, staying inside the component reached without
/// stepping onto `banned` (pass -1 to allow the whole tree).
std::vector<int> hop_distances(const WeightedTree& tree, VertexId src, VertexId banned) {
	std::vector<int> dist(static_cast<std::size_t>(tree.vertex_count()), -1);
	std::vector<VertexId> queue{src};
	dist[static_cast<std::size_t>(src)] = 0;
	for (std::size_t head = 0; head < queue.size(); ++head) {
		VertexId v = queue[head];
		for (const Neighbor& n : tree.neighbors(v)) {
			if (n.vertex == banned) continue;
			if (dist[static_cast<std::size_t>(n.vertex)] >= 0) continue;
			dist[static_cast<std::size_t>(n.vertex)] = dist[static_cast<std::size_t>(v)] + 1;
			queue.push_back(n.vertex);
		}
	}
	return dist;
}

int spine_leaf_count(const WeightedTree& tree, VertexId v, const std::vector<char>& on_spine) {
	int count = 0;
	for (const Neighbor& n : tree.neighbors(v))
		if (tree.is_leaf(n.vertex) && !on_spine[static_cast<std::size_t>(n.vertex)]) ++count;
	return count;
}

} // namespace

CaterpillarReport caterpillar_classify(const WeightedTree& tree) {
	CaterpillarReport report;
	const int n = tree.vertex_count();

	std::vector<VertexId> internal;
	for (VertexId v = 0; v < n; ++v)
		if (!tree.is_leaf(v)) internal.push_back(v);

	// Internal vertices always induce a subtree; it is a path exactly when no
	// internal vertex touches three or more other internal vertices.
	VertexId hub = -1;
	for (VertexId v : internal) {
		if (vertex_profile(tree, v).internal_degree >= 3) {
			hub = v;
			break;
		}
	}

	if (hub >= 0) {
		report.is_caterpillar = false;
		// One deepest leaf per internal branch of the hub; the vertex just
		// before such a leaf cannot touch a second internal edge, so all of
		// its other neighbors are leaves.
		std::set<VertexId> witnesses;
		for (const Neighbor& nb : tree.neighbors(hub)) {
			if (tree.is_leaf(nb.vertex)) continue;
			std::vector<int> dist = hop_distances(tree, nb.vertex, hub);
			VertexId deepest = -1;
			int best = -1;
			for (VertexId v = 0; v < n; ++v) {
				if (dist[static_cast<std::size_t>(v)] < 0 || !tree.is_leaf(v)) continue;
				if (dist[static_cast<std::size_t>(v)] > best) {
					best = dist[static_cast<std::size_t>(v)];
					deepest = v;
				}
			}
			VertexId before = tree.neighbors(deepest).front().vertex;
			VertexProfile p = vertex_profile(tree, before);
			if (p.leaf_degree != p.degree - 1)
				fail(Errc::parse_error, "internal error: branch witness is not leaf-saturated");
			witnesses.insert(before);
		}
		report.witnesses.assign(witnesses.begin(), witnesses.end());
		return report;
	}

	report.is_caterpillar = true;

	if (internal.empty()) {
		// Single edge: the spine is that edge.
		report.spine = {tree.edge(0).a, tree.edge(0).b};
	} else if (internal.size() == 1) {
		// Star: center plus its smallest leaf keeps every spine two-ended.
		VertexId center = internal.front();
		report.spine = {center, tree.neighbors(center).front().vertex};
	} else {
		// Walk the internal path from its smaller end.
		std::vector<VertexId> ends;
		for (VertexId v : internal)
			if (vertex_profile(tree, v).internal_degree == 1) ends.push_back(v);
		VertexId cur = ends.front();
		VertexId prev = -1;
		while (true) {
			report.spine.push_back(cur);
			VertexId next = -1;
			for (const Neighbor& nb : tree.neighbors(cur)) {
				if (nb.vertex == prev || tree.is_leaf(nb.vertex)) continue;
				next = nb.vertex;
				break;
			}
			if (next < 0) break;
			prev = cur;
			cur = next;
		}
	}

	std::vector<char> on_spine(static_cast<std::size_t>(n), 0);
	for (VertexId v : report.spine) on_spine[static_cast<std::size_t>(v)] = 1;
	for (VertexId v : report.spine)
		report.spine_leaf_counts.push_back(spine_leaf_count(tree, v, on_spine));
	return report;
}

std::pair<std::vector<VertexId>, std::vector<VertexId>> split_at_edge(const WeightedTree& tree,
                                                                      EdgeId e) {
	if (e < 0 || e >= tree.edge_count()) fail(Errc::unknown_edge, "edge id out of range");
	const Edge& ed = tree.edge(e);
	std::vector<int> da = hop_distances(tree, ed.a, ed.b);
	std::vector<VertexId> side_a, side_b;
	for (VertexId v = 0; v < tree.vertex_count(); ++v) {
		if (da[static_cast<std::size_t>(v)] >= 0)
			side_a.push_back(v);
		else
			side_b.push_back(v);
	}
	return {std::move(side_a), std::move(side_b)};
}

WeightedTree parse_tree(std::string_view text) {
	std::vector<WeightedTree::RawEdge> raw;
	int line_no = 0;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		std::size_t eol = text.find('\n', pos);
		std::string_view line =
		    text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
		++line_no;
		pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

		if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
			line = line.substr(0, hash);

		std::vector<std::string_view> tokens;
		std::size_t i = 0;
		while (i < line.size()) {
			while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
			std::size_t start = i;
			while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
			if (i > start) tokens.push_back(line.substr(start, i - start));
		}
		if (tokens.empty()) continue;
		if (tokens.size() != 3)
			fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected '<u> <v> <weight>', got " +
			                            std::to_string(tokens.size()) + " tokens");
		double w = 0.0;
		if (!parse_double(tokens[2], w))
			fail(Errc::parse_error, "line " + std::to_string(line_no) + ": cannot parse weight '" +
			                            std::string(tokens[2]) + "'");
		raw.push_back(WeightedTree::RawEdge{std::string(tokens[0]), std::string(tokens[1]), w,
		                                    line_no});
	}
	return WeightedTree::from_edges(raw);
}

WeightedTree load_tree_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_tree(buf.str());
}

} // namespace treeflow
