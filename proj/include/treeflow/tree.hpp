#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treeflow {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
	VertexId a = -1; ///< endpoint with the lexicographically smaller name
	VertexId b = -1;
	double weight = 0.0; ///< initial weight, strictly positive
};

struct Neighbor {
	VertexId vertex;
	EdgeId edge;
};

/// Finite weighted tree with string-named vertices.
///
/// Vertex ids follow byte-lexicographic name order and edge ids follow
/// (smaller endpoint name, larger endpoint name) order, so the same set of
/// input lines always yields the same ids, labels, and column layouts no
/// matter how the lines were ordered.
class WeightedTree {
public:
	/// Input line of the builder: (vertex name, vertex name, weight).
	struct RawEdge {
		std::string u;
		std::string v;
		double weight;
		int line = 0; ///< 1-based source line for error reports, 0 if synthetic
	};

	static WeightedTree from_edges(const std::vector<RawEdge>& raw);

	int vertex_count() const { return static_cast<int>(names_.size()); }
	int edge_count() const { return static_cast<int>(edges_.size()); }

	const std::string& vertex_name(VertexId v) const { return names_[static_cast<std::size_t>(v)]; }
	std::optional<VertexId> vertex_id(std::string_view name) const;
	VertexId require_vertex(std::string_view name) const;

	const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
	const std::vector<Edge>& edges() const { return edges_; }
	std::optional<EdgeId> edge_between(VertexId u, VertexId v) const;
	EdgeId require_edge(VertexId u, VertexId v) const;

	/// "<a>-<b>" with a the smaller endpoint name; used for CSV columns.
	std::string edge_label(EdgeId e) const;

	const std::vector<Neighbor>& neighbors(VertexId v) const {
		return adjacency_[static_cast<std::size_t>(v)];
	}
	int degree(VertexId v) const { return static_cast<int>(neighbors(v).size()); }
	bool is_leaf(VertexId v) const { return degree(v) == 1; }

	/// Endpoint of e opposite to u; throws not_endpoint if u is not on e.
	VertexId opposite(EdgeId e, VertexId u) const;

private:
	std::vector<std::string> names_;
	std::vector<Edge> edges_;
	std::vector<std::vector<Neighbor>> adjacency_;
};

/// Degree census of one vertex: d, leaf part d', internal part d''.
struct VertexProfile {
	int degree = 0;
	int leaf_degree = 0;     ///< neighbors that are leaves
	int internal_degree = 0; ///< neighbors of degree >= 2
};

VertexProfile vertex_profile(const WeightedTree& tree, VertexId v);

enum class EdgeKind { leaf, internal };

/// Per-edge tags in edge-id order; an edge is internal iff both endpoints
/// have degree >= 2.
std::vector<EdgeKind> classify_edges(const WeightedTree& tree);

/// Outcome of the spine search. For caterpillars the spine lists the
/// internal vertices in path order; the two degenerate shapes keep the
/// convention total: a single edge reports both endpoints, a star reports
/// (center, smallest leaf). Leaf counts exclude spine members, so interior
/// spine vertices carry exactly d-2 leaves and endpoints exactly d-1.
struct CaterpillarReport {
	bool is_caterpillar = false;
	std::vector<VertexId> spine;
	std::vector<int> spine_leaf_counts;
	/// For non-caterpillars: internal vertices v with d'_v = d_v - 1, found
	/// by walking to a deepest leaf inside each internal branch of a vertex
	/// with three or more internal edges. Always at least three entries.
	std::vector<VertexId> witnesses;
};

CaterpillarReport caterpillar_classify(const WeightedTree& tree);

/// Vertex sets of the two components of T - e; the side containing edge(e).a
/// comes first, both sorted ascending.
std::pair<std::vector<VertexId>, std::vector<VertexId>> split_at_edge(const WeightedTree& tree,
                                                                      EdgeId e);

/// Parses the plain-text edge-list format: one "<u> <v> <weight>" per line,
/// '#' starts a comment, blank lines are skipped. Errors name the offending
/// 1-based line.
WeightedTree parse_tree(std::string_view text);

WeightedTree load_tree_file(const std::string& path);

} // namespace treeflow
