#include "treeflow/examples.hpp"

#include <initializer_list>

#include "treeflow/errors.hpp"

namespace treeflow {

namespace {

struct Line {
	const char* u;
	const char* v;
	double w;
};

WeightedTree build(std::initializer_list<Line> lines) {
	std::vector<WeightedTree::RawEdge> edges;
	int n = 0;
	for (const Line& l : lines) edges.push_back({l.u, l.v, l.w, n++});
	return WeightedTree::from_edges(edges);
}

struct Builtin {
	const char* name;
	const char* summary;
	WeightedTree (*make)();
};

const Builtin kBuiltins[] = {
    {"k2", "single edge between two leaves",
     [] { return build({{"u", "v", 1.0}}); }},
    {"simple", "two leaves at each end of a middle edge",
     [] {
	     return build({{"x", "u", 1.0}, {"y", "u", 1.0}, {"u", "v", 1.0}, {"v", "z", 1.0}});
     }},
    {"simple-light", "same shape, middle edge at weight 1/2",
     [] {
	     return build({{"x", "u", 1.0}, {"y", "u", 1.0}, {"u", "v", 0.5}, {"v", "z", 1.0}});
     }},
    {"simple-heavy", "same shape, middle edge at weight 2",
     [] {
	     return build({{"x", "u", 1.0}, {"y", "u", 1.0}, {"u", "v", 2.0}, {"v", "z", 1.0}});
     }},
    {"path5", "path on five vertices",
     [] {
	     return build({{"x1", "x2", 1.0}, {"x2", "x3", 1.0}, {"x3", "x4", 1.0}, {"x4", "x5", 1.0}});
     }},
    {"t1", "caterpillar: spine x2-x3-x5 with four leaves",
     [] {
	     return build({{"x1", "x2", 1.0},
	                   {"u1", "x2", 1.0},
	                   {"x2", "x3", 1.0},
	                   {"x4", "x3", 1.0},
	                   {"x3", "x5", 1.0},
	                   {"u2", "x5", 1.0},
	                   {"u3", "x5", 1.0}});
     }},
    {"t2", "t1 with an extra leaf at x4; not a caterpillar",
     [] {
	     return build({{"x1", "x2", 1.0},
	                   {"u1", "x2", 1.0},
	                   {"x2", "x3", 1.0},
	                   {"x4", "x3", 1.0},
	                   {"x3", "x5", 1.0},
	                   {"u2", "x5", 1.0},
	                   {"u3", "x5", 1.0},
	                   {"u4", "x4", 1.0}});
     }},
    {"t3", "t1 with an extra leaf at x3; still a caterpillar",
     [] {
	     return build({{"x1", "x2", 1.0},
	                   {"u1", "x2", 1.0},
	                   {"x2", "x3", 1.0},
	                   {"x4", "x3", 1.0},
	                   {"x3", "x5", 1.0},
	                   {"u2", "x5", 1.0},
	                   {"u3", "x5", 1.0},
	                   {"x6", "x3", 1.0}});
     }},
    {"t3-dip", "t3 with the leaf edge x3-x4 lightened to 1/4",
     [] {
	     return build({{"x1", "x2", 1.0},
	                   {"u1", "x2", 1.0},
	                   {"x2", "x3", 1.0},
	                   {"x4", "x3", 0.25},
	                   {"x3", "x5", 1.0},
	                   {"u2", "x5", 1.0},
	                   {"u3", "x5", 1.0},
	                   {"x6", "x3", 1.0}});
     }},
};

} // namespace

const std::vector<std::string>& builtin_names() {
	static const std::vector<std::string> names = [] {
		std::vector<std::string> out;
		for (const Builtin& b : kBuiltins) out.push_back(b.name);
		return out;
	}();
	return names;
}

std::string builtin_summary(const std::string& name) {
	for (const Builtin& b : kBuiltins)
		if (name == b.name) return b.summary;
	fail(Errc::unknown_example, "no builtin tree named '" + name + "'");
}

WeightedTree builtin_tree(const std::string& name) {
	for (const Builtin& b : kBuiltins)
		if (name == b.name) return b.make();
	std::string all;
	for (const Builtin& b : kBuiltins) {
		if (!all.empty()) all += ", ";
		all += b.name;
	}
	fail(Errc::unknown_example, "no builtin tree named '" + name + "' (try: " + all + ")");
}

} // namespace treeflow
