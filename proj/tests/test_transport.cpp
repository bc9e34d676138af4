#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "support/lp_wasserstein.hpp"
#include "treeflow/curvature.hpp"
#include "treeflow/errors.hpp"
#include "treeflow/examples.hpp"
#include "treeflow/transport.hpp"
#include "treeflow/treegen.hpp"

using namespace treeflow;
using testsupport::lp_wasserstein;

namespace {

ProbabilityMeasure point_mass(const WeightedTree& tree, VertexId at) {
	ProbabilityMeasure mu;
	mu.mass.assign(static_cast<std::size_t>(tree.vertex_count()), 0.0);
	mu.mass[static_cast<std::size_t>(at)] = 1.0;
	return mu;
}

ProbabilityMeasure random_measure(std::mt19937_64& rng, int n) {
	std::uniform_real_distribution<double> u(0.0, 1.0);
	ProbabilityMeasure mu;
	mu.mass.resize(static_cast<std::size_t>(n));
	double total = 0.0;
	for (double& m : mu.mass) total += (m = u(rng));
	for (double& m : mu.mass) m /= total;
	return mu;
}

} // namespace

TEST_CASE("lazy walk measures") {
	WeightedTree t = builtin_tree("simple");
	GammaFunction gamma = GammaFunction::standard();
	VertexId u = t.require_vertex("u");

	ProbabilityMeasure delta = walk_measure(t, initial_metric(t), gamma, u, 1.0);
	CHECK(delta.mass[static_cast<std::size_t>(u)] == 1.0);

	ProbabilityMeasure half = walk_measure(t, initial_metric(t), gamma, u, 0.5);
	CHECK(half.mass[static_cast<std::size_t>(u)] == doctest::Approx(0.5));
	for (const char* n : {"x", "y", "v"})
		CHECK(half.mass[static_cast<std::size_t>(t.require_vertex(n))] ==
		      doctest::Approx(1.0 / 6).epsilon(1e-15));
	CHECK(half.mass[static_cast<std::size_t>(t.require_vertex("z"))] == 0.0);

	WeightedTree star = parse_tree("c a 1\nc b 1\nc d 1\n");
	ProbabilityMeasure spread =
	    walk_measure(star, initial_metric(star), gamma, star.require_vertex("c"), 0.0);
	for (const char* n : {"a", "b", "d"})
		CHECK(spread.mass[static_cast<std::size_t>(star.require_vertex(n))] ==
		      doctest::Approx(1.0 / 3).epsilon(1e-15));

	CHECK_THROWS_AS(walk_measure(t, initial_metric(t), gamma, u, 1.5), Error);
	CHECK_THROWS_AS(walk_measure(t, initial_metric(t), gamma, u, -0.1), Error);
}

TEST_CASE("measure validation") {
	WeightedTree t = builtin_tree("k2");
	ProbabilityMeasure bad;
	bad.mass = {0.5};
	CHECK_THROWS_AS(validate_measure(t, bad), Error);
	bad.mass = {0.7, 0.7};
	CHECK_THROWS_AS(validate_measure(t, bad), Error);
	bad.mass = {1.5, -0.5};
	CHECK_THROWS_AS(validate_measure(t, bad), Error);
}

TEST_CASE("transport distance basics") {
	WeightedTree t = builtin_tree("simple");
	Metric m = initial_metric(t);
	VertexId u = t.require_vertex("u"), v = t.require_vertex("v");
	VertexId x = t.require_vertex("x"), z = t.require_vertex("z");

	CHECK(wasserstein_tree(t, m, point_mass(t, u), point_mass(t, u)) == 0.0);
	CHECK(wasserstein_tree(t, m, point_mass(t, u), point_mass(t, v)) == doctest::Approx(1.0));
	CHECK(wasserstein_tree(t, m, point_mass(t, x), point_mass(t, z)) == doctest::Approx(3.0));
	CHECK(tree_distance(t, m, x, z) == doctest::Approx(3.0));
	CHECK(distances_from(t, m, u)[static_cast<std::size_t>(z)] == doctest::Approx(2.0));
}

TEST_CASE("edge-split transport distance equals the LP optimum") {
	std::mt19937_64 rng(101);
	int checked = 0;
	for (const WeightedTree& tree : enumerate_trees(2, 7)) {
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		for (int rep = 0; rep < 4; ++rep) {
			ProbabilityMeasure mu = random_measure(rng, tree.vertex_count());
			ProbabilityMeasure nu = random_measure(rng, tree.vertex_count());
			double fast = wasserstein_tree(tree, m, mu, nu);
			double lp = lp_wasserstein(tree, m, mu, nu);
			CHECK(std::abs(fast - lp) <= 1e-9);
			++checked;
		}
	}
	// 24 shapes on 2..7 vertices, four measure pairs each.
	CHECK(checked == 96);
}

TEST_CASE("optimal potential: closed-form values and duality") {
	WeightedTree t = builtin_tree("simple");
	Metric m = initial_metric(t);
	EdgeId uv = t.require_edge(t.require_vertex("u"), t.require_vertex("v"));
	PotentialFunction g = kantorovich_potential(t, m, uv);
	CHECK(g.value[static_cast<std::size_t>(t.require_vertex("x"))] == doctest::Approx(2.0));
	CHECK(g.value[static_cast<std::size_t>(t.require_vertex("y"))] == doctest::Approx(2.0));
	CHECK(g.value[static_cast<std::size_t>(t.require_vertex("u"))] == doctest::Approx(1.0));
	CHECK(g.value[static_cast<std::size_t>(t.require_vertex("v"))] == doctest::Approx(0.0));
	CHECK(g.value[static_cast<std::size_t>(t.require_vertex("z"))] == doctest::Approx(-1.0));

	WeightedTree k2 = builtin_tree("k2");
	Metric mk{{1.75}, false};
	PotentialFunction gk = kantorovich_potential(k2, mk, 0);
	CHECK(gk.value[static_cast<std::size_t>(k2.edge(0).a)] == doctest::Approx(1.75));
	CHECK(gk.value[static_cast<std::size_t>(k2.edge(0).b)] == doctest::Approx(0.0));
}

TEST_CASE("dual value attains the transport distance across random instances") {
	std::mt19937_64 rng(103);
	std::uniform_real_distribution<double> lazy(0.5, 1.0);
	GammaFunction gamma = GammaFunction::standard();
	for (int i = 0; i < 150; ++i) {
		WeightedTree tree = random_tree(rng, 2 + i % 11);
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		std::uniform_int_distribution<EdgeId> pick(0, tree.edge_count() - 1);
		EdgeId e = pick(rng);
		double alpha = lazy(rng);

		const Edge& ed = tree.edge(e);
		ProbabilityMeasure mu = walk_measure(tree, m, gamma, ed.a, alpha);
		ProbabilityMeasure nu = walk_measure(tree, m, gamma, ed.b, alpha);
		double w1 = wasserstein_tree(tree, m, mu, nu);
		PotentialFunction g = kantorovich_potential(tree, m, e);
		CHECK(std::abs(dual_value(tree, g, mu, nu) - w1) <= 1e-10);

		// 1-Lipschitz where the measures actually live.
		std::set<VertexId> support;
		for (VertexId v = 0; v < tree.vertex_count(); ++v)
			if (mu.mass[static_cast<std::size_t>(v)] > 0.0 ||
			    nu.mass[static_cast<std::size_t>(v)] > 0.0)
				support.insert(v);
		for (VertexId a : support) {
			std::vector<double> dist = distances_from(tree, m, a);
			for (VertexId b : support)
				CHECK(std::abs(g.value[static_cast<std::size_t>(a)] -
				               g.value[static_cast<std::size_t>(b)]) <=
				      dist[static_cast<std::size_t>(b)] + 1e-12);
		}
	}
}

TEST_CASE("metric axioms on random measures") {
	std::mt19937_64 rng(107);
	for (int i = 0; i < 60; ++i) {
		WeightedTree tree = random_tree(rng, 3 + i % 8);
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		ProbabilityMeasure a = random_measure(rng, tree.vertex_count());
		ProbabilityMeasure b = random_measure(rng, tree.vertex_count());
		ProbabilityMeasure c = random_measure(rng, tree.vertex_count());
		double ab = wasserstein_tree(tree, m, a, b);
		CHECK(ab >= 0.0);
		CHECK(std::abs(ab - wasserstein_tree(tree, m, b, a)) <= 1e-10);
		CHECK(wasserstein_tree(tree, m, a, a) <= 1e-10);
		CHECK(ab <= wasserstein_tree(tree, m, a, c) + wasserstein_tree(tree, m, c, b) + 1e-10);
	}
}

TEST_CASE("coarse curvature at fixed laziness") {
	WeightedTree t = builtin_tree("simple");
	Metric m = initial_metric(t);
	GammaFunction gamma = GammaFunction::standard();
	EdgeId uv = t.require_edge(t.require_vertex("u"), t.require_vertex("v"));
	EdgeId vz = t.require_edge(t.require_vertex("v"), t.require_vertex("z"));

	CHECK(alpha_curvature(t, m, gamma, uv, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
	CHECK(alpha_curvature(t, m, gamma, vz, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
	CHECK(alpha_curvature(t, m, gamma, uv, 0.9) == doctest::Approx(-1.0 / 30).epsilon(1e-12));
}

TEST_CASE("transport-limit oracle equals the closed form") {
	WeightedTree t = builtin_tree("simple");
	Metric m = initial_metric(t);
	GammaFunction gamma = GammaFunction::standard();
	EdgeId uv = t.require_edge(t.require_vertex("u"), t.require_vertex("v"));
	EdgeId vz = t.require_edge(t.require_vertex("v"), t.require_vertex("z"));
	CHECK(lly_oracle(t, m, gamma, vz) == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(lly_oracle(t, m, gamma, uv) == doctest::Approx(-1.0 / 3).epsilon(1e-12));

	std::mt19937_64 rng(109);
	for (int i = 0; i < 120; ++i) {
		WeightedTree tree = random_tree(rng, 2 + i % 11);
		Metric rm = random_metric(rng, tree, 0.1, 10.0);
		for (EdgeId e = 0; e < tree.edge_count(); ++e)
			CHECK(std::abs(lly_oracle(tree, rm, gamma, e) - kappa_edge(tree, rm, e)) <= 1e-9);
	}
}
