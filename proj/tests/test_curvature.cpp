#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "treeflow/curvature.hpp"
#include "treeflow/errors.hpp"
#include "treeflow/examples.hpp"
#include "treeflow/flow.hpp"
#include "treeflow/numerics.hpp"
#include "treeflow/transport.hpp"
#include "treeflow/treegen.hpp"

using namespace treeflow;

TEST_CASE("compensated summation and slope fitting") {
	StableSum s;
	s.add(1.0);
	s.add(1e100);
	s.add(1.0);
	s.add(-1e100);
	CHECK(s.value() == 2.0);

	std::vector<double> t{0.0, 1.0, 2.0, 3.0}, y;
	for (double x : t) y.push_back(3.0 - 2.0 * x);
	CHECK(fit_slope(t, y) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("shortest round-trip double formatting") {
	CHECK(format_double(0.1) == "0.1");
	CHECK(format_double(2.0) == "2");
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> u(-1e6, 1e6);
	for (int i = 0; i < 200; ++i) {
		double x = std::ldexp(u(rng), i % 40 - 20);
		double back = 0.0;
		CHECK(parse_double(format_double(x), back));
		CHECK(back == x);
	}
	double sink = 0.0;
	CHECK(!parse_double("1.5x", sink));
	CHECK(!parse_double("", sink));
}

TEST_CASE("curvature of the four-leaf example tree, unit weights") {
	WeightedTree t = builtin_tree("simple");
	Metric m = initial_metric(t);
	CurvatureVector curv = kappa_all(t, m);

	// Canonical edge order: u-v, u-x, u-y, v-z.
	REQUIRE(t.edge_label(0) == "u-v");
	CHECK(curv.kappa[0] == doctest::Approx(-1.0 / 3).epsilon(1e-15));
	CHECK(curv.kappa[1] == doctest::Approx(2.0 / 3).epsilon(1e-15));
	CHECK(curv.kappa[2] == doctest::Approx(2.0 / 3).epsilon(1e-15));
	CHECK(curv.kappa[3] == doctest::Approx(1.0).epsilon(1e-15));

	CHECK(curv.degree[static_cast<std::size_t>(t.require_vertex("u"))] == doctest::Approx(3.0));
	CHECK(curv.degree[static_cast<std::size_t>(t.require_vertex("v"))] == doctest::Approx(2.0));
	CHECK(curv.degree[static_cast<std::size_t>(t.require_vertex("x"))] == doctest::Approx(1.0));

	// Leaf side of a leaf edge contributes exactly 1.
	EdgeId vz = t.require_edge(t.require_vertex("v"), t.require_vertex("z"));
	CHECK(kappa_directional(t, m, vz, t.require_vertex("z")) == 1.0);
	CHECK(kappa_directional(t, m, vz, t.require_vertex("v")) == 0.0);

	CHECK(gauss_bonnet_residual(curv) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("lone edge carries curvature 2 regardless of weight and gamma") {
	WeightedTree k2 = builtin_tree("k2");
	for (double w : {0.25, 1.0, 7.5}) {
		Metric m{{w}, false};
		CHECK(kappa_edge(k2, m, 0) == doctest::Approx(2.0).epsilon(1e-15));
		CHECK(kappa_general(k2, m, GammaFunction::power(1.0, -2.0), 0) ==
		      doctest::Approx(2.0).epsilon(1e-14));
	}
}

TEST_CASE("three-spoke star splits total curvature evenly") {
	WeightedTree star = parse_tree("c a 1\nc b 1\nc d 1\n");
	Metric m = initial_metric(star);
	for (EdgeId e = 0; e < 3; ++e)
		CHECK(kappa_edge(star, m, e) == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("initial curvatures of the appendix trees, unit weights") {
	WeightedTree t2 = builtin_tree("t2");
	Metric m = initial_metric(t2);
	auto k = [&](const char* a, const char* b) {
		return kappa_edge(t2, m, t2.require_edge(t2.require_vertex(a), t2.require_vertex(b)));
	};
	CHECK(k("x2", "x3") == doctest::Approx(-2.0 / 3).epsilon(1e-14));
	CHECK(k("x3", "x4") == doctest::Approx(-1.0 / 3).epsilon(1e-14));
	CHECK(k("x3", "x5") == doctest::Approx(-2.0 / 3).epsilon(1e-14));
	CHECK(k("u4", "x4") == doctest::Approx(1.0).epsilon(1e-14));
	CHECK(k("x1", "x2") == doctest::Approx(2.0 / 3).epsilon(1e-14));
}

TEST_CASE("total curvature is 2 on every tree") {
	std::mt19937_64 rng(11);
	for (int i = 0; i < 200; ++i) {
		WeightedTree tree = random_tree(rng, 2 + i % 11);
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		CHECK(std::abs(gauss_bonnet_residual(kappa_all(tree, m))) <= 1e-12);
	}
}

TEST_CASE("curvature honors its bounds on the exhaustive small corpus") {
	std::mt19937_64 rng(13);
	for (const WeightedTree& tree : enumerate_trees(2, 7)) {
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		CurvatureVector curv = kappa_all(tree, m);
		for (EdgeId e = 0; e < tree.edge_count(); ++e) {
			const Edge& ed = tree.edge(e);
			int da = tree.degree(ed.a), db = tree.degree(ed.b);
			double k = curv.kappa[static_cast<std::size_t>(e)];
			if (da + db >= 3) CHECK(k <= 1.0 + 1e-12);
			CHECK(k >= 4.0 - da - db - 1e-12);
			CHECK(curv.kappa_ab[static_cast<std::size_t>(e)] +
			          curv.kappa_ba[static_cast<std::size_t>(e)] ==
			      k);
		}
	}
}

TEST_CASE("scaling every weight by a power of two leaves curvature bitwise unchanged") {
	std::mt19937_64 rng(17);
	WeightedTree tree = random_tree(rng, 9);
	Metric m = random_metric(rng, tree, 0.1, 10.0);
	Metric scaled = m;
	for (double& w : scaled.w) w *= 8.0;
	CurvatureVector a = kappa_all(tree, m);
	CurvatureVector b = kappa_all(tree, scaled);
	for (std::size_t e = 0; e < a.kappa.size(); ++e) CHECK(a.kappa[e] == b.kappa[e]);
}

TEST_CASE("edge-weighted curvature sum via the vertex identity") {
	WeightedTree p3 = parse_tree("a b 1\nb c 1\n");
	CHECK(kappa_weight_sum(p3, initial_metric(p3)) == doctest::Approx(2.0).epsilon(1e-15));

	std::mt19937_64 rng(19);
	for (int i = 0; i < 100; ++i) {
		WeightedTree tree = random_tree(rng, 3 + i % 9);
		Metric m = random_metric(rng, tree, 0.1, 10.0);
		CurvatureVector curv = kappa_all(tree, m);
		StableSum dot;
		for (std::size_t e = 0; e < m.w.size(); ++e) dot.add(curv.kappa[e] * m.w[e]);
		CHECK(kappa_weight_sum(tree, m) == doctest::Approx(dot.value()).epsilon(1e-12));
	}
}

TEST_CASE("general gamma matches the transport definition") {
	// gamma = x^-2 changes the walk, so agreement here exercises the whole
	// general-form expression, not just the 1/x specialization.
	GammaFunction gamma = GammaFunction::power(1.0, -2.0);
	WeightedTree t2 = builtin_tree("t2");
	std::mt19937_64 rng(23);
	Metric m = random_metric(rng, t2, 0.5, 2.0);
	for (EdgeId e = 0; e < t2.edge_count(); ++e)
		CHECK(kappa_general(t2, m, gamma, e) ==
		      doctest::Approx(lly_oracle(t2, m, gamma, e)).epsilon(1e-9));

	// Rescaling gamma by a constant cancels out entirely.
	Metric unit = initial_metric(t2);
	for (EdgeId e = 0; e < t2.edge_count(); ++e)
		CHECK(kappa_general(t2, unit, GammaFunction::power(5.0, -1.0), e) ==
		      doctest::Approx(kappa_edge(t2, unit, e)).epsilon(1e-13));
}

TEST_CASE("gamma validation") {
	CHECK_THROWS_AS(GammaFunction::power(0.0, -1.0), Error);
	CHECK_THROWS_AS(GammaFunction::power(-2.0, -1.0), Error);
	CHECK_THROWS_AS(GammaFunction::power(1.0, 0.0), Error);
	CHECK(GammaFunction::standard()(0.5) == 2.0);
	CHECK(GammaFunction::power(1.0, -2.0)(0.5) == doctest::Approx(4.0));
}

TEST_CASE("metric validation") {
	WeightedTree p3 = parse_tree("a b 1\nb c 1\n");
	CHECK_THROWS_AS(validate_metric(p3, Metric{{1.0}, false}), Error);
	CHECK_THROWS_AS(validate_metric(p3, Metric{{1.0, 0.0}, false}), Error);
	CHECK_THROWS_AS(validate_metric(p3, Metric{{1.0, -1.0}, false}), Error);
	Metric claims_normalized{{0.9, 0.9}, true};
	CHECK_THROWS_AS(validate_metric(p3, claims_normalized), Error);
	CHECK(total_weight(normalize(Metric{{3.0, 1.0}, false})) == doctest::Approx(1.0));
}

TEST_CASE("curvature time derivative matches central differences along the flow") {
	// A stationary case first: on a lone edge curvature is constant, and on
	// the 3-path the two leaf curvatures stay pinned at 1.
	WeightedTree k2 = builtin_tree("k2");
	CHECK(kappa_derivative(k2, Metric{{0.7}, false})[0] == doctest::Approx(0.0).epsilon(1e-14));
	WeightedTree p3 = parse_tree("a b 1\nb c 1\n");
	for (double d : kappa_derivative(p3, initial_metric(p3)))
		CHECK(d == doctest::Approx(0.0).epsilon(1e-14));

	std::mt19937_64 rng(29);
	for (int i = 0; i < 40; ++i) {
		WeightedTree tree = random_tree(rng, 3 + i % 8);
		Metric m = random_metric(rng, tree, 0.3, 3.0);
		std::vector<double> wdot = rhs_unnormalized(tree, m.w);
		const double h = 1e-6;
		Metric plus = m, minus = m;
		for (std::size_t e = 0; e < m.w.size(); ++e) {
			plus.w[e] += h * wdot[e];
			minus.w[e] -= h * wdot[e];
		}
		CurvatureVector kp = kappa_all(tree, plus);
		CurvatureVector km = kappa_all(tree, minus);
		std::vector<double> exact = kappa_derivative(tree, m);
		for (std::size_t e = 0; e < m.w.size(); ++e) {
			double fd = (kp.kappa[e] - km.kappa[e]) / (2.0 * h);
			CHECK_MESSAGE(std::abs(fd - exact[e]) <= 1e-6, "edge ", tree.edge_label(static_cast<EdgeId>(e)));
		}
	}

	// The middle edge of the example tree starts negative and relaxes toward
	// zero, so its curvature must be rising at t = 0.
	WeightedTree simple = builtin_tree("simple");
	std::vector<double> d0 = kappa_derivative(simple, initial_metric(simple));
	CHECK(d0[0] > 0.0); // edge u-v
}
