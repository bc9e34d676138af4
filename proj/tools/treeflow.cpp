#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treeflow/analysis.hpp"
#include "treeflow/csvio.hpp"
#include "treeflow/curvature.hpp"
#include "treeflow/errors.hpp"
#include "treeflow/examples.hpp"
#include "treeflow/flow.hpp"
#include "treeflow/numerics.hpp"
#include "treeflow/transport.hpp"
#include "treeflow/verify.hpp"

namespace {

using namespace treeflow;

bool use_color() {
	static const bool on = std::getenv("TRF_NO_COLOR") == nullptr;
	return on;
}

std::string mark(bool ok) {
	if (!use_color()) return ok ? "[ ok ]" : "[FAIL]";
	return ok ? "\x1b[32m[ ok ]\x1b[0m" : "\x1b[31m[FAIL]\x1b[0m";
}

struct TreeSource {
	std::string path;
	std::string builtin;

	WeightedTree load() const {
		if (!builtin.empty()) return builtin_tree(builtin);
		return load_tree_file(path);
	}
};

void add_tree_flags(CLI::App* cmd, TreeSource& src) {
	auto* tree = cmd->add_option("--tree", src.path, "weighted edge list file (u v w per line)");
	auto* builtin = cmd->add_option("--builtin", src.builtin, "named example tree");
	tree->excludes(builtin);
	cmd->callback([&src, cmd] {
		if (src.path.empty() && src.builtin.empty())
			throw CLI::RequiredError(cmd->get_name() + " needs --tree or --builtin");
	});
}

struct SimulateFlags {
	std::string flow = "unnormalized";
	double t_end = 40.0;
	double record_every = 0.1;
	std::optional<double> dt;
	bool adaptive = false;
	double rel_tol = 1e-8;
	double abs_tol = 1e-12;
	std::string out = ".";
};

void add_flow_flags(CLI::App* cmd, SimulateFlags& f) {
	cmd->add_option("--flow", f.flow, "unnormalized or normalized")
	    ->check(CLI::IsMember({"unnormalized", "normalized"}));
	cmd->add_option("--t-end", f.t_end, "integration horizon")->check(CLI::PositiveNumber);
	cmd->add_option("--record-every", f.record_every, "sampling interval")
	    ->check(CLI::PositiveNumber);
	auto* dt = cmd->add_option("--dt", f.dt, "fixed step size (switches off step control)");
	auto* adaptive = cmd->add_flag("--adaptive", f.adaptive, "embedded 5(4) step control (default)");
	dt->excludes(adaptive);
	cmd->add_option("--rel-tol", f.rel_tol, "relative step-control tolerance");
	cmd->add_option("--abs-tol", f.abs_tol, "absolute step-control tolerance");
}

FlowSpec make_spec(const SimulateFlags& f) {
	FlowSpec spec;
	spec.variant = f.flow == "normalized" ? FlowVariant::normalized : FlowVariant::unnormalized;
	spec.t_end = f.t_end;
	spec.record_every = f.record_every;
	if (f.dt) {
		spec.integrator = FixedRk4{*f.dt};
	} else {
		AdaptiveDp54 ad;
		ad.rel_tol = f.rel_tol;
		ad.abs_tol = f.abs_tol;
		spec.integrator = ad;
	}
	return spec;
}

Metric starting_metric(const WeightedTree& tree, FlowVariant variant) {
	Metric m = initial_metric(tree);
	return variant == FlowVariant::normalized ? normalize(m) : m;
}

int cmd_curvature(const TreeSource& src) {
	WeightedTree tree = src.load();
	Metric m = initial_metric(tree);
	CurvatureVector curv = kappa_all(tree, m);

	std::printf("%-12s %-22s %-22s %-22s %s\n", "edge", "weight", "kappa", "kappa_a_to_b",
	            "kappa_b_to_a");
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		std::size_t i = static_cast<std::size_t>(e);
		std::printf("%-12s %-22s %-22s %-22s %s\n", tree.edge_label(e).c_str(),
		            format_double(m.w[i]).c_str(), format_double(curv.kappa[i]).c_str(),
		            format_double(curv.kappa_ab[i]).c_str(),
		            format_double(curv.kappa_ba[i]).c_str());
	}
	std::printf("\n%-12s %s\n", "vertex", "weighted_degree");
	for (VertexId v = 0; v < tree.vertex_count(); ++v)
		std::printf("%-12s %s\n", tree.vertex_name(v).c_str(),
		            format_double(curv.degree[static_cast<std::size_t>(v)]).c_str());

	StableSum total;
	for (double k : curv.kappa) total.add(k);
	std::printf("\nsum_kappa = %s\n", format_double(total.value()).c_str());
	return 0;
}

int cmd_simulate(const TreeSource& src, const SimulateFlags& f) {
	WeightedTree tree = src.load();
	FlowSpec spec = make_spec(f);
	Trajectory traj = integrate(tree, starting_metric(tree, spec.variant), spec);

	std::filesystem::create_directories(f.out);
	std::filesystem::path dir(f.out);
	write_trajectory_csv_file((dir / "trajectory.csv").string(), traj);
	write_monitors_csv_file((dir / "monitors.csv").string(), traj);

	std::printf("%s flow on %d edges: %zu samples to t = %s (%s)\n",
	            f.flow.c_str(), tree.edge_count(), traj.samples.size(),
	            format_double(traj.t_final).c_str(), termination_name(traj.termination));
	std::printf("steps: %d accepted, %d rejected\n", traj.accepted_steps, traj.rejected_steps);
	int floored = 0;
	for (char fl : traj.floored) floored += fl != 0;
	if (floored > 0) std::printf("%d edge(s) pinned at the weight floor\n", floored);
	std::printf("wrote %s and %s\n", (dir / "trajectory.csv").string().c_str(),
	            (dir / "monitors.csv").string().c_str());
	return 0;
}

int cmd_classify(const TreeSource& src) {
	WeightedTree tree = src.load();
	CaterpillarReport shape = caterpillar_classify(tree);
	std::vector<LimitPrediction> pred = predict_limits(tree);
	std::vector<EdgeKind> kinds = classify_edges(tree);

	std::printf("tree: %d vertices, %d edges\n", tree.vertex_count(), tree.edge_count());
	std::printf("caterpillar: %s\n", shape.is_caterpillar ? "yes" : "no");
	if (shape.is_caterpillar) {
		std::printf("spine:");
		for (VertexId v : shape.spine) std::printf(" %s", tree.vertex_name(v).c_str());
		std::printf("\n");
	} else {
		std::printf("witnesses (leaves deep behind another internal vertex):");
		for (VertexId v : shape.witnesses) std::printf(" %s", tree.vertex_name(v).c_str());
		std::printf("\n");
	}

	std::printf("\n%-12s %-10s %-24s %-12s %s\n", "edge", "kind", "limit_class", "limit", "reason");
	for (EdgeId e = 0; e < tree.edge_count(); ++e) {
		std::size_t i = static_cast<std::size_t>(e);
		const LimitPrediction& p = pred[i];
		std::string value = std::isnan(p.value) ? "?" : format_double(p.value);
		std::printf("%-12s %-10s %-24s %-12s %s\n", tree.edge_label(e).c_str(),
		            kinds[i] == EdgeKind::leaf ? "leaf" : "internal",
		            limit_class_name(p.cls), value.c_str(), p.why.c_str());
	}

	std::printf("\nexpected outcome: %s\n",
	            shape.is_caterpillar
	                ? "normalized weights settle and the surviving edges reach constant curvature 0"
	                : "no constant-curvature limit; some internal weight grows without bound");
	return 0;
}

int cmd_verify(std::uint64_t seed, int count) {
	VerifyOptions opt;
	opt.seed = seed;
	opt.trees = count;
	opt.flow_runs = std::max(2, count / 25);

	CheckReport report = run_self_checks(opt);
	for (const CheckItem& item : report.items) {
		std::printf("%s %s: worst %.3g (tolerance %.3g)\n", mark(item.passed).c_str(),
		            item.name.c_str(), item.measured, item.tolerance);
		if (!item.passed && !item.detail.empty()) std::printf("       %s\n", item.detail.c_str());
	}
	if (!report.passed) {
		std::printf("verification FAILED; reproduce with --seed %llu --count %d\n",
		            static_cast<unsigned long long>(seed), count);
		return 2;
	}
	std::printf("all %zu properties hold (seed %llu, %d random trees)\n", report.items.size(),
	            static_cast<unsigned long long>(seed), count);
	return 0;
}

void write_gnuplot_script(const std::filesystem::path& dir, const std::string& name,
                          const WeightedTree& tree) {
	std::ofstream gp(dir / (name + ".gp"));
	if (!gp) fail(Errc::io_error, "cannot write gnuplot script for " + name);
	const int ne = tree.edge_count();
	gp << "set terminal pngcairo size 1000,640\nset xlabel 't'\nset key outside\n";
	gp << "set output '" << name << "-weights.png'\nset ylabel 'edge weight'\nplot";
	for (EdgeId e = 0; e < ne; ++e)
		gp << (e ? ", \\\n     " : " ") << "'" << name << ".dat' using 1:" << (2 + e)
		   << " with lines title 'w " << tree.edge_label(e) << "'";
	gp << "\nset output '" << name << "-curvature.png'\nset ylabel 'curvature'\nplot";
	for (EdgeId e = 0; e < ne; ++e)
		gp << (e ? ", \\\n     " : " ") << "'" << name << ".dat' using 1:" << (2 + ne + e)
		   << " with lines title 'kappa " << tree.edge_label(e) << "'";
	gp << "\n";
}

int cmd_reproduce(const std::string& name, const std::string& out) {
	static const std::vector<std::string> known = {"simple", "t1", "t2", "t3"};
	if (std::find(known.begin(), known.end(), name) == known.end())
		fail(Errc::unknown_example, "reproduce knows simple, t1, t2, t3; got '" + name + "'");

	std::filesystem::create_directories(out);
	std::filesystem::path dir(out);

	FlowSpec spec;
	spec.variant = FlowVariant::unnormalized;
	spec.record_every = 0.1;

	if (name == "simple") {
		// Weight of the middle edge over time for three starting values of
		// that edge, everything else at 1.
		spec.t_end = 10.0;
		const char* variants[] = {"simple-light", "simple", "simple-heavy"};
		std::vector<Trajectory> runs;
		for (const char* v : variants)
			runs.push_back(integrate(builtin_tree(v), initial_metric(builtin_tree(v)), spec));

		Trajectory& base = runs[1];
		write_trajectory_csv_file((dir / "simple.csv").string(), base);
		write_plot_data_file((dir / "simple.dat").string(), base);
		write_gnuplot_script(dir, "simple", base.tree);

		EdgeId uv = base.tree.require_edge(base.tree.require_vertex("u"),
		                                   base.tree.require_vertex("v"));
		std::ofstream dat(dir / "simple-uv.dat");
		if (!dat) fail(Errc::io_error, "cannot write simple-uv.dat");
		dat << "# t w_uv(start 0.5) w_uv(start 1) w_uv(start 2)\n";
		std::size_t rows = runs[0].samples.size();
		for (auto& r : runs) rows = std::min(rows, r.samples.size());
		for (std::size_t i = 0; i < rows; ++i) {
			dat << format_double(runs[0].samples[i].t);
			for (auto& r : runs)
				dat << " " << format_double(r.samples[i].w[static_cast<std::size_t>(uv)]);
			dat << "\n";
		}
		std::ofstream gp(dir / "simple-uv.gp");
		gp << "set terminal pngcairo size 1000,640\nset xlabel 't'\n"
		   << "set ylabel 'weight of u-v'\nset output 'simple-uv.png'\n"
		   << "plot 'simple-uv.dat' using 1:2 with lines title 'start 0.5', \\\n"
		   << "     'simple-uv.dat' using 1:3 with lines title 'start 1', \\\n"
		   << "     'simple-uv.dat' using 1:4 with lines title 'start 2'\n";
		std::printf("wrote simple.csv, simple.dat, simple-uv.dat and gnuplot scripts in %s\n",
		            out.c_str());
		return 0;
	}

	// t3's published panels start from a lightened x3-x4 edge; unit weights
	// would skip the initial negative-curvature phase.
	std::string builtin = name == "t3" ? "t3-dip" : name;
	spec.t_end = 40.0;
	WeightedTree tree = builtin_tree(builtin);
	Trajectory traj = integrate(tree, initial_metric(tree), spec);
	write_trajectory_csv_file((dir / (name + ".csv")).string(), traj);
	write_plot_data_file((dir / (name + ".dat")).string(), traj);
	write_gnuplot_script(dir, name, tree);
	std::printf("wrote %s.csv, %s.dat, %s.gp in %s\n", name.c_str(), name.c_str(), name.c_str(),
	            out.c_str());
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Ricci flow on weighted trees: curvature, simulation, classification"};
	app.require_subcommand(1);

	TreeSource curv_src;
	CLI::App* curvature = app.add_subcommand("curvature", "per-edge curvature table");
	add_tree_flags(curvature, curv_src);

	TreeSource sim_src;
	SimulateFlags sim_flags;
	CLI::App* simulate = app.add_subcommand("simulate", "integrate the flow, write CSVs");
	add_tree_flags(simulate, sim_src);
	add_flow_flags(simulate, sim_flags);
	simulate->add_option("--out", sim_flags.out, "output directory");

	TreeSource cls_src;
	CLI::App* classify = app.add_subcommand("classify", "shape verdict and limit predictions");
	add_tree_flags(classify, cls_src);

	std::uint64_t seed = 1;
	int count = 200;
	CLI::App* verify = app.add_subcommand("verify", "randomized self-check battery");
	verify->add_option("--seed", seed, "random seed");
	verify->add_option("--count", count, "random trees to draw")->check(CLI::PositiveNumber);

	std::string repro_name;
	std::string repro_out = ".";
	CLI::App* reproduce = app.add_subcommand("reproduce", "emit plot data for a named example");
	reproduce->add_option("name", repro_name, "simple, t1, t2 or t3")->required();
	reproduce->add_option("--out", repro_out, "output directory");

	try {
		app.parse(argc, argv);
		if (*curvature) return cmd_curvature(curv_src);
		if (*simulate) return cmd_simulate(sim_src, sim_flags);
		if (*classify) return cmd_classify(cls_src);
		if (*verify) return cmd_verify(seed, count);
		if (*reproduce) return cmd_reproduce(repro_name, repro_out);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? 0 : 1;
	} catch (const treeflow::Error& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}
	return 0;
}
