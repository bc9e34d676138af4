#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "treeflow/csvio.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
	int exit_code = -1;
	std::string out;
	std::string err;
};

std::string slurp(const fs::path& path) {
	std::ifstream in(path, std::ios::binary);
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

/// Runs the installed binary through the shell, capturing streams and the
/// real exit code. `env` is a prefix like "TRF_NO_COLOR=1".
CommandResult run_cli(const std::string& args, const std::string& env = "TRF_NO_COLOR=1") {
	fs::create_directories("cli_scratch");
	const std::string out_path = "cli_scratch/stdout.txt";
	const std::string err_path = "cli_scratch/stderr.txt";
	std::string cmd = env + " \"" + TREEFLOW_BIN + "\" " + args + " > " + out_path + " 2> " +
	                  err_path;
	int status = std::system(cmd.c_str());
	CommandResult res;
	if (status != -1 && WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
	res.out = slurp(out_path);
	res.err = slurp(err_path);
	return res;
}

bool contains(const std::string& hay, const std::string& needle) {
	return hay.find(needle) != std::string::npos;
}

std::size_t column_of(const treeflow::TrajectoryTable& table, const std::string& label) {
	for (std::size_t i = 0; i < table.edge_labels.size(); ++i)
		if (table.edge_labels[i] == label) return i;
	REQUIRE(false);
	return 0;
}

} // namespace

TEST_CASE("curvature tables print closed-form values") {
	SUBCASE("four-edge example") {
		CommandResult res = run_cli("curvature --builtin simple");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "u-v"));
		CHECK(contains(res.out, "v-z"));
		CHECK(contains(res.out, "weighted_degree"));
		CHECK(contains(res.out, "sum_kappa = 2"));
		CHECK(contains(res.out, "-0.3333333333333333"));
	}
	SUBCASE("single edge") {
		CommandResult res = run_cli("curvature --builtin k2");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "sum_kappa = 2"));
	}
	SUBCASE("file input") {
		fs::create_directories("cli_scratch");
		{
			std::ofstream f("cli_scratch/own.txt");
			f << "a b 1\nb c 2\n";
		}
		CommandResult res = run_cli("curvature --tree cli_scratch/own.txt");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "a-b"));
	}
}

TEST_CASE("input mistakes exit with code one and a diagnostic") {
	SUBCASE("malformed weight") {
		fs::create_directories("cli_scratch");
		{
			std::ofstream f("cli_scratch/bad.txt");
			f << "a b one\n";
		}
		CommandResult res = run_cli("curvature --tree cli_scratch/bad.txt");
		CHECK(res.exit_code == 1);
		CHECK(contains(res.err, "error:"));
		CHECK(contains(res.err, "line 1"));
	}
	SUBCASE("unknown example name") {
		CommandResult res = run_cli("curvature --builtin bogus");
		CHECK(res.exit_code == 1);
		CHECK(contains(res.err, "bogus"));
	}
	SUBCASE("missing tree source") {
		CommandResult res = run_cli("curvature");
		CHECK(res.exit_code == 1);
	}
	SUBCASE("both tree sources") {
		CommandResult res = run_cli("curvature --builtin simple --tree x.txt");
		CHECK(res.exit_code == 1);
	}
	SUBCASE("fixed step and step control together") {
		CommandResult res = run_cli("simulate --builtin simple --dt 0.01 --adaptive");
		CHECK(res.exit_code == 1);
	}
	SUBCASE("no subcommand") {
		CommandResult res = run_cli("");
		CHECK(res.exit_code == 1);
	}
}

TEST_CASE("simulation writes decaying leaf columns") {
	CommandResult res = run_cli(
	    "simulate --builtin simple --flow unnormalized --t-end 10 --record-every 0.5 "
	    "--rel-tol 1e-11 --out cli_scratch/sim");
	CHECK(res.exit_code == 0);
	CHECK(contains(res.out, "unnormalized flow"));
	REQUIRE(fs::exists("cli_scratch/sim/trajectory.csv"));
	REQUIRE(fs::exists("cli_scratch/sim/monitors.csv"));

	treeflow::TrajectoryTable table =
	    treeflow::read_trajectory_csv_file("cli_scratch/sim/trajectory.csv");
	std::size_t vz = column_of(table, "v-z");
	REQUIRE(table.t.size() == 21);
	CHECK(table.t.front() == 0.0);
	CHECK(table.w.front()[vz] == 1.0);
	for (std::size_t i = 0; i < table.t.size(); ++i) {
		double want = std::exp(-table.t[i]);
		CHECK(std::abs(table.w[i][vz] - want) <= 1e-8 * want);
	}
}

TEST_CASE("normalized single edge stays put") {
	CommandResult res = run_cli(
	    "simulate --builtin k2 --flow normalized --t-end 5 --record-every 0.5 "
	    "--out cli_scratch/k2norm");
	CHECK(res.exit_code == 0);
	treeflow::TrajectoryTable table =
	    treeflow::read_trajectory_csv_file("cli_scratch/k2norm/trajectory.csv");
	REQUIRE(table.edge_labels.size() == 1);
	for (const auto& row : table.w) CHECK(row[0] == 1.0);
	for (const auto& row : table.kappa) CHECK(row[0] == 2.0);
}

TEST_CASE("identical runs produce identical bytes") {
	CommandResult a = run_cli(
	    "simulate --builtin t1 --t-end 5 --record-every 0.25 --out cli_scratch/rep1");
	CommandResult b = run_cli(
	    "simulate --builtin t1 --t-end 5 --record-every 0.25 --out cli_scratch/rep2");
	CHECK(a.exit_code == 0);
	CHECK(b.exit_code == 0);
	CHECK(slurp("cli_scratch/rep1/trajectory.csv") == slurp("cli_scratch/rep2/trajectory.csv"));
	CHECK(slurp("cli_scratch/rep1/monitors.csv") == slurp("cli_scratch/rep2/monitors.csv"));
}

TEST_CASE("classification reports shape and limits") {
	SUBCASE("caterpillar with spine") {
		CommandResult res = run_cli("classify --builtin t1");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "caterpillar: yes"));
		CHECK(contains(res.out, "spine:"));
		CHECK(contains(res.out, "constant curvature 0"));
	}
	SUBCASE("branching tree with witnesses") {
		CommandResult res = run_cli("classify --builtin t2");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "caterpillar: no"));
		CHECK(contains(res.out, "witnesses"));
		CHECK(contains(res.out, "grows without bound"));
		CHECK(contains(res.out, "internal_unknown"));
	}
	SUBCASE("plain path") {
		CommandResult res = run_cli("classify --builtin path5");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "caterpillar: yes"));
		CHECK(contains(res.out, "internal_zero"));
	}
}

TEST_CASE("self-check battery passes and reports properties") {
	SUBCASE("small default-style run") {
		CommandResult res = run_cli("verify --seed 7 --count 40");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "[ ok ]"));
		CHECK(contains(res.out, "properties hold"));
		CHECK(!contains(res.out, "[FAIL]"));
		CHECK(!contains(res.out, "\x1b["));
	}
	SUBCASE("documented seeded batch") {
		CommandResult res = run_cli("verify --seed 42 --count 500");
		CHECK(res.exit_code == 0);
		CHECK(contains(res.out, "properties hold"));
	}
	SUBCASE("deliberate corruption trips the battery") {
		CommandResult res = run_cli("verify --seed 7 --count 40",
		                            "TRF_NO_COLOR=1 TRF_VERIFY_CORRUPT=1");
		CHECK(res.exit_code == 2);
		CHECK(contains(res.out, "[FAIL]"));
		CHECK(contains(res.out, "verification FAILED"));
		CHECK(contains(res.out, "--seed 7"));
	}
}

TEST_CASE("reproduction emits plot data per example") {
	SUBCASE("middle-edge comparison across starts") {
		CommandResult res = run_cli("reproduce simple --out cli_scratch/fig");
		CHECK(res.exit_code == 0);
		CHECK(fs::exists("cli_scratch/fig/simple.csv"));
		CHECK(fs::exists("cli_scratch/fig/simple.dat"));
		CHECK(fs::exists("cli_scratch/fig/simple.gp"));
		CHECK(fs::exists("cli_scratch/fig/simple-uv.dat"));
		CHECK(fs::exists("cli_scratch/fig/simple-uv.gp"));
		std::string dat = slurp("cli_scratch/fig/simple-uv.dat");
		CHECK(contains(dat, "start 0.5"));
	}
	SUBCASE("rise-and-fall example") {
		CommandResult res = run_cli("reproduce t3 --out cli_scratch/fig");
		CHECK(res.exit_code == 0);
		CHECK(fs::exists("cli_scratch/fig/t3.csv"));
		CHECK(fs::exists("cli_scratch/fig/t3.dat"));
		CHECK(fs::exists("cli_scratch/fig/t3.gp"));
	}
	SUBCASE("unknown name") {
		CommandResult res = run_cli("reproduce t9 --out cli_scratch/fig");
		CHECK(res.exit_code == 1);
		CHECK(contains(res.err, "t9"));
	}
}
