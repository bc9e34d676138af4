#include "treeflow/csvio.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "treeflow/errors.hpp"
#include "treeflow/numerics.hpp"

namespace treeflow {

namespace {

void write_header(std::ostream& os, const Trajectory& traj, char sep, const char* lead) {
	os << lead << "t";
	for (EdgeId e = 0; e < traj.tree.edge_count(); ++e)
		os << sep << "w:" << traj.tree.edge_label(e);
	for (EdgeId e = 0; e < traj.tree.edge_count(); ++e)
		os << sep << "kappa:" << traj.tree.edge_label(e);
	os << "\n";
}

void write_rows(std::ostream& os, const Trajectory& traj, char sep) {
	for (const Sample& s : traj.samples) {
		os << format_double(s.t);
		for (double w : s.w) os << sep << format_double(w);
		for (double k : s.curvature.kappa) os << sep << format_double(k);
		os << "\n";
	}
}

std::vector<std::string> split_line(const std::string& line, char sep) {
	std::vector<std::string> out;
	std::string cell;
	std::istringstream is(line);
	while (std::getline(is, cell, sep)) out.push_back(cell);
	if (!line.empty() && line.back() == sep) out.push_back("");
	return out;
}

std::ofstream open_out(const std::string& path) {
	std::ofstream os(path);
	if (!os) fail(Errc::io_error, "cannot open '" + path + "' for writing");
	return os;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
	write_header(os, traj, ',', "");
	write_rows(os, traj, ',');
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& traj) {
	std::ofstream os = open_out(path);
	write_trajectory_csv(os, traj);
	if (!os) fail(Errc::io_error, "failed while writing '" + path + "'");
}

TrajectoryTable read_trajectory_csv(std::istream& is) {
	std::string line;
	if (!std::getline(is, line)) fail(Errc::parse_error, "empty trajectory file");
	if (!line.empty() && line.back() == '\r') line.pop_back();
	std::vector<std::string> header = split_line(line, ',');
	if (header.empty() || header[0] != "t")
		fail(Errc::parse_error, "trajectory header must start with 't'");

	TrajectoryTable table;
	std::size_t n_w = 0, n_k = 0;
	for (std::size_t i = 1; i < header.size(); ++i) {
		if (header[i].rfind("w:", 0) == 0) {
			if (n_k > 0) fail(Errc::parse_error, "weight columns must precede curvature columns");
			table.edge_labels.push_back(header[i].substr(2));
			++n_w;
		} else if (header[i].rfind("kappa:", 0) == 0) {
			std::size_t at = n_k;
			if (at >= n_w || header[i].substr(6) != table.edge_labels[at])
				fail(Errc::parse_error, "curvature columns must mirror the weight columns");
			++n_k;
		} else {
			fail(Errc::parse_error, "unrecognized column '" + header[i] + "'");
		}
	}
	if (n_w == 0 || n_k != n_w)
		fail(Errc::parse_error, "trajectory header needs matching w: and kappa: columns");

	int lineno = 1;
	auto cell_value = [&lineno](const std::string& cell) {
		double out = 0.0;
		if (!parse_double(cell, out))
			fail(Errc::parse_error,
			     "line " + std::to_string(lineno) + ": cannot parse number '" + cell + "'");
		return out;
	};
	while (std::getline(is, line)) {
		++lineno;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty()) continue;
		std::vector<std::string> cells = split_line(line, ',');
		if (cells.size() != 1 + 2 * n_w)
			fail(Errc::parse_error, "line " + std::to_string(lineno) + ": expected " +
			                            std::to_string(1 + 2 * n_w) + " cells, found " +
			                            std::to_string(cells.size()));
		table.t.push_back(cell_value(cells[0]));
		std::vector<double> w(n_w), k(n_w);
		for (std::size_t i = 0; i < n_w; ++i) w[i] = cell_value(cells[1 + i]);
		for (std::size_t i = 0; i < n_w; ++i) k[i] = cell_value(cells[1 + n_w + i]);
		table.w.push_back(std::move(w));
		table.kappa.push_back(std::move(k));
	}
	if (table.t.empty()) fail(Errc::parse_error, "trajectory file holds no samples");
	return table;
}

TrajectoryTable read_trajectory_csv_file(const std::string& path) {
	std::ifstream is(path);
	if (!is) fail(Errc::io_error, "cannot open '" + path + "' for reading");
	return read_trajectory_csv(is);
}

void write_monitors_csv(std::ostream& os, const Trajectory& traj) {
	const bool unnormalized = traj.variant == FlowVariant::unnormalized;
	os << "t,gauss_bonnet";
	if (unnormalized) {
		os << ",log_product";
		for (const LeafPair& p : traj.leaf_pairs)
			os << ",pair:" << traj.tree.edge_label(p.e) << "/" << traj.tree.edge_label(p.g);
	} else {
		os << ",total_weight";
	}
	os << ",internal_sum,internal_product\n";
	for (const Sample& s : traj.samples) {
		os << format_double(s.t) << "," << format_double(s.monitors.gauss_bonnet_residual);
		if (unnormalized) {
			// Absent once an edge froze at the floor; render as nan.
			os << ","
			   << format_double(s.monitors.product_log_residual.value_or(
			          std::numeric_limits<double>::quiet_NaN()));
			for (double r : s.monitors.leaf_pair_residuals) os << "," << format_double(r);
		} else {
			os << "," << format_double(s.monitors.total_weight_residual.value());
		}
		os << "," << format_double(s.monitors.internal_sum) << ","
		   << format_double(s.monitors.internal_product) << "\n";
	}
}

void write_monitors_csv_file(const std::string& path, const Trajectory& traj) {
	std::ofstream os = open_out(path);
	write_monitors_csv(os, traj);
	if (!os) fail(Errc::io_error, "failed while writing '" + path + "'");
}

void write_plot_data(std::ostream& os, const Trajectory& traj) {
	write_header(os, traj, ' ', "# ");
	write_rows(os, traj, ' ');
}

void write_plot_data_file(const std::string& path, const Trajectory& traj) {
	std::ofstream os = open_out(path);
	write_plot_data(os, traj);
	if (!os) fail(Errc::io_error, "failed while writing '" + path + "'");
}

} // namespace treeflow
