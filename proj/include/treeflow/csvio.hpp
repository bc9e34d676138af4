#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treeflow/flow.hpp"

namespace treeflow {

/// Columns are t, then w:<edge label> per edge, then kappa:<edge label> per
/// edge, in canonical edge order. Doubles are printed in shortest
/// round-trip form, so reading the file back reproduces the bits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv_file(const std::string& path, const Trajectory& traj);

struct TrajectoryTable {
	std::vector<std::string> edge_labels;
	std::vector<double> t;
	std::vector<std::vector<double>> w;     ///< per sample, per edge
	std::vector<std::vector<double>> kappa; ///< per sample, per edge
};

TrajectoryTable read_trajectory_csv(std::istream& is);
TrajectoryTable read_trajectory_csv_file(const std::string& path);

/// Conservation diagnostics per sample: the closed-form laws the run is
/// expected to track, as absolute residuals.
void write_monitors_csv(std::ostream& os, const Trajectory& traj);
void write_monitors_csv_file(const std::string& path, const Trajectory& traj);

/// Space-separated table with a commented header line; column layout
/// matches the trajectory CSV. Convenient for gnuplot's `using` clauses.
void write_plot_data(std::ostream& os, const Trajectory& traj);
void write_plot_data_file(const std::string& path, const Trajectory& traj);

} // namespace treeflow
