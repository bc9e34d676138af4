#include "support/lp_wasserstein.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace treeflow::testsupport {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-9;

/// Pairwise distances by a local breadth-first walk; kept inside the oracle
/// so it does not lean on the library's own distance helper.
std::vector<std::vector<double>> all_distances(const WeightedTree& tree, const Metric& metric) {
	const int n = tree.vertex_count();
	std::vector<std::vector<double>> dist(static_cast<std::size_t>(n));
	for (VertexId s = 0; s < n; ++s) {
		std::vector<double>& row = dist[static_cast<std::size_t>(s)];
		row.assign(static_cast<std::size_t>(n), -1.0);
		row[static_cast<std::size_t>(s)] = 0.0;
		std::vector<VertexId> queue{s};
		for (std::size_t head = 0; head < queue.size(); ++head) {
			VertexId v = queue[head];
			for (const Neighbor& nb : tree.neighbors(v)) {
				if (row[static_cast<std::size_t>(nb.vertex)] >= 0.0) continue;
				row[static_cast<std::size_t>(nb.vertex)] =
				    row[static_cast<std::size_t>(v)] + metric.w[static_cast<std::size_t>(nb.edge)];
				queue.push_back(nb.vertex);
			}
		}
	}
	return dist;
}

/// Dense tableau simplex, Bland's rule, artificials barred from re-entry.
/// Rows 0..m-1 are constraints, row m is the reduced-cost row.
class Simplex {
public:
	Simplex(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows + 1)) {
		for (auto& row : t_) row.assign(static_cast<std::size_t>(cols + 1), 0.0);
		basis_.assign(static_cast<std::size_t>(rows), -1);
	}

	double& at(int r, int c) { return t_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; }
	double& rhs(int r) { return at(r, n_); }
	void set_basis(int r, int var) { basis_[static_cast<std::size_t>(r)] = var; }

	/// Rebuilds the reduced-cost row for the given objective.
	void price(const std::vector<double>& cost) {
		for (int j = 0; j <= n_; ++j) {
			double r = j < n_ ? cost[static_cast<std::size_t>(j)] : 0.0;
			for (int i = 0; i < m_; ++i) {
				double cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
				if (cb != 0.0) r -= cb * at(i, j);
			}
			at(m_, j) = r;
		}
	}

	void pivot(int row, int col) {
		double p = at(row, col);
		for (int j = 0; j <= n_; ++j) at(row, j) /= p;
		for (int i = 0; i <= m_; ++i) {
			if (i == row) continue;
			double f = at(i, col);
			if (f == 0.0) continue;
			for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(row, j);
		}
		basis_[static_cast<std::size_t>(row)] = col;
	}

	/// Runs to optimality over the admissible columns. Bland: entering is the
	/// smallest admissible index with negative reduced cost; leaving is the
	/// ratio-test row with the smallest basis variable.
	void solve(int admissible_cols) {
		for (int guard = 0; guard < 100000; ++guard) {
			int enter = -1;
			for (int j = 0; j < admissible_cols; ++j) {
				if (at(m_, j) < -kCostEps) {
					enter = j;
					break;
				}
			}
			if (enter < 0) return;
			int leave = -1;
			double best = 0.0;
			for (int i = 0; i < m_; ++i) {
				if (at(i, enter) <= kPivotEps) continue;
				double ratio = rhs(i) / at(i, enter);
				if (leave < 0 || ratio < best - 1e-15 ||
				    (std::abs(ratio - best) <= 1e-15 &&
				     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
					leave = i;
					best = ratio;
				}
			}
			if (leave < 0) throw std::runtime_error("transportation LP claims unboundedness");
			pivot(leave, enter);
		}
		throw std::runtime_error("simplex failed to terminate");
	}

	double objective(const std::vector<double>& cost) {
		double total = 0.0;
		for (int i = 0; i < m_; ++i)
			total += cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * rhs(i);
		return total;
	}

	int basis(int r) const { return basis_[static_cast<std::size_t>(r)]; }
	int rows() const { return m_; }

private:
	int m_, n_;
	std::vector<std::vector<double>> t_;
	std::vector<int> basis_;
};

} // namespace

double lp_wasserstein(const WeightedTree& tree, const Metric& metric,
                      const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
	const int n = tree.vertex_count();
	const int vars = n * n;       // coupling x_ij, row-major
	const int rows = 2 * n;       // n supply rows then n demand rows
	const int total = vars + rows; // plus one artificial per row

	std::vector<std::vector<double>> dist = all_distances(tree, metric);

	Simplex sx(rows, total);
	for (int i = 0; i < n; ++i) {
		for (int j = 0; j < n; ++j) {
			sx.at(i, i * n + j) = 1.0;     // supply i
			sx.at(n + j, i * n + j) = 1.0; // demand j
		}
		sx.rhs(i) = mu.mass[static_cast<std::size_t>(i)];
		sx.rhs(n + i) = nu.mass[static_cast<std::size_t>(i)];
	}
	for (int r = 0; r < rows; ++r) {
		sx.at(r, vars + r) = 1.0;
		sx.set_basis(r, vars + r);
	}

	std::vector<double> phase1(static_cast<std::size_t>(total), 0.0);
	for (int r = 0; r < rows; ++r) phase1[static_cast<std::size_t>(vars + r)] = 1.0;
	sx.price(phase1);
	sx.solve(vars); // artificials may leave but never re-enter
	if (sx.objective(phase1) > 1e-7)
		throw std::runtime_error("transportation LP infeasible; measures not balanced?");

	// Any artificial still basic sits at zero; push it onto a real column
	// when one is available so phase 2 never moves it.
	for (int r = 0; r < sx.rows(); ++r) {
		if (sx.basis(r) < vars) continue;
		for (int j = 0; j < vars; ++j) {
			if (std::abs(sx.at(r, j)) > kPivotEps) {
				sx.pivot(r, j);
				break;
			}
		}
	}

	std::vector<double> phase2(static_cast<std::size_t>(total), 0.0);
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			phase2[static_cast<std::size_t>(i * n + j)] =
			    dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
	sx.price(phase2);
	sx.solve(vars);
	return sx.objective(phase2);
}

} // namespace treeflow::testsupport
