#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace treeflow {

/// Neumaier-compensated accumulator. Neighbor sums and the global curvature
/// checksum must hold at 1e-12 even on trees with 1e4 edges, which plain
/// left-to-right summation does not guarantee.
class StableSum {
public:
	void add(double x) {
		double t = sum_ + x;
		if (std::abs(sum_) >= std::abs(x))
			comp_ += (sum_ - t) + x;
		else
			comp_ += (x - t) + sum_;
		sum_ = t;
	}

	double value() const { return sum_ + comp_; }

private:
	double sum_ = 0.0;
	double comp_ = 0.0;
};

inline double stable_total(std::span<const double> xs) {
	StableSum s;
	for (double x : xs) s.add(x);
	return s.value();
}

/// Shortest decimal string that round-trips to the same binary64 value.
inline std::string format_double(double x) {
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof(buf), x);
	return std::string(buf, res.ptr);
}

/// Strict full-token parse; returns false on trailing garbage or non-number.
inline bool parse_double(std::string_view text, double& out) {
	const char* first = text.data();
	const char* last = first + text.size();
	auto res = std::from_chars(first, last, out);
	return res.ec == std::errc() && res.ptr == last;
}

/// Least-squares slope of y against x. The tail-window limit detectors use
/// this rather than endpoint differences so one noisy sample cannot flip a
/// verdict.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
	std::size_t n = x.size();
	StableSum sx, sy;
	for (std::size_t i = 0; i < n; ++i) {
		sx.add(x[i]);
		sy.add(y[i]);
	}
	double mx = sx.value() / static_cast<double>(n);
	double my = sy.value() / static_cast<double>(n);
	StableSum sxy, sxx;
	for (std::size_t i = 0; i < n; ++i) {
		sxy.add((x[i] - mx) * (y[i] - my));
		sxx.add((x[i] - mx) * (x[i] - mx));
	}
	if (sxx.value() == 0.0) return 0.0;
	return sxy.value() / sxx.value();
}

} // namespace treeflow
