#pragma once

#include <stdexcept>
#include <string>

namespace treeflow {

/// Failure categories surfaced by the library. CLI maps any of these to
/// exit code 1 (bad input) unless noted otherwise at the call site.
enum class Errc {
	parse_error,
	self_loop,
	duplicate_edge,
	non_positive_weight,
	cycle,
	disconnected,
	unknown_vertex,
	unknown_edge,
	not_endpoint,
	invalid_gamma,
	not_normalized,
	measure_not_normalized,
	alpha_out_of_range,
	nonlinear_alpha_profile,
	non_finite_state,
	step_underflow,
	trajectory_too_short,
	not_maximal_path,
	unknown_example,
	io_error,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
	Error(Errc code, const std::string& message)
	    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

	Errc code() const noexcept { return code_; }

private:
	Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
	throw Error(code, message);
}

} // namespace treeflow
