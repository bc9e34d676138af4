#include "treeflow/errors.hpp"

namespace treeflow {

const char* errc_name(Errc code) noexcept {
	switch (code) {
	case Errc::parse_error: return "parse_error";
	case Errc::self_loop: return "self_loop";
	case Errc::duplicate_edge: return "duplicate_edge";
	case Errc::non_positive_weight: return "non_positive_weight";
	case Errc::cycle: return "cycle";
	case Errc::disconnected: return "disconnected";
	case Errc::unknown_vertex: return "unknown_vertex";
	case Errc::unknown_edge: return "unknown_edge";
	case Errc::not_endpoint: return "not_endpoint";
	case Errc::invalid_gamma: return "invalid_gamma";
	case Errc::not_normalized: return "not_normalized";
	case Errc::measure_not_normalized: return "measure_not_normalized";
	case Errc::alpha_out_of_range: return "alpha_out_of_range";
	case Errc::nonlinear_alpha_profile: return "nonlinear_alpha_profile";
	case Errc::non_finite_state: return "non_finite_state";
	case Errc::step_underflow: return "step_underflow";
	case Errc::trajectory_too_short: return "trajectory_too_short";
	case Errc::not_maximal_path: return "not_maximal_path";
	case Errc::unknown_example: return "unknown_example";
	case Errc::io_error: return "io_error";
	}
	return "unknown";
}

} // namespace treeflow
