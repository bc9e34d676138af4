#pragma once

#include <cstdint>
#include <iosfwd>

#include "treeflow/analysis.hpp"

namespace treeflow {

struct VerifyOptions {
	std::uint64_t seed = 1;
	int trees = 60;        ///< random trees per identity check
	int flow_runs = 6;     ///< short integrations for the conservation checks
	std::ostream* log = nullptr; ///< one line per check when set
};

/// Randomized battery of internal consistency checks: curvature identities,
/// transport axioms, duality, scale invariance, and short-run conservation
/// laws. Deterministic for a fixed seed. Setting TRF_VERIFY_CORRUPT in the
/// environment injects a deliberate error so callers can confirm the
/// battery actually fails when the numbers are wrong.
CheckReport run_self_checks(const VerifyOptions& opt);

} // namespace treeflow
