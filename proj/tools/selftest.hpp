#pragma once

#include <cstdint>

#include <json.hpp>

namespace loop_lc_tools {

/// Quick invariant suite. Returns a JSON report with one entry per check and
/// an overall "passed" flag.
nlohmann::json run_selftest(std::uint64_t seed);

}  // namespace loop_lc_tools
