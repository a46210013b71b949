#pragma once

namespace loop_lc {

/// Every data-parallel kernel has a serial reference path kept for testing.
/// Both paths produce bit-identical results: reductions happen in a fixed
/// order after the parallel region.
enum class Execution { serial, parallel };

/// Reads LOOP_LC_THREADS and caps the OpenMP worker count accordingly.
/// Returns the resulting maximum thread count.
int configure_threads_from_env();

int max_threads();

}  // namespace loop_lc
