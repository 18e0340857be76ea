// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rissec/rate.hpp"

namespace rissec {

// One optimizer iteration.  bound_objective is the algorithm's own ascent
// quantity (weighted min lower-bound rate for the alternating SOCP loop,
// smoothed min for the surrogate loop); true_wmsr is the clamped weighted
// minimum secrecy rate of the iterate.  zeta carries the smoothing
// parameter for the surrogate loop and the final modulus penalty for the
// SOCP loop.  wall_ms is cumulative and stays 0 when timing is disabled.
struct TraceRow {
    int iteration = 0;
    double bound_objective = 0.0;
    double true_wmsr = 0.0;
    double zeta = 0.0;
    double wall_ms = 0.0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    std::string status = "converged"; // converged | max-iterations
    int iterations = 0;
    double total_ms = 0.0;
    int warnings = 0; // subproblem fallbacks and flagged inner-loop exits
};

struct BcdResult {
    BeamState state;
    RunTrace trace;
};

// Called after each block update with the block objective before and after
// the step, both measured against the same fixed auxiliary variables.
// block is "w" or "phi".
using BlockObserver =
    std::function<void(int iteration, const char* block, double before, double after)>;

} // namespace rissec
