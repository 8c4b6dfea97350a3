#pragma once

#include "spaam/trellis.hpp"

#include <vector>

namespace spaam {

// Per-window minimum-cost feasible-subgraph problem in hypothesis space: one
// binary variable per track hypothesis, set-partitioning over real nodes.
struct WindowProblem {
    const TrellisGraph* graph = nullptr;
    std::vector<Track> hypotheses;
    std::vector<double> costs;
};

struct Solution {
    std::vector<int> selected;  // hypothesis ids, sorted ascending
    double total_cost = 0.0;    // sum of selected costs in id order
    Subgraph subgraph;
};

struct SolveOptions {
    double timeout_seconds = 60.0;
};

/// Exact branch-and-bound: total cost minimal over all feasible selections;
/// among equal-cost optima the lexicographically smallest hypothesis-id set.
/// Throws TimeoutError (with incumbent and gap in the message) on budget
/// exhaustion, InternalError when some real node has no covering hypothesis.
Solution solve_window(const WindowProblem& p, const SolveOptions& opts = {});

/// Exhaustive enumeration of all feasible selections; same tie-break as
/// solve_window. Guarded to <= 10,000 hypotheses.
Solution brute_force_oracle(const WindowProblem& p);

}  // namespace spaam
