#pragma once

#include "spaam/confidence.hpp"
#include "spaam/cost.hpp"
#include "spaam/roadnet.hpp"
#include "spaam/solver.hpp"
#include "spaam/trellis.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace spaam {

struct SpaamConfig {
    int initial_window = 3;  // M^(1); grows by one frame per iteration
    int branching = 2;       // q: windows merged per hierarchy level
    int max_iters = 6;
    enum class ConfidenceMode { Marginal, Gmm };
    ConfidenceMode confidence_mode = ConfidenceMode::Marginal;
    uint64_t seed = 0;
    double tau = 25.0;
    int max_consecutive_dummies = 2;
    std::size_t hypothesis_cap = 2'000'000;
    std::size_t confidence_enum_cap = 200'000;
    double solver_timeout_seconds = 60.0;
    int threads = 1;
    // SPAAM--: single pass with no prior associations (max_iters should be 1).
    bool cold_start = false;
    GmmParams gmm;  // only read in Gmm mode
};

struct IterationStats {
    int iteration = 0;
    int window_size = 0;  // M^(t)
    double total_cost = 0.0;
    int edges_retained = 0;
    int edges_dissolved = 0;
    double wall_seconds = 0.0;
    std::vector<int> windows_per_level;
};

struct IterationTrace {
    std::vector<IterationStats> iterations;
};

struct SpaamResult {
    Subgraph subgraph;
    IterationTrace trace;
};

// Exact adjacency set (dummy index 0 included where applicable) for a real
// node; the base sets are the stochastic-disassociation output or, cold, the
// road-reachability candidates.
using AdjacencyFn = std::function<std::vector<int>(const NodeRef&)>;

/// Disjoint windows of `size` frames covering [1, n]; the last window is
/// short when size does not divide n.
std::vector<std::pair<int, int>> partition_frames(int n, int size);

/// Smallest level whose window size q^level * m reaches n.
int max_level(int n, int m, int q);

/// Level graphs for one hierarchy level: window boundaries (frame index a
/// positive multiple of prev_window_size) take the base adjacency; interior
/// frames take the singleton successor from the previous level's solutions.
std::vector<TrellisGraph> link_level(const FrameSet& detections, int n_frames,
                                     int prev_window_size, int window_size,
                                     const std::vector<Subgraph>& prev_solutions,
                                     const AdjacencyFn& base);

/// Full SPAAM driver: per iteration, estimate confidences on the previous
/// subgraph, stochastically disassociate, then re-estimate hierarchically
/// over windows growing as q^level * M^(t). `init` seeds iteration 1 (from
/// the online tracker); pass nullptr or set cold_start for an empty start.
SpaamResult spaam_run(const ProjectionCache& cache, const CostParams& cost_params,
                      const SpaamConfig& cfg, const Subgraph* init);

}  // namespace spaam
