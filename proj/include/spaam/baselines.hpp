#pragma once

#include "spaam/cost.hpp"
#include "spaam/roadnet.hpp"
#include "spaam/trellis.hpp"

#include <vector>

namespace spaam {

// Forbidden assignments use this sentinel; totals must stay far below it.
constexpr double kForbidden = 1e15;

/// Exact minimum-cost assignment on a square matrix (Jonker-Volgenant
/// shortest augmenting path). Returns col assigned to each row.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

struct OtParams {
    double tau = 25.0;        // per-frame road-reachability gate
    double miss_cost = 15.0;  // track -> dummy assignment cost
    int max_coast = 2;        // frames a track may miss before it dies
};

/// Online tracker: sequential frame-to-frame exact bipartite assignment with
/// dummy augmentation. Pairwise cost is a constant-velocity prediction
/// residual plus the road distance/direction penalties weighted by the cost
/// params; associations are gated by road reachability.
Subgraph ot_track(const FrameSet& detections, const ProjectionCache& cache,
                  const CostParams& params, const OtParams& ot);

struct IcmResult {
    Subgraph subgraph;
    std::vector<double> sweep_costs;  // total cost before sweep 1, then after each sweep
    int sweeps = 0;
};

/// Iterative conditional re-estimation: forward sweeps over frame pairs,
/// re-solving the bipartite matching between each pair's track prefixes and
/// suffixes under the global track cost with everything else frozen. The
/// total cost is non-increasing by construction.
IcmResult mda_icm(const FrameSet& detections, const ProjectionCache& cache,
                  const CostParams& params, double tau, Subgraph init, int max_sweeps = 50);

/// Sum of track costs over a subgraph (all-dummy tracks contribute 0).
double subgraph_cost(const Subgraph& sub, const ProjectionCache& cache, const CostParams& params);

}  // namespace spaam
