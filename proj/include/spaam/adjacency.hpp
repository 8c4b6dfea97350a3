#pragma once

#include "spaam/roadnet.hpp"
#include "spaam/trellis.hpp"

namespace spaam {

/// Successor candidates for a real node: next-frame detections whose minimum
/// road travel distance from it is at most tau. Pass to build_trellis, which
/// appends the dummy successor.
AdjacencyRule road_reachability_rule(const RoadNetwork& net, const FrameSet& detections,
                                     double tau);

/// Distance-only comparison rule: next-frame detections within straight-line
/// distance tau.
AdjacencyRule euclidean_rule(const FrameSet& detections, double tau);

}  // namespace spaam
