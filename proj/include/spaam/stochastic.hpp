#pragma once

#include "spaam/confidence.hpp"
#include "spaam/roadnet.hpp"
#include "spaam/trellis.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace spaam {

struct DisassociationResult {
    // disassociated[i-1]: real node indices of frame i released for
    // re-association (sorted).
    std::vector<std::vector<int>> disassociated;
    // Next-iteration adjacency for real source nodes: retained edges give a
    // singleton; dissolved edges give {dummy} + road-reachable disassociated
    // candidates. Dummy nodes always get the full next-frame set and carry no
    // entry here.
    std::map<std::pair<int, int>, std::vector<int>> adjacency;
    uint64_t seed = 0;
    int retained = 0;
    int dissolved = 0;
};

/// Bernoulli-retains each estimated pairwise association with probability
/// equal to its confidence; edges are consumed in (frame, source index,
/// successor index) order from a single seeded stream. Edges bounding
/// leading/trailing dummy runs are always dissolved. Throws InternalError
/// when an edge has no confidence entry.
DisassociationResult disassociate(const Subgraph& sub, const ConfidenceMap& conf,
                                  const RoadNetwork& net, const FrameSet& detections, double tau,
                                  uint64_t seed);

}  // namespace spaam
