#include "spaam/adjacency.hpp"

#include "spaam/kernels.hpp"

namespace spaam {

AdjacencyRule road_reachability_rule(const RoadNetwork& net, const FrameSet& detections,
                                     double tau) {
    return [&net, &detections, tau](const NodeRef& node) {
        std::vector<int> out;
        int next = node.frame + 1;
        if (next > detections.frame_count()) return out;
        const std::vector<Vec2>& candidates = detections.frames[next - 1];
        const Vec2& from = detections.location(node.frame, node.index);
        for (std::size_t c : net.reachable_candidates(from, candidates, tau)) {
            out.push_back(static_cast<int>(c) + 1);
        }
        return out;
    };
}

AdjacencyRule euclidean_rule(const FrameSet& detections, double tau) {
    return [&detections, tau](const NodeRef& node) {
        std::vector<int> out;
        int next = node.frame + 1;
        if (next > detections.frame_count()) return out;
        const std::vector<Vec2>& cand = detections.frames[next - 1];
        const Vec2& from = detections.location(node.frame, node.index);
        std::vector<double> xs(cand.size()), ys(cand.size()), d2(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) {
            xs[i] = cand[i].x;
            ys[i] = cand[i].y;
        }
        kernels::dist2_row(from.x, from.y, xs.data(), ys.data(), cand.size(), d2.data());
        double t2 = tau * tau;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (d2[i] <= t2) out.push_back(static_cast<int>(i) + 1);
        }
        return out;
    };
}

}  // namespace spaam
