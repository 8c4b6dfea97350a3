#include "spaam/stochastic.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

namespace spaam {

DisassociationResult disassociate(const Subgraph& sub, const ConfidenceMap& conf,
                                  const RoadNetwork& net, const FrameSet& detections, double tau,
                                  uint64_t seed) {
    DisassociationResult result;
    result.seed = seed;
    result.disassociated.resize(detections.frame_count());

    // Edges bounding leading/trailing dummy runs are always dissolved so
    // track births and deaths stay open for re-estimation.
    std::set<Subgraph::Edge> forced;
    for (const Track& t : sub.tracks) {
        int first = -1, last = -1;
        for (int f = 0; f < t.length(); ++f) {
            if (t.nodes[f] != 0) {
                if (first < 0) first = f;
                last = f;
            }
        }
        if (first < 0) continue;
        if (first > 0) {
            forced.insert({t.start_frame + first - 1, 0, t.nodes[first]});
        }
        if (last + 1 < t.length()) {
            forced.insert({t.start_frame + last, t.nodes[last], 0});
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::pair<int, int>> dissolved_sources;

    for (const Subgraph::Edge& e : sub.edges()) {
        bool eta;
        if (forced.count(e)) {
            eta = false;
        } else {
            auto it = conf.find(e);
            if (it == conf.end()) {
                throw InternalError("disassociate: missing confidence for edge (" +
                                    std::to_string(e.frame) + "," + std::to_string(e.a) +
                                    ")->(" + std::to_string(e.frame + 1) + "," +
                                    std::to_string(e.b) + ")");
            }
            eta = uniform(rng) < it->second;
        }
        if (eta) {
            ++result.retained;
            if (e.a != 0) result.adjacency[{e.frame, e.a}] = {e.b};
        } else {
            ++result.dissolved;
            if (e.b != 0) result.disassociated[e.frame].push_back(e.b);  // frame e.frame+1, 0-based slot
            if (e.a != 0) dissolved_sources.emplace_back(e.frame, e.a);
        }
    }
    for (auto& d : result.disassociated) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }

    // Reachable-candidate sets need the complete disassociated sets, so they
    // are assigned after all draws.
    for (auto [frame, a] : dissolved_sources) {
        const std::vector<int>& pool = result.disassociated[frame];  // frame+1's set
        std::vector<int> adj{0};
        if (!pool.empty()) {
            const Vec2& from = detections.location(frame, a);
            std::vector<Vec2> targets;
            targets.reserve(pool.size());
            for (int j : pool) targets.push_back(detections.location(frame + 1, j));
            for (std::size_t i : net.reachable_candidates(from, targets, tau)) {
                adj.push_back(pool[i]);
            }
        }
        std::sort(adj.begin(), adj.end());
        result.adjacency[{frame, a}] = std::move(adj);
    }
    return result;
}

}  // namespace spaam
