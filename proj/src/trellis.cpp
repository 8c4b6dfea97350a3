#include "spaam/trellis.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace spaam {

TrellisGraph::TrellisGraph(int start_frame, int end_frame, std::vector<int> real_counts,
                           std::vector<std::vector<std::vector<int>>> adjacency)
    : start_frame_(start_frame),
      end_frame_(end_frame),
      real_counts_(std::move(real_counts)),
      adjacency_(std::move(adjacency)) {
    if (start_frame_ > end_frame_) throw InternalError("trellis: start frame > end frame");
    real_offsets_.resize(real_counts_.size());
    for (std::size_t f = 0; f < real_counts_.size(); ++f) {
        real_offsets_[f] = total_real_;
        total_real_ += real_counts_[f];
    }
}

bool TrellisGraph::has_edge(int frame, int a, int b) const {
    if (frame < start_frame_ || frame >= end_frame_) return false;
    const auto& succ = successors(frame, a);
    return std::binary_search(succ.begin(), succ.end(), b);
}

std::vector<Subgraph::Edge> Subgraph::edges() const {
    std::vector<Edge> out;
    for (const Track& t : tracks) {
        for (int f = 0; f + 1 < t.length(); ++f) {
            out.push_back({t.start_frame + f, t.nodes[f], t.nodes[f + 1]});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

TrellisGraph build_impl(const FrameSet& detections, int start_frame, int end_frame,
                        const std::function<std::vector<int>(const NodeRef&)>& rule,
                        bool append_dummy) {
    if (start_frame > end_frame) throw InternalError("build_trellis: start > end");
    if (end_frame > detections.frame_count()) {
        throw InternalError("build_trellis: window end beyond detection frames");
    }
    int span = end_frame - start_frame + 1;
    std::vector<int> counts(span);
    for (int f = 0; f < span; ++f) counts[f] = detections.detections_in(start_frame + f);

    std::vector<std::vector<std::vector<int>>> adj(span);
    for (int f = 0; f < span; ++f) {
        int frame = start_frame + f;
        adj[f].resize(counts[f] + 1);
        if (frame == end_frame) continue;
        int next_count = counts[f + 1];
        if (append_dummy) {
            // Dummy node: full next-frame node set, dummy included.
            adj[f][0].resize(next_count + 1);
            for (int b = 0; b <= next_count; ++b) adj[f][0][b] = b;
        } else {
            // Explicit mode: the rule governs dummy nodes too.
            std::vector<int> succ = rule(NodeRef{frame, 0});
            for (int b : succ) {
                if (b < 0 || b > next_count) {
                    throw InternalError("build_trellis: adjacency rule returned node " +
                                        std::to_string(b) + " out of range for frame " +
                                        std::to_string(frame + 1));
                }
            }
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
            adj[f][0] = std::move(succ);
        }
        for (int j = 1; j <= counts[f]; ++j) {
            std::vector<int> succ = rule(NodeRef{frame, j});
            for (int b : succ) {
                if (b < 0 || b > next_count) {
                    throw InternalError("build_trellis: adjacency rule returned node " +
                                        std::to_string(b) + " out of range for frame " +
                                        std::to_string(frame + 1));
                }
            }
            if (append_dummy) succ.push_back(0);
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
            adj[f][j] = std::move(succ);
        }
    }
    return TrellisGraph(start_frame, end_frame, std::move(counts), std::move(adj));
}

}  // namespace

TrellisGraph build_trellis(const FrameSet& detections, int start_frame, int end_frame,
                           const AdjacencyRule& real_node_rule) {
    return build_impl(detections, start_frame, end_frame, real_node_rule, true);
}

TrellisGraph build_trellis_explicit(const FrameSet& detections, int start_frame, int end_frame,
                                    const std::function<std::vector<int>(const NodeRef&)>& rule) {
    return build_impl(detections, start_frame, end_frame, rule, false);
}

std::vector<Track> enumerate_tracks(const TrellisGraph& g, int max_consecutive_dummies,
                                    std::size_t cap,
                                    const std::function<bool(int)>& reentry_allowed) {
    int span = g.frame_span();
    std::vector<Track> out;
    std::vector<int> path(span);

    // DFS over frames; `run` is the current trailing dummy-run length and
    // `seen_real` marks that the run would be interior if a real node follows.
    auto dfs = [&](auto&& self, int depth, bool seen_real, int run) -> void {
        if (depth == span) {
            if (!seen_real) return;  // all-dummy path: the implicit no-vehicle assignment
            if (out.size() >= cap) {
                throw CapacityError("enumerate_tracks: hypothesis cap " + std::to_string(cap) +
                                    " exceeded on window [" + std::to_string(g.start_frame()) +
                                    ", " + std::to_string(g.end_frame()) + "]");
            }
            Track t;
            t.start_frame = g.start_frame();
            t.nodes = path;
            out.push_back(std::move(t));
            return;
        }
        int frame = g.start_frame() + depth;
        bool interior_blocked = seen_real && run > max_consecutive_dummies;
        if (depth == 0) {
            int count = g.real_count(frame);
            for (int j = 0; j <= count; ++j) {
                path[0] = j;
                self(self, 1, j != 0, j == 0 ? 1 : 0);
            }
            return;
        }
        int prev = path[depth - 1];
        bool reentry_blocked =
            seen_real && run > 0 && reentry_allowed && !reentry_allowed(frame);
        for (int b : g.successors(frame - 1, prev)) {
            // Once an interior run exceeds the cap, only dummies may follow
            // (the run becomes trailing, which is always allowed).
            if (b != 0 && (interior_blocked || reentry_blocked)) continue;
            path[depth] = b;
            self(self, depth + 1, seen_real || b != 0, b == 0 ? run + 1 : 0);
        }
    };
    dfs(dfs, 0, false, 0);
    return out;
}

bool check_feasible(const TrellisGraph& g, const std::vector<Track>& tracks) {
    std::vector<int> covered(g.total_real_nodes(), 0);
    for (const Track& t : tracks) {
        if (t.start_frame != g.start_frame() || t.length() != g.frame_span()) return false;
        for (int f = 0; f < t.length(); ++f) {
            int j = t.nodes[f];
            if (j == 0) continue;
            ++covered[g.real_node_id(t.start_frame + f, j)];
        }
    }
    return std::all_of(covered.begin(), covered.end(), [](int c) { return c == 1; });
}

}  // namespace spaam
