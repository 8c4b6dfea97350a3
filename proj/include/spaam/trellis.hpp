#pragma once

#include "spaam/geometry.hpp"

#include <functional>
#include <vector>

namespace spaam {

// A vehicle location observation: frame i (1-based), index j (1-based within
// the frame), planar metric coordinates.
struct Detection {
    int frame = 1;
    int index = 1;
    Vec2 location;
};

// Per-frame detection locations for frames 1..N; frame i's detection j lives
// at frames()[i-1][j-1].
struct FrameSet {
    std::vector<std::vector<Vec2>> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int detections_in(int frame) const { return static_cast<int>(frames[frame - 1].size()); }
    const Vec2& location(int frame, int index) const { return frames[frame - 1][index - 1]; }
};

// Node (i, j): j = 0 is the frame's dummy node.
struct NodeRef {
    int frame = 1;
    int index = 0;

    bool is_dummy() const { return index == 0; }
    bool operator==(const NodeRef& o) const { return frame == o.frame && index == o.index; }
    bool operator<(const NodeRef& o) const {
        return frame != o.frame ? frame < o.frame : index < o.index;
    }
};

// One node per frame over the window; nodes[f] = j for frame start_frame + f.
struct Track {
    int start_frame = 1;
    std::vector<int> nodes;

    int length() const { return static_cast<int>(nodes.size()); }
    int end_frame() const { return start_frame + length() - 1; }
    int node_at_frame(int frame) const { return nodes[frame - start_frame]; }
    // L_p: number of non-dummy nodes.
    int real_count() const {
        int n = 0;
        for (int j : nodes) n += j != 0;
        return n;
    }
    bool operator==(const Track& o) const {
        return start_frame == o.start_frame && nodes == o.nodes;
    }
    bool operator<(const Track& o) const {
        return start_frame != o.start_frame ? start_frame < o.start_frame : nodes < o.nodes;
    }
};

// Layered graph over a window of frames: per-frame nodes (detections plus one
// dummy), edges only between adjacent frames. Immutable after build.
class TrellisGraph {
public:
    TrellisGraph(int start_frame, int end_frame, std::vector<int> real_counts,
                 std::vector<std::vector<std::vector<int>>> adjacency);

    int start_frame() const { return start_frame_; }
    int end_frame() const { return end_frame_; }
    int frame_span() const { return end_frame_ - start_frame_ + 1; }  // T(G)
    int real_count(int frame) const { return real_counts_[frame - start_frame_]; }
    int total_real_nodes() const { return total_real_; }
    // j'th node of `frame`; j = 0 dummy. Successors are sorted ascending.
    const std::vector<int>& successors(int frame, int j) const {
        return adjacency_[frame - start_frame_][j];
    }
    bool has_edge(int frame, int a, int b) const;

    // Real node (frame, j) -> dense id in [0, total_real_nodes).
    int real_node_id(int frame, int j) const {
        return real_offsets_[frame - start_frame_] + (j - 1);
    }

private:
    int start_frame_, end_frame_;
    std::vector<int> real_counts_;
    std::vector<int> real_offsets_;
    int total_real_ = 0;
    // adjacency_[f][j] = sorted next-frame indices; empty for the last frame.
    std::vector<std::vector<std::vector<int>>> adjacency_;
};

// A consistent set of tracks over a common window: V(sub) = V(G), every real
// node on exactly one track.
struct Subgraph {
    int start_frame = 1;
    int end_frame = 1;
    std::vector<Track> tracks;

    struct Edge {
        int frame;  // source frame
        int a;      // source index
        int b;      // successor index
        bool operator<(const Edge& o) const {
            if (frame != o.frame) return frame < o.frame;
            if (a != o.a) return a < o.a;
            return b < o.b;
        }
        bool operator==(const Edge& o) const {
            return frame == o.frame && a == o.a && b == o.b;
        }
    };
    // Deduplicated, sorted by (frame, source index, successor index).
    std::vector<Edge> edges() const;
};

// Successor candidates for a real node; the dummy node (j = 0) is appended by
// the builder, so rules list real candidates only. Dummy nodes always get the
// full next-frame node set.
using AdjacencyRule = std::function<std::vector<int>(const NodeRef&)>;

TrellisGraph build_trellis(const FrameSet& detections, int start_frame, int end_frame,
                           const AdjacencyRule& real_node_rule);

// Rule listing explicit successor sets (used by the SPAAM hierarchy); the
// rule is consulted for dummy nodes too, and entries may include 0 for the
// dummy. Out-of-range successors are a construction error.
TrellisGraph build_trellis_explicit(const FrameSet& detections, int start_frame, int end_frame,
                                    const std::function<std::vector<int>(const NodeRef&)>& rule);

// All root-to-end paths with at most `max_consecutive_dummies` interior
// consecutive dummy nodes (runs between two real nodes); leading/trailing
// dummy runs are unbounded. The all-dummy path is excluded. Throws
// CapacityError when the count exceeds `cap`. When `reentry_allowed` is
// given, a path that already carries a real node may leave a dummy run for a
// real node at frame f only if reentry_allowed(f); the SPAAM hierarchy uses
// this to confine re-linking to window seams.
std::vector<Track> enumerate_tracks(const TrellisGraph& g, int max_consecutive_dummies,
                                    std::size_t cap = 2'000'000,
                                    const std::function<bool(int)>& reentry_allowed = {});

// True iff every real node of g is covered exactly once by `tracks`.
bool check_feasible(const TrellisGraph& g, const std::vector<Track>& tracks);

}  // namespace spaam
