#pragma once

#include "spaam/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace spaam {

struct Road {
    int id = 0;
    int lanes = 1;
    bool oneway = false;
    std::vector<Vec2> points;
};

// One directed traversal of a road. Two-way roads expand into a forward and
// a reversed polyline sharing the road id.
struct DirectedPolyline {
    int road_id = 0;
    int lanes = 1;
    bool reversed = false;
    std::vector<Vec2> points;
    int first_segment = 0;  // offset into the global segment arrays
};

struct CenterlineProjection {
    Vec2 point;             // nearest point on the centerline
    double distance = 0.0;  // meters from the query point
    Vec2 road_dir;          // unit direction of travel at the projection
    int lanes = 1;
    int road_id = 0;
    int segment = -1;       // global segment index
    double t = 0.0;         // parameter along the segment
};

/// Directed road graph answering nearest-centerline, direction-of-travel and
/// minimum-travel-distance queries. Immutable after construction; the
/// travel-distance LUT is a concurrency-safe cache keyed on quantized points.
class RoadNetwork {
public:
    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    RoadNetwork(std::vector<Road> roads, double max_projection_distance = 50.0,
                double lut_grid = 1.0);

    const std::vector<Road>& roads() const { return roads_; }
    const std::vector<DirectedPolyline>& directed_polylines() const { return lines_; }
    std::size_t segment_count() const { return seg_ax_.size(); }
    double max_projection_distance() const { return max_projection_distance_; }
    double total_length() const { return total_length_; }

    /// Globally nearest segment projection; ties broken by lowest road id,
    /// forward polyline before reversed, then lowest segment index.
    CenterlineProjection project_to_centerline(const Vec2& p) const;

    /// theta(a,b) = proj distance of a + shortest directed on-road path +
    /// proj distance of b. Returns kUnreachable when either point is farther
    /// than max_projection_distance from every road or no directed path
    /// exists. Answers are cached in the quantized-point LUT.
    double travel_distance(const Vec2& a, const Vec2& b) const;

    /// Same as travel_distance but never consults or fills the LUT.
    double travel_distance_uncached(const Vec2& a, const Vec2& b) const;

    /// One Dijkstra run shared across all targets; LUT consulted per pair.
    std::vector<double> travel_distances(const Vec2& from,
                                         const std::vector<Vec2>& targets) const;

    /// Indices of candidates with travel_distance(from, c) <= tau.
    std::vector<std::size_t> reachable_candidates(const Vec2& from,
                                                  const std::vector<Vec2>& candidates,
                                                  double tau) const;

    std::size_t lut_size() const;

    /// Uniform point on the network: (polyline index, arc position in meters).
    /// Used by the scenario generator; selection weighted by length.
    Vec2 point_at(int line, double arc, Vec2* dir_out = nullptr) const;
    double line_length(int line) const { return line_length_[line]; }

private:
    struct Projection {
        int segment;
        double t;
        double dist;
    };

    using LutKey = std::array<int64_t, 4>;
    struct LutKeyHash {
        std::size_t operator()(const LutKey& k) const {
            uint64_t h = 1469598103934665603ull;
            for (int64_t v : k) {
                h ^= static_cast<uint64_t>(v);
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    std::vector<Projection> achieving_projections(const Vec2& p) const;
    std::vector<double> shortest_from(const std::vector<Projection>& sources) const;
    double path_between(const std::vector<Projection>& sa, const std::vector<Projection>& sb,
                        const std::vector<double>& dist) const;
    LutKey lut_key(const Vec2& a, const Vec2& b) const;

    std::vector<Road> roads_;
    std::vector<DirectedPolyline> lines_;
    std::vector<double> line_length_;
    double total_length_ = 0.0;

    // Segment SoA scanned by the SIMD kernels; doubles as the spatial index.
    std::vector<double> seg_ax_, seg_ay_, seg_bx_, seg_by_;
    std::vector<int> seg_line_;    // owning directed polyline
    std::vector<int> seg_local_;   // segment index within the polyline
    std::vector<double> seg_len_;
    std::vector<int> seg_from_vertex_, seg_to_vertex_;

    // Directed vertex graph for Dijkstra; vertices unified on coordinates.
    std::vector<Vec2> vertex_pos_;
    std::vector<std::vector<std::pair<int, double>>> out_edges_;

    double max_projection_distance_;
    double lut_grid_;
    mutable std::unordered_map<LutKey, double, LutKeyHash> lut_;
    mutable std::shared_mutex lut_mutex_;
};

/// Parses the documented road-network JSON schema:
/// { "roads": [ { "id", "lanes", "oneway", "points": [[x,y],...] } ] }
RoadNetwork load_road_network(const std::filesystem::path& file);
RoadNetwork parse_road_network(const std::string& json_text, const std::string& origin,
                               double max_projection_distance = 50.0, double lut_grid = 1.0);
std::string road_network_to_json(const std::vector<Road>& roads);

}  // namespace spaam
