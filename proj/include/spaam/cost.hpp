#pragma once

#include "spaam/roadnet.hpp"
#include "spaam/trellis.hpp"

#include <array>
#include <optional>
#include <vector>

namespace spaam {

struct CostParams {
    double sigma_m = 12.5;
    double sigma_d = 0.02;
    double sigma_theta = 100.0;
    double sigma_g = 2.8;
    int half_window = 2;  // W: velocities compared over 2W+1 frames
    double dt = 1.0;      // inter-frame seconds
};

struct MotionSimilarity {
    double magnitude = 1.0;  // in [0,1]
    double direction = 1.0;  // mean cosine, in [-1,1]
};

struct RoadPenalty {
    double distance = 0.0;   // d / lanes
    double direction = 0.0;  // 1 - cos(theta), in [0,2]
};

struct EdgeFeatures {
    double gamma_m = 1.0;
    double gamma_theta = 1.0;
    double r_d = 0.0;
    double r_theta = 0.0;

    std::array<double, 4> as_array() const { return {gamma_m, gamma_theta, r_d, r_theta}; }
};

/// Centerline projections of every detection, computed once per frame set.
class ProjectionCache {
public:
    ProjectionCache(const RoadNetwork& net, const FrameSet& detections);

    const CenterlineProjection& at(int frame, int index) const {
        return per_frame_[frame - 1][index - 1];
    }
    const FrameSet& detections() const { return *detections_; }
    const RoadNetwork& network() const { return *net_; }

private:
    const RoadNetwork* net_;
    const FrameSet* detections_;
    std::vector<std::vector<CenterlineProjection>> per_frame_;
};

/// Velocity at each track position: defined at a real node with a later real
/// node; computed between the locations that become adjacent once dummies are
/// skipped, divided by the frame gap times dt.
std::vector<std::optional<Vec2>> track_velocities(const Track& track, const FrameSet& detections,
                                                  double dt);

/// Mean similarity of velocity `pos` against the other velocities in the
/// window of 2W+1 positions; undefined comparands are skipped and the mean is
/// renormalized. No comparable velocity: both components default to 1.
MotionSimilarity motion_similarity(const std::vector<std::optional<Vec2>>& velocities, int pos,
                                   int half_window);

/// (R_d, R_theta) at the given position; both exactly 0 at dummy nodes,
/// R_theta 0 when the velocity there is undefined or zero.
RoadPenalty road_penalties(const ProjectionCache& cache, const Track& track,
                           const std::vector<std::optional<Vec2>>& velocities, int pos);

/// The 4-vector [Gamma_m, Gamma_theta, R_d, R_theta] at an edge's source
/// position. Dummy source: neutral motion (1,1) and zero road penalties.
EdgeFeatures edge_features(const ProjectionCache& cache, const Track& track,
                           const std::vector<std::optional<Vec2>>& velocities, int pos,
                           int half_window);

/// Track cost: -exp(-sum over window positions of the weighted penalties);
/// dummy positions contribute sigma_g / T(G) each. Always in [-1, 0).
/// `window_span` is T(G). Throws on all-dummy tracks.
double track_cost(const ProjectionCache& cache, const Track& track, const CostParams& params,
                  int window_span);

/// Batch evaluator reusing scratch buffers; one instance per thread.
class CostEvaluator {
public:
    CostEvaluator(const ProjectionCache& cache, const CostParams& params)
        : cache_(&cache), params_(params) {}

    double cost(const Track& track, int window_span) const {
        return track_cost(*cache_, track, params_, window_span);
    }
    std::vector<double> costs(const std::vector<Track>& tracks, int window_span) const;

    const CostParams& params() const { return params_; }
    const ProjectionCache& cache() const { return *cache_; }

private:
    const ProjectionCache* cache_;
    CostParams params_;
};

}  // namespace spaam
