#include "spaam/cost.hpp"

#include "spaam/errors.hpp"

#include <cmath>

namespace spaam {

ProjectionCache::ProjectionCache(const RoadNetwork& net, const FrameSet& detections)
    : net_(&net), detections_(&detections) {
    per_frame_.resize(detections.frame_count());
    for (int i = 1; i <= detections.frame_count(); ++i) {
        int d = detections.detections_in(i);
        per_frame_[i - 1].reserve(d);
        for (int j = 1; j <= d; ++j) {
            per_frame_[i - 1].push_back(net.project_to_centerline(detections.location(i, j)));
        }
    }
}

std::vector<std::optional<Vec2>> track_velocities(const Track& track, const FrameSet& detections,
                                                  double dt) {
    std::vector<std::optional<Vec2>> v(track.length());
    int prev = -1;
    for (int f = 0; f < track.length(); ++f) {
        if (track.nodes[f] == 0) continue;
        if (prev >= 0) {
            const Vec2& za = detections.location(track.start_frame + prev, track.nodes[prev]);
            const Vec2& zb = detections.location(track.start_frame + f, track.nodes[f]);
            double gap = static_cast<double>(f - prev) * dt;
            v[prev] = (zb - za) / gap;
        }
        prev = f;
    }
    return v;
}

MotionSimilarity motion_similarity(const std::vector<std::optional<Vec2>>& velocities, int pos,
                                   int half_window) {
    MotionSimilarity sim;
    if (!velocities[pos].has_value()) return sim;
    const Vec2 vi = *velocities[pos];
    double ni2 = vi.norm2();
    double mag_sum = 0.0, dir_sum = 0.0;
    int count = 0;
    int lo = std::max(0, pos - half_window);
    int hi = std::min(static_cast<int>(velocities.size()) - 1, pos + half_window);
    for (int k = lo; k <= hi; ++k) {
        if (k == pos || !velocities[k].has_value()) continue;
        const Vec2 vk = *velocities[k];
        double nk2 = vk.norm2();
        if (ni2 == 0.0 && nk2 == 0.0) {
            mag_sum += 1.0;
            dir_sum += 1.0;  // two stationary velocities: identical
        } else {
            double ni = std::sqrt(ni2), nk = std::sqrt(nk2);
            mag_sum += 2.0 * ni * nk / (ni2 + nk2);
            dir_sum += (ni == 0.0 || nk == 0.0) ? 0.0 : vi.dot(vk) / (ni * nk);
        }
        ++count;
    }
    if (count == 0) return sim;
    sim.magnitude = mag_sum / count;
    sim.direction = dir_sum / count;
    return sim;
}

RoadPenalty road_penalties(const ProjectionCache& cache, const Track& track,
                           const std::vector<std::optional<Vec2>>& velocities, int pos) {
    RoadPenalty out;
    int j = track.nodes[pos];
    if (j == 0) return out;
    const CenterlineProjection& proj = cache.at(track.start_frame + pos, j);
    out.distance = proj.distance / proj.lanes;
    if (velocities[pos].has_value()) {
        const Vec2& v = *velocities[pos];
        double n = v.norm();
        if (n > 0.0) out.direction = 1.0 - v.dot(proj.road_dir) / n;
    }
    return out;
}

EdgeFeatures edge_features(const ProjectionCache& cache, const Track& track,
                           const std::vector<std::optional<Vec2>>& velocities, int pos,
                           int half_window) {
    EdgeFeatures f;
    if (track.nodes[pos] == 0) return f;  // dummy source: neutral defaults
    MotionSimilarity sim = motion_similarity(velocities, pos, half_window);
    RoadPenalty road = road_penalties(cache, track, velocities, pos);
    f.gamma_m = sim.magnitude;
    f.gamma_theta = sim.direction;
    f.r_d = road.distance;
    f.r_theta = road.direction;
    return f;
}

double track_cost(const ProjectionCache& cache, const Track& track, const CostParams& params,
                  int window_span) {
    int lp = track.real_count();
    if (lp == 0) throw InternalError("track_cost: all-dummy track has no cost");
    std::vector<std::optional<Vec2>> v = track_velocities(track, cache.detections(), params.dt);

    // One term per window position: dummy positions pay the sigma_g share
    // (the penalty counts dummy nodes along the track); real positions pay
    // the motion and road terms, with Gamma and R_theta zero where the
    // velocity is undefined.
    double sum = 0.0;
    for (int f = 0; f < track.length(); ++f) {
        if (track.nodes[f] == 0) {
            sum += params.sigma_g / window_span;
            continue;
        }
        double gamma = 0.0;
        if (v[f].has_value()) {
            MotionSimilarity sim = motion_similarity(v, f, params.half_window);
            gamma = 1.0 - 0.5 * (sim.magnitude + sim.direction);
        }
        RoadPenalty road = road_penalties(cache, track, v, f);
        sum += (params.sigma_m * gamma + params.sigma_d * road.distance +
                params.sigma_theta * road.direction) /
               lp;
    }
    return -std::exp(-sum);
}

std::vector<double> CostEvaluator::costs(const std::vector<Track>& tracks,
                                         int window_span) const {
    std::vector<double> out;
    out.reserve(tracks.size());
    for (const Track& t : tracks) out.push_back(cost(t, window_span));
    return out;
}

}  // namespace spaam
