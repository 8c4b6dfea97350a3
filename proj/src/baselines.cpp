#include "spaam/baselines.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spaam {

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != n) {
            throw InternalError("solve_assignment: matrix not square");
        }
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

namespace {

struct OtState {
    std::vector<int> nodes;  // per frame so far; 0 = dummy
    int last_frame = 0;      // frame of the newest real node
    Vec2 last_pos;
    int prev_frame = 0;  // frame of the previous real node (0 = none)
    Vec2 prev_pos;
    int coast = 0;
    bool alive = true;
};

}  // namespace

Subgraph ot_track(const FrameSet& detections, const ProjectionCache& cache,
                  const CostParams& params, const OtParams& ot) {
    const RoadNetwork& net = cache.network();
    const int n = detections.frame_count();
    std::vector<OtState> tracks;

    auto start_track = [&](int frame, int j) {
        OtState t;
        t.nodes.assign(frame, 0);
        t.nodes[frame - 1] = j;
        t.last_frame = frame;
        t.last_pos = detections.location(frame, j);
        tracks.push_back(std::move(t));
    };

    for (int j = 1; j <= detections.detections_in(1); ++j) start_track(1, j);

    for (int frame = 2; frame <= n; ++frame) {
        const int d = detections.detections_in(frame);
        std::vector<int> active;
        for (std::size_t k = 0; k < tracks.size(); ++k) {
            if (tracks[k].alive) active.push_back(static_cast<int>(k));
        }
        const int rows = static_cast<int>(active.size());
        std::vector<int> match_det(d + 1, -1);  // detection j -> track index

        if (rows > 0 && d > 0) {
            // Square augmentation: track->miss on the diagonal of the right
            // block, detection->new-track at zero cost in the bottom block.
            const int size = rows + d;
            std::vector<std::vector<double>> m(size, std::vector<double>(size, 0.0));
            for (int r = 0; r < rows; ++r) {
                const OtState& t = tracks[active[r]];
                int gap = frame - t.last_frame;
                bool has_velocity = t.prev_frame > 0;
                Vec2 vel{0, 0};
                if (has_velocity) {
                    vel = (t.last_pos - t.prev_pos) /
                          (static_cast<double>(t.last_frame - t.prev_frame) * params.dt);
                }
                Vec2 pred = t.last_pos + vel * (static_cast<double>(gap) * params.dt);
                std::vector<Vec2> targets(detections.frames[frame - 1]);
                std::vector<double> reach = net.travel_distances(t.last_pos, targets);
                for (int j = 1; j <= d; ++j) {
                    double gate = ot.tau * gap;
                    if (reach[j - 1] > gate) {
                        m[r][j - 1] = kForbidden;
                        continue;
                    }
                    const Vec2& z = detections.location(frame, j);
                    const CenterlineProjection& proj = cache.at(frame, j);
                    double residual = distance(pred, z);
                    // Tracks without a velocity estimate predict in place;
                    // de-weight their residual so plausible first steps are
                    // not priced above a miss.
                    if (!has_velocity) residual *= 0.3;
                    double rd = proj.distance / proj.lanes;
                    Vec2 step = z - t.last_pos;
                    double rtheta = 0.0;
                    double sn = step.norm();
                    if (sn > 0.0) rtheta = 1.0 - step.dot(proj.road_dir) / sn;
                    m[r][j - 1] = residual + params.sigma_d * rd + params.sigma_theta * rtheta;
                }
                for (int c = 0; c < rows; ++c) {
                    m[r][d + c] = c == r ? ot.miss_cost : kForbidden;
                }
            }
            for (int jr = 0; jr < d; ++jr) {
                for (int c = 0; c < d; ++c) m[rows + jr][c] = c == jr ? 0.0 : kForbidden;
                for (int c = 0; c < rows; ++c) m[rows + jr][d + c] = 0.0;
            }
            std::vector<int> assign = solve_assignment(m);
            for (int r = 0; r < rows; ++r) {
                if (assign[r] < d) match_det[assign[r] + 1] = active[r];
            }
        }

        for (std::size_t k = 0; k < tracks.size(); ++k) tracks[k].nodes.push_back(0);
        for (int j = 1; j <= d; ++j) {
            int k = match_det[j];
            if (k < 0) {
                start_track(frame, j);
            } else {
                OtState& t = tracks[k];
                t.nodes[frame - 1] = j;
                t.prev_frame = t.last_frame;
                t.prev_pos = t.last_pos;
                t.last_frame = frame;
                t.last_pos = detections.location(frame, j);
                t.coast = 0;
            }
        }
        for (int k : (active)) {
            OtState& t = tracks[k];
            if (t.last_frame != frame) {
                if (++t.coast > ot.max_coast) t.alive = false;
            }
        }
    }

    Subgraph out;
    out.start_frame = 1;
    out.end_frame = n;
    for (OtState& t : tracks) {
        t.nodes.resize(n, 0);
        Track tr;
        tr.start_frame = 1;
        tr.nodes = std::move(t.nodes);
        out.tracks.push_back(std::move(tr));
    }
    return out;
}

double subgraph_cost(const Subgraph& sub, const ProjectionCache& cache,
                     const CostParams& params) {
    int span = sub.end_frame - sub.start_frame + 1;
    double sum = 0.0;
    for (const Track& t : sub.tracks) {
        if (t.real_count() == 0) continue;
        sum += track_cost(cache, t, params, span);
    }
    return sum;
}

IcmResult mda_icm(const FrameSet& detections, const ProjectionCache& cache,
                  const CostParams& params, double tau, Subgraph init, int max_sweeps) {
    const RoadNetwork& net = cache.network();
    IcmResult result;
    result.subgraph = std::move(init);
    Subgraph& sub = result.subgraph;
    const int span = sub.end_frame - sub.start_frame + 1;
    const int k = static_cast<int>(sub.tracks.size());
    result.sweep_costs.push_back(subgraph_cost(sub, cache, params));
    if (k == 0 || span < 2) return result;

    auto joined_cost = [&](const Track& prefix_track, const Track& suffix_track,
                           int cut) -> double {
        // cut: last frame offset taken from the prefix.
        Track t;
        t.start_frame = sub.start_frame;
        t.nodes.reserve(span);
        for (int f = 0; f <= cut; ++f) t.nodes.push_back(prefix_track.nodes[f]);
        for (int f = cut + 1; f < span; ++f) t.nodes.push_back(suffix_track.nodes[f]);
        if (t.real_count() == 0) return 0.0;  // no-vehicle pairing
        return track_cost(cache, t, params, span);
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (int cut = 0; cut + 1 < span; ++cut) {
            int frame = sub.start_frame + cut;
            std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
            double current = 0.0;
            for (int a = 0; a < k; ++a) {
                int na = sub.tracks[a].nodes[cut];
                for (int b = 0; b < k; ++b) {
                    int nb = sub.tracks[b].nodes[cut + 1];
                    bool allowed = true;
                    if (na != 0 && nb != 0) {
                        allowed = net.travel_distance(detections.location(frame, na),
                                                      detections.location(frame + 1, nb)) <= tau;
                    }
                    m[a][b] = allowed ? joined_cost(sub.tracks[a], sub.tracks[b], cut)
                                      : kForbidden;
                }
                current += m[a][a];
            }
            std::vector<int> assign = solve_assignment(m);
            double best = 0.0;
            for (int a = 0; a < k; ++a) best += m[a][assign[a]];
            if (best < current - 1e-12) {
                // Splice the suffixes according to the new pairing.
                std::vector<std::vector<int>> suffixes(k);
                for (int a = 0; a < k; ++a) {
                    suffixes[a].assign(sub.tracks[assign[a]].nodes.begin() + cut + 1,
                                       sub.tracks[assign[a]].nodes.end());
                }
                for (int a = 0; a < k; ++a) {
                    std::copy(suffixes[a].begin(), suffixes[a].end(),
                              sub.tracks[a].nodes.begin() + cut + 1);
                }
                changed = true;
            }
        }
        result.sweep_costs.push_back(subgraph_cost(sub, cache, params));
        ++result.sweeps;
        if (!changed) break;
    }
    return result;
}

}  // namespace spaam
