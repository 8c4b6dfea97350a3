#include "spaam/synth.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <random>

namespace spaam {

namespace {

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            double xcross = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) *
                                            (poly[i].x - poly[j].x);
            if (p.x < xcross) inside = !inside;
        }
    }
    return inside;
}

bool in_any_occluder(const Vec2& p, const std::vector<std::vector<Vec2>>& occluders) {
    for (const auto& poly : occluders) {
        if (point_in_polygon(p, poly)) return true;
    }
    return false;
}

struct Vehicle {
    int id = 0;
    int line = 0;
    double arc = 0.0;
    double base_speed = 10.0;
    double factor = 1.0;  // OU jitter around 1, clipped to [0.9, 1.1]
    bool alive = true;
};

}  // namespace

ScenarioData generate(const RoadNetwork& net, const ScenarioConfig& cfg) {
    if (cfg.n_frames < 2) throw InputError("generate: n_frames must be >= 2");
    if (cfg.miss_prob < 0.0 || cfg.miss_prob > 1.0) {
        throw InputError("generate: miss_prob must be in [0,1]");
    }
    if (cfg.noise_sigma < 0.0) throw InputError("generate: noise_sigma must be >= 0");

    double capacity = net.total_length() / 10.0;
    if (cfg.n_vehicles > capacity) {
        std::cerr << "warning: " << cfg.n_vehicles << " vehicles exceed the capacity heuristic ("
                  << static_cast<int>(capacity) << ") for this network\n";
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto& lines = net.directed_polylines();

    // Junction table: directed polylines departing from each endpoint.
    std::map<std::pair<double, double>, std::vector<int>> departures;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const Vec2& start = lines[li].points.front();
        departures[{start.x, start.y}].push_back(static_cast<int>(li));
    }

    auto pick_line_by_length = [&]() {
        double total = 0.0;
        for (std::size_t li = 0; li < lines.size(); ++li) total += net.line_length(li);
        double r = uniform(rng) * total;
        for (std::size_t li = 0; li < lines.size(); ++li) {
            r -= net.line_length(li);
            if (r <= 0.0) return static_cast<int>(li);
        }
        return static_cast<int>(lines.size()) - 1;
    };

    auto is_reverse_of = [&](int a, int b) {
        return lines[a].road_id == lines[b].road_id && lines[a].reversed != lines[b].reversed;
    };

    std::vector<Vehicle> vehicles;
    std::uniform_real_distribution<double> speed_dist(cfg.speed_min, cfg.speed_max);
    for (int k = 0; k < cfg.n_vehicles; ++k) {
        Vehicle v;
        v.id = k + 1;
        v.line = pick_line_by_length();
        v.arc = uniform(rng) * net.line_length(v.line);
        v.base_speed = speed_dist(rng);
        vehicles.push_back(v);
    }

    ScenarioData data;
    data.detections.frames.resize(cfg.n_frames);
    data.ground_truth.resize(cfg.n_frames);
    data.provenance.resize(cfg.n_frames);

    for (int frame = 1; frame <= cfg.n_frames; ++frame) {
        for (Vehicle& v : vehicles) {
            if (!v.alive) continue;
            Vec2 pos = net.point_at(v.line, v.arc);
            data.ground_truth[frame - 1].push_back({v.id, pos});

            bool detect = true;
            if (in_any_occluder(pos, cfg.occluders)) detect = false;
            double miss_draw = uniform(rng);  // always drawn: keeps streams aligned
            if (detect && miss_draw < cfg.miss_prob) detect = false;
            double nx = gauss(rng), ny = gauss(rng);
            if (detect) {
                data.detections.frames[frame - 1].push_back(
                    {pos.x + cfg.noise_sigma * nx, pos.y + cfg.noise_sigma * ny});
                data.provenance[frame - 1].push_back(v.id);
            }

            // Advance along the network; exceeding the cap keeps the travel
            // distance between consecutive positions within speed_max*dt.
            v.factor = std::clamp(v.factor + 0.3 * (1.0 - v.factor) + 0.05 * gauss(rng), 0.9, 1.1);
            double speed = std::clamp(v.base_speed * v.factor, cfg.speed_min, cfg.speed_max);
            double advance = speed * cfg.dt;
            while (advance > 0.0 && v.alive) {
                double remain = net.line_length(v.line) - v.arc;
                if (advance < remain) {
                    v.arc += advance;
                    advance = 0.0;
                    break;
                }
                advance -= remain;
                const Vec2& end = lines[v.line].points.back();
                auto it = departures.find({end.x, end.y});
                std::vector<int> options;
                if (it != departures.end()) {
                    for (int li : it->second) {
                        if (!is_reverse_of(li, v.line)) options.push_back(li);
                    }
                    if (options.empty()) options = it->second;  // dead end: U-turn if possible
                }
                if (options.empty()) {
                    v.alive = false;
                    break;
                }
                std::size_t pick = std::min<std::size_t>(
                    static_cast<std::size_t>(uniform(rng) * options.size()), options.size() - 1);
                v.line = options[pick];
                v.arc = 0.0;
            }
        }

        // Spurious detections: uniform along the network with a lateral offset.
        std::poisson_distribution<int> spurious_count(cfg.spurious_rate);
        int extra = cfg.spurious_rate > 0.0 ? spurious_count(rng) : 0;
        for (int s = 0; s < extra; ++s) {
            int line = pick_line_by_length();
            double arc = uniform(rng) * net.line_length(line);
            Vec2 dir;
            Vec2 pos = net.point_at(line, arc, &dir);
            double off = (2.0 * uniform(rng) - 1.0) * cfg.spurious_offset;
            Vec2 lateral{-dir.y, dir.x};
            Vec2 p = pos + lateral * off;
            data.detections.frames[frame - 1].push_back(p);
            data.provenance[frame - 1].push_back(0);
        }
    }
    return data;
}

Scenario make_preset(const std::string& name) {
    Scenario s;
    s.name = name;
    s.config.n_frames = 60;
    if (name == "seq1") {
        // Forked one-way roads: a trunk splitting into two slowly diverging
        // branches plus a feeder, with occluders over the trunk and one branch.
        s.roads = {
            {1, 2, true, {{-500, 0}, {-10, 0}}},
            {2, 1, true, {{-10, 0}, {150, 18}, {500, 64}}},
            {3, 1, true, {{-10, 0}, {150, -18}, {500, -64}}},
            {4, 1, true, {{-500, 140}, {-300, 60}, {-10, 0}}},
        };
        s.config.n_vehicles = 45;
        s.config.occluders = {
            {{-360, -12}, {-300, -12}, {-300, 12}, {-360, 12}},
            {{230, 12}, {290, 12}, {290, 44}, {230, 44}},
        };
    } else if (name == "seq2") {
        // Two-way grid; roads split at junctions so turns happen there.
        s.roads = {
            {1, 1, false, {{-300, 0}, {0, 0}}},
            {2, 1, false, {{0, 0}, {220, 0}}},
            {3, 1, false, {{220, 0}, {520, 0}}},
            {4, 1, false, {{-300, 220}, {0, 220}}},
            {5, 1, false, {{0, 220}, {220, 220}}},
            {6, 1, false, {{220, 220}, {520, 220}}},
            {7, 1, false, {{0, -200}, {0, 0}}},
            {8, 1, false, {{0, 0}, {0, 220}}},
            {9, 1, false, {{0, 220}, {0, 420}}},
            {10, 1, false, {{220, -200}, {220, 0}}},
            {11, 1, false, {{220, 0}, {220, 220}}},
            {12, 1, false, {{220, 220}, {220, 420}}},
        };
        s.config.n_vehicles = 48;
    } else if (name == "seq3") {
        // One-way ring with two one-way diagonals crossing without junctions
        // (over-bridges): trajectories cross at close range with no road
        // connectivity.
        s.roads = {
            {1, 1, true, {{0, 0}, {640, 0}}},
            {2, 1, true, {{640, 0}, {640, 320}}},
            {3, 1, true, {{640, 320}, {0, 320}}},
            {4, 1, true, {{0, 320}, {0, 0}}},
            {5, 1, true, {{40, -40}, {600, 360}}},
            {6, 1, true, {{600, -40}, {40, 360}}},
        };
        s.config.n_vehicles = 42;
    } else {
        throw InputError("unknown scenario preset: " + name + " (expected seq1, seq2 or seq3)");
    }
    return s;
}

}  // namespace spaam
