#pragma once

#include "spaam/metrics.hpp"
#include "spaam/roadnet.hpp"
#include "spaam/trellis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spaam {

struct ScenarioConfig {
    int n_vehicles = 40;
    int n_frames = 60;
    double dt = 1.0;
    double speed_min = 9.0;   // m/s
    double speed_max = 15.0;  // m/s
    double noise_sigma = 0.35;
    double miss_prob = 0.05;
    double spurious_rate = 1.0;    // expected spurious detections per frame
    double spurious_offset = 15.0; // lateral corridor around roads
    std::vector<std::vector<Vec2>> occluders;  // polygons; detections inside are dropped
    uint64_t seed = 0;
};

struct ScenarioData {
    FrameSet detections;
    LabeledFrames ground_truth;
    // provenance[i-1][j-1]: GT track id of detection (i,j); 0 for spurious.
    std::vector<std::vector<int>> provenance;
};

/// Road-constrained scenario: vehicles follow directed polylines at smoothly
/// varying speed and turn uniformly at junctions; detections are the true
/// positions plus isotropic Gaussian noise, dropped with miss_prob or inside
/// occluders; spurious detections are uniform near roads. Reproducible from
/// the seed.
ScenarioData generate(const RoadNetwork& net, const ScenarioConfig& cfg);

struct Scenario {
    std::string name;
    std::vector<Road> roads;
    ScenarioConfig config;
};

/// Bundled presets: seq1 forked one-way roads with occluders, seq2 two-way
/// grid, seq3 one-way ring with unconnected crossings. 60 frames each.
Scenario make_preset(const std::string& name);

}  // namespace spaam
