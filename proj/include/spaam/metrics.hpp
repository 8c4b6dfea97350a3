#pragma once

#include "spaam/geometry.hpp"
#include "spaam/trellis.hpp"

#include <string>
#include <vector>

namespace spaam {

struct LabeledPoint {
    int id = 0;
    Vec2 pos;
};

// Frame i's labeled points live at [i-1].
using LabeledFrames = std::vector<std::vector<LabeledPoint>>;

struct MotReport {
    int mostly_tracked = 0;
    int mostly_lost = 0;
    int partially_tracked = 0;
    int id_switches = 0;
    int fragments = 0;
    int false_negatives = 0;
    int false_positives = 0;
    int gt_tracks = 0;
    int gt_detections = 0;
    double mota = 0.0;

    struct TrackDetail {
        int gt_id = 0;
        int gt_length = 0;
        int matched = 0;
        double coverage = 0.0;
        int switches = 0;
        int fragments = 0;
        char category = 'P';  // 'M' mostly tracked, 'L' mostly lost, 'P' partial
    };
    std::vector<TrackDetail> details;
};

/// Per-frame greedy nearest matching within match_radius (ties by detection
/// index); coverage >80% MT, <20% ML, otherwise PT; IDS counts matched-id
/// changes between consecutive matched frames of a ground-truth track; Frag
/// counts maximal same-id matched runs shorter than 80% of the track length.
/// MOTA = 1 - (FN + FP + IDS) / GT detections.
MotReport evaluate(const LabeledFrames& estimated, const LabeledFrames& ground_truth,
                   double match_radius = 5.0);

/// Aligned-columns text table: MT ML PT IDS Frag MOTA.
std::string format_mot_table(const MotReport& report, const std::string& label);

/// Real nodes of the subgraph as labeled per-frame points; track ids are
/// 1-based positional.
LabeledFrames subgraph_to_labeled(const Subgraph& sub, const FrameSet& detections);

}  // namespace spaam
