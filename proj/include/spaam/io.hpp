#pragma once

#include "spaam/confidence.hpp"
#include "spaam/metrics.hpp"
#include "spaam/spaam.hpp"
#include "spaam/trellis.hpp"

#include <filesystem>
#include <string>

namespace spaam::io {

/// Write-temp-then-rename; the target is never observed half-written.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

// Detections CSV: frame,index,x,y (meters); 1-based indices.
FrameSet read_detections_csv(const std::filesystem::path& path);
std::string detections_to_csv(const FrameSet& detections);

// Ground-truth CSV: frame,index,x,y,track_id.
LabeledFrames read_ground_truth_csv(const std::filesystem::path& path);
std::string ground_truth_to_csv(const LabeledFrames& gt);

// Output tracks CSV: track_id,frame,x,y,detection_index; detection_index 0
// marks a dummy (missed-detection bridge) row with empty coordinates.
// Leading/trailing dummy runs are trimmed.
std::string tracks_to_csv(const Subgraph& sub, const FrameSet& detections);
LabeledFrames read_tracks_csv(const std::filesystem::path& path);

std::string trace_to_json(const IterationTrace& trace);
IterationTrace read_trace_json(const std::filesystem::path& path);

std::string gmm_to_json(const GmmParams& params);
GmmParams read_gmm_json(const std::filesystem::path& path);

std::string mot_report_to_json(const MotReport& report);

}  // namespace spaam::io
