#include "spaam/metrics.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace spaam {

MotReport evaluate(const LabeledFrames& estimated, const LabeledFrames& ground_truth,
                   double match_radius) {
    if (match_radius <= 0.0) throw InputError("evaluate: match_radius must be > 0");
    std::size_t gt_points = 0;
    for (const auto& f : ground_truth) gt_points += f.size();
    if (gt_points == 0) throw InputError("evaluate: ground truth is empty");

    const int frames = static_cast<int>(std::max(estimated.size(), ground_truth.size()));
    std::size_t est_points = 0;
    std::size_t matches = 0;

    // Per GT track: frame -> matched estimate id, plus the track's own frames.
    std::map<int, std::map<int, int>> matched_by_track;
    std::map<int, std::vector<int>> gt_frames;

    for (int fi = 0; fi < frames; ++fi) {
        const auto& gts = fi < static_cast<int>(ground_truth.size()) ? ground_truth[fi]
                                                                     : std::vector<LabeledPoint>{};
        const auto& ests = fi < static_cast<int>(estimated.size()) ? estimated[fi]
                                                                   : std::vector<LabeledPoint>{};
        est_points += ests.size();
        for (const auto& g : gts) gt_frames[g.id].push_back(fi + 1);

        // Greedy nearest pairs within radius; (distance, gt index, est index).
        std::vector<std::tuple<double, int, int>> pairs;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            for (std::size_t ei = 0; ei < ests.size(); ++ei) {
                double d = distance(gts[gi].pos, ests[ei].pos);
                if (d <= match_radius) {
                    pairs.emplace_back(d, static_cast<int>(gi), static_cast<int>(ei));
                }
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<char> gt_used(gts.size(), 0), est_used(ests.size(), 0);
        for (const auto& [d, gi, ei] : pairs) {
            (void)d;
            if (gt_used[gi] || est_used[ei]) continue;
            gt_used[gi] = est_used[ei] = 1;
            ++matches;
            matched_by_track[gts[gi].id][fi + 1] = ests[ei].id;
        }
    }

    MotReport report;
    report.gt_detections = static_cast<int>(gt_points);
    report.gt_tracks = static_cast<int>(gt_frames.size());
    report.false_negatives = static_cast<int>(gt_points - matches);
    report.false_positives = static_cast<int>(est_points - matches);

    for (auto& [id, frames_of_track] : gt_frames) {
        std::sort(frames_of_track.begin(), frames_of_track.end());
        const auto& matched = matched_by_track[id];

        MotReport::TrackDetail detail;
        detail.gt_id = id;
        detail.gt_length = static_cast<int>(frames_of_track.size());
        detail.matched = static_cast<int>(matched.size());
        detail.coverage = static_cast<double>(detail.matched) / detail.gt_length;

        int prev_id = 0;
        bool have_prev = false;
        int run_len = 0, run_id = 0;
        auto close_run = [&]() {
            if (run_len > 0 && run_len < 0.8 * detail.gt_length) ++detail.fragments;
            run_len = 0;
        };
        for (int frame : frames_of_track) {
            auto it = matched.find(frame);
            if (it == matched.end()) {
                close_run();
                continue;
            }
            if (have_prev && it->second != prev_id) ++detail.switches;
            prev_id = it->second;
            have_prev = true;
            if (run_len > 0 && it->second != run_id) close_run();
            run_id = it->second;
            ++run_len;
        }
        close_run();

        // Strict thresholds: coverage of exactly 0.8 or 0.2 is PT.
        if (detail.coverage > 0.8) {
            detail.category = 'M';
            ++report.mostly_tracked;
        } else if (detail.coverage < 0.2) {
            detail.category = 'L';
            ++report.mostly_lost;
        } else {
            detail.category = 'P';
            ++report.partially_tracked;
        }
        report.id_switches += detail.switches;
        report.fragments += detail.fragments;
        report.details.push_back(detail);
    }

    report.mota = 1.0 - static_cast<double>(report.false_negatives + report.false_positives +
                                            report.id_switches) /
                            report.gt_detections;
    return report;
}

std::string format_mot_table(const MotReport& r, const std::string& label) {
    std::ostringstream os;
    auto row = [&os](const std::string& a, const std::string& b, const std::string& c,
                     const std::string& d, const std::string& e, const std::string& f,
                     const std::string& g) {
        os << "| ";
        os.width(12);
        os << std::left << a << " | ";
        for (const std::string* col : {&b, &c, &d, &e, &f}) {
            os.width(5);
            os << std::right << *col << " | ";
        }
        os.width(9);
        os << std::right << g << " |\n";
    };
    row("Method", "MT", "ML", "PT", "IDS", "Frag", "MOTA");
    os << "|--------------|-------|-------|-------|-------|-------|-----------|\n";
    std::ostringstream mota;
    mota.precision(6);
    mota << std::fixed << r.mota;
    row(label, std::to_string(r.mostly_tracked), std::to_string(r.mostly_lost),
        std::to_string(r.partially_tracked), std::to_string(r.id_switches),
        std::to_string(r.fragments), mota.str());
    return os.str();
}

LabeledFrames subgraph_to_labeled(const Subgraph& sub, const FrameSet& detections) {
    LabeledFrames out(detections.frame_count());
    int id = 0;
    for (const Track& t : sub.tracks) {
        if (t.real_count() == 0) continue;
        ++id;
        for (int f = 0; f < t.length(); ++f) {
            if (t.nodes[f] == 0) continue;
            int frame = t.start_frame + f;
            out[frame - 1].push_back({id, detections.location(frame, t.nodes[f])});
        }
    }
    return out;
}

}  // namespace spaam
