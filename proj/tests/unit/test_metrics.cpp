#include "spaam/metrics.hpp"

#include "spaam/errors.hpp"

#include <doctest.h>

#include <random>

using namespace spaam;

namespace {

LabeledFrames straight_gt(int tracks, int frames) {
    LabeledFrames out(frames);
    for (int f = 0; f < frames; ++f) {
        for (int k = 1; k <= tracks; ++k) {
            out[f].push_back({k, {10.0 * f, 20.0 * k}});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("identical estimate: MT everywhere, MOTA 1") {
    LabeledFrames gt = straight_gt(3, 10);
    MotReport r = evaluate(gt, gt, 5.0);
    CHECK(r.mostly_tracked == 3);
    CHECK(r.mostly_lost == 0);
    CHECK(r.partially_tracked == 0);
    CHECK(r.id_switches == 0);
    CHECK(r.fragments == 0);
    CHECK(r.mota == doctest::Approx(1.0));
}

TEST_CASE("9 of 10 matched is mostly tracked; 1 of 10 is mostly lost") {
    LabeledFrames gt = straight_gt(1, 10);
    LabeledFrames est9 = gt;
    est9[4].clear();  // drop one frame: coverage 0.9 > 0.8
    MotReport r9 = evaluate(est9, gt, 5.0);
    CHECK(r9.mostly_tracked == 1);

    LabeledFrames est1(10);
    est1[0] = gt[0];  // coverage 0.1 < 0.2
    MotReport r1 = evaluate(est1, gt, 5.0);
    CHECK(r1.mostly_lost == 1);
}

TEST_CASE("coverage exactly 0.8 or 0.2 classifies as partially tracked") {
    LabeledFrames gt = straight_gt(1, 10);
    LabeledFrames est8(10), est2(10);
    for (int f = 0; f < 8; ++f) est8[f] = gt[f];
    for (int f = 0; f < 2; ++f) est2[f] = gt[f];
    CHECK(evaluate(est8, gt, 5.0).partially_tracked == 1);
    CHECK(evaluate(est2, gt, 5.0).partially_tracked == 1);
}

TEST_CASE("identity swap costs one switch per ground-truth track") {
    // Hand-walked 4-frame instance: two GT tracks, estimates swap ids at
    // frame 3, one switch each.
    LabeledFrames gt = straight_gt(2, 4);
    LabeledFrames est = gt;
    for (int f = 2; f < 4; ++f) {
        est[f][0].id = 2;
        est[f][1].id = 1;
    }
    MotReport r = evaluate(est, gt, 5.0);
    CHECK(r.id_switches == 2);
    CHECK(r.false_negatives == 0);
    CHECK(r.false_positives == 0);
    CHECK(r.mota == doctest::Approx(1.0 - 2.0 / 8.0));
}

TEST_CASE("fragments: runs shorter than 80% of the track") {
    // 10-frame GT; the estimate covers frames 1-4 and 6-10 with the same id:
    // two maximal runs (4 and 5 frames), both below 8 frames.
    LabeledFrames gt = straight_gt(1, 10);
    LabeledFrames est = gt;
    est[4].clear();
    MotReport r = evaluate(est, gt, 5.0);
    CHECK(r.fragments == 2);
    CHECK(r.mostly_tracked == 1);  // still 0.9 coverage
}

TEST_CASE("empty ground truth is an input error") {
    LabeledFrames gt(5);
    CHECK_THROWS_AS(evaluate(straight_gt(1, 5), gt, 5.0), InputError);
}

TEST_CASE("classification partitions the ground-truth tracks") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    LabeledFrames gt = straight_gt(6, 12);
    LabeledFrames est(12);
    for (int f = 0; f < 12; ++f) {
        for (const auto& p : gt[f]) {
            if (coin(rng) < 0.6) est[f].push_back({p.id + (coin(rng) < 0.2 ? 7 : 0), p.pos});
        }
    }
    MotReport r = evaluate(est, gt, 5.0);
    CHECK(r.mostly_tracked + r.mostly_lost + r.partially_tracked == r.gt_tracks);
    CHECK(r.mota <= 1.0);
}

TEST_CASE("metrics are invariant to estimate id relabeling") {
    LabeledFrames gt = straight_gt(3, 8);
    LabeledFrames est = gt;
    est[3][1].pos.x += 100;  // a stray false positive + miss
    MotReport a = evaluate(est, gt, 5.0);
    LabeledFrames relabeled = est;
    for (auto& frame : relabeled) {
        for (auto& p : frame) p.id = 1000 - p.id * 13;
    }
    MotReport b = evaluate(relabeled, gt, 5.0);
    CHECK(a.mostly_tracked == b.mostly_tracked);
    CHECK(a.mostly_lost == b.mostly_lost);
    CHECK(a.partially_tracked == b.partially_tracked);
    CHECK(a.id_switches == b.id_switches);
    CHECK(a.fragments == b.fragments);
    CHECK(a.mota == doctest::Approx(b.mota));
}

TEST_CASE("mota is 1 only when there are no errors") {
    LabeledFrames gt = straight_gt(2, 6);
    MotReport perfect = evaluate(gt, gt, 5.0);
    CHECK(perfect.mota == doctest::Approx(1.0));
    LabeledFrames est = gt;
    est[0].push_back({9, {500, 500}});  // one FP
    MotReport r = evaluate(est, gt, 5.0);
    CHECK(r.mota < 1.0);
    CHECK(r.false_positives == 1);
}

TEST_CASE("table output lists the Table-I column set") {
    MotReport r = evaluate(straight_gt(2, 6), straight_gt(2, 6), 5.0);
    std::string table = format_mot_table(r, "test");
    for (const char* col : {"MT", "ML", "PT", "IDS", "Frag", "MOTA"}) {
        CHECK(table.find(col) != std::string::npos);
    }
}
