#include "spaam/stochastic.hpp"

#include "spaam/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace spaam;

namespace {

struct Fixture {
    RoadNetwork net;
    FrameSet detections;
    Subgraph sub;

    // `tracks` horizontal vehicles over `frames` frames, 20 m apart in y,
    // 10 m steps in x; every track fully real (no forced boundary edges).
    Fixture(int tracks, int frames)
        : net(std::vector<Road>{{1, 1, true, {{-100000, 0}, {100000, 0}}}}) {
        for (int f = 0; f < frames; ++f) {
            std::vector<Vec2> row;
            for (int k = 0; k < tracks; ++k) {
                row.push_back({10.0 * f, 0.1 * k});  // all near the road
            }
            detections.frames.push_back(std::move(row));
        }
        sub.start_frame = 1;
        sub.end_frame = frames;
        for (int k = 0; k < tracks; ++k) {
            Track t;
            t.start_frame = 1;
            t.nodes.assign(frames, k + 1);
            sub.tracks.push_back(std::move(t));
        }
    }

    ConfidenceMap constant_conf(double p) const {
        ConfidenceMap conf;
        for (const auto& e : sub.edges()) conf[e] = p;
        return conf;
    }
};

}  // namespace

TEST_CASE("confidence 1: everything retained, singleton adjacency") {
    Fixture fx(3, 4);
    DisassociationResult r = disassociate(fx.sub, fx.constant_conf(1.0), fx.net, fx.detections,
                                          25.0, 42);
    CHECK(r.dissolved == 0);
    CHECK(r.retained == static_cast<int>(fx.sub.edges().size()));
    for (const auto& d : r.disassociated) CHECK(d.empty());
    for (const auto& [node, adj] : r.adjacency) CHECK(adj.size() == 1);
}

TEST_CASE("confidence 0: everything dissolved, Eq.-9 candidate sets") {
    Fixture fx(3, 4);
    const double tau = 25.0;
    DisassociationResult r = disassociate(fx.sub, fx.constant_conf(0.0), fx.net, fx.detections,
                                          tau, 42);
    CHECK(r.retained == 0);
    for (int frame = 2; frame <= 4; ++frame) {
        CHECK(r.disassociated[frame - 1].size() == 3);  // every successor released
    }
    for (const auto& [node, adj] : r.adjacency) {
        auto [frame, a] = node;
        CHECK(adj.front() == 0);  // dummy always present
        for (int b : adj) {
            if (b == 0) continue;
            // Containment: dissolved members within road travel distance tau.
            const auto& pool = r.disassociated[frame];
            CHECK(std::count(pool.begin(), pool.end(), b) == 1);
            CHECK(fx.net.travel_distance(fx.detections.location(frame, a),
                                         fx.detections.location(frame + 1, b)) <= tau);
        }
    }
}

TEST_CASE("determinism: identical inputs and seed give identical results") {
    Fixture fx(4, 6);
    ConfidenceMap conf = fx.constant_conf(0.5);
    DisassociationResult a = disassociate(fx.sub, conf, fx.net, fx.detections, 25.0, 7);
    DisassociationResult b = disassociate(fx.sub, conf, fx.net, fx.detections, 25.0, 7);
    CHECK(a.retained == b.retained);
    CHECK(a.disassociated == b.disassociated);
    CHECK(a.adjacency == b.adjacency);
    DisassociationResult c = disassociate(fx.sub, conf, fx.net, fx.detections, 25.0, 8);
    CHECK((a.retained != c.retained || a.adjacency != c.adjacency));
}

TEST_CASE("retention rate tracks the confidence (3-sigma band)") {
    Fixture fx(5, 120);  // 5 * 119 = 595 edges
    const double p = 0.5;
    DisassociationResult r = disassociate(fx.sub, fx.constant_conf(p), fx.net, fx.detections,
                                          25.0, 1234);
    double n = static_cast<double>(r.retained + r.dissolved);
    double sigma = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(r.retained - n * p) <= 3 * sigma);
}

TEST_CASE("leading and trailing dummy-run boundary edges are always dissolved") {
    Fixture fx(1, 5);
    // Rebuild the single track with leading and trailing dummies.
    fx.sub.tracks[0].nodes = {0, 1, 1, 1, 0};
    fx.detections.frames[0].clear();
    fx.detections.frames[4].clear();
    ConfidenceMap conf = fx.constant_conf(1.0);
    DisassociationResult r = disassociate(fx.sub, conf, fx.net, fx.detections, 25.0, 3);
    // Edge (1,0)->(2,1) forced open: successor released.
    CHECK(r.disassociated[1] == std::vector<int>{1});
    // Edge (4,1)->(5,0) forced open: source gets the candidate set.
    REQUIRE(r.adjacency.count({4, 1}));
    CHECK(r.adjacency.at({4, 1}).front() == 0);
    // Interior edges retained (confidence 1).
    CHECK(r.adjacency.at({2, 1}) == std::vector<int>{1});
}

TEST_CASE("missing confidence entry is an error naming the edge") {
    Fixture fx(2, 3);
    ConfidenceMap conf;  // empty
    try {
        disassociate(fx.sub, conf, fx.net, fx.detections, 25.0, 1);
        FAIL("expected InternalError");
    } catch (const InternalError& e) {
        CHECK(std::string(e.what()).find("missing confidence") != std::string::npos);
    }
}
