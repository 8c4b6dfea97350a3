#include "spaam/synth.hpp"

#include "spaam/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace spaam;

TEST_CASE("noiseless single vehicle: detections lie on the road and equal the GT") {
    Scenario s = make_preset("seq3");
    RoadNetwork net(s.roads);
    ScenarioConfig cfg = s.config;
    cfg.n_vehicles = 1;
    cfg.n_frames = 20;
    cfg.noise_sigma = 0.0;
    cfg.miss_prob = 0.0;
    cfg.spurious_rate = 0.0;
    cfg.seed = 5;
    ScenarioData data = generate(net, cfg);
    int total = 0;
    for (int f = 1; f <= cfg.n_frames; ++f) {
        int d = data.detections.detections_in(f);
        int g = static_cast<int>(data.ground_truth[f - 1].size());
        CHECK(d == g);
        for (int j = 1; j <= d; ++j) {
            const Vec2& p = data.detections.location(f, j);
            CHECK(net.project_to_centerline(p).distance < 1e-6);
            CHECK(distance(p, data.ground_truth[f - 1][j - 1].pos) < 1e-12);
            ++total;
        }
    }
    CHECK(total > 0);
}

TEST_CASE("occluders suppress every detection inside them") {
    std::vector<Road> roads{{1, 1, true, {{0, 0}, {1000, 0}}}};
    RoadNetwork net(roads);
    ScenarioConfig cfg;
    cfg.n_vehicles = 10;
    cfg.n_frames = 30;
    cfg.noise_sigma = 0.0;
    cfg.miss_prob = 0.0;
    cfg.spurious_rate = 0.0;
    cfg.occluders = {{{200, -10}, {400, -10}, {400, 10}, {200, 10}}};
    cfg.seed = 11;
    ScenarioData data = generate(net, cfg);
    bool saw_occluded_gt = false;
    for (int f = 1; f <= cfg.n_frames; ++f) {
        for (const auto& g : data.ground_truth[f - 1]) {
            if (g.pos.x > 200 && g.pos.x < 400) saw_occluded_gt = true;
        }
        for (int j = 1; j <= data.detections.detections_in(f); ++j) {
            const Vec2& p = data.detections.location(f, j);
            CHECK(!(p.x > 200 && p.x < 400));
        }
    }
    CHECK(saw_occluded_gt);  // the occluder actually covered traffic
}

TEST_CASE("empirical miss rate stays within 3 sigma of the configured rate") {
    Scenario s = make_preset("seq3");
    RoadNetwork net(s.roads);
    ScenarioConfig cfg = s.config;
    cfg.n_vehicles = 60;
    cfg.n_frames = 60;
    cfg.miss_prob = 0.1;
    cfg.spurious_rate = 0.0;
    cfg.seed = 99;
    ScenarioData data = generate(net, cfg);
    std::size_t gt_points = 0, detected = 0;
    for (const auto& f : data.ground_truth) gt_points += f.size();
    for (const auto& f : data.detections.frames) detected += f.size();
    REQUIRE(gt_points >= 2500);  // some vehicles exit on the open diagonals
    double n = static_cast<double>(gt_points);
    double missed = n - static_cast<double>(detected);
    double sigma = std::sqrt(n * 0.1 * 0.9);
    CHECK(std::abs(missed - 0.1 * n) <= 3 * sigma);
}

TEST_CASE("same seed reproduces the scenario exactly") {
    Scenario s = make_preset("seq1");
    RoadNetwork net(s.roads);
    ScenarioConfig cfg = s.config;
    cfg.seed = 123;
    ScenarioData a = generate(net, cfg);
    ScenarioData b = generate(net, cfg);
    REQUIRE(a.detections.frames.size() == b.detections.frames.size());
    for (std::size_t f = 0; f < a.detections.frames.size(); ++f) {
        REQUIRE(a.detections.frames[f].size() == b.detections.frames[f].size());
        for (std::size_t j = 0; j < a.detections.frames[f].size(); ++j) {
            CHECK(a.detections.frames[f][j] == b.detections.frames[f][j]);
        }
    }
    CHECK(a.provenance == b.provenance);
}

TEST_CASE("GT tracks respect the road-speed bound between consecutive frames") {
    Scenario s = make_preset("seq2");
    RoadNetwork net(s.roads);
    ScenarioConfig cfg = s.config;
    cfg.n_vehicles = 20;
    cfg.n_frames = 25;
    cfg.seed = 7;
    ScenarioData data = generate(net, cfg);
    std::map<int, std::map<int, Vec2>> by_track;
    for (int f = 1; f <= cfg.n_frames; ++f) {
        for (const auto& p : data.ground_truth[f - 1]) by_track[p.id][f] = p.pos;
    }
    const double bound = cfg.speed_max * cfg.dt * 1.01;
    int checked = 0;
    for (const auto& [id, frames] : by_track) {
        for (auto it = frames.begin(); it != frames.end(); ++it) {
            auto next = std::next(it);
            if (next == frames.end() || next->first != it->first + 1) continue;
            double d = net.travel_distance(it->second, next->second);
            CHECK(d <= bound);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("provenance links detections to their ground-truth tracks") {
    Scenario s = make_preset("seq1");
    RoadNetwork net(s.roads);
    ScenarioConfig cfg = s.config;
    cfg.noise_sigma = 0.5;
    cfg.spurious_rate = 2.0;
    cfg.seed = 21;
    ScenarioData data = generate(net, cfg);
    int spurious = 0, real = 0;
    for (int f = 1; f <= cfg.n_frames; ++f) {
        REQUIRE(data.provenance[f - 1].size() ==
                static_cast<std::size_t>(data.detections.detections_in(f)));
        for (std::size_t j = 0; j < data.provenance[f - 1].size(); ++j) {
            int id = data.provenance[f - 1][j];
            if (id == 0) {
                ++spurious;
                continue;
            }
            ++real;
            bool found = false;
            for (const auto& g : data.ground_truth[f - 1]) {
                if (g.id == id) {
                    CHECK(distance(g.pos, data.detections.location(f, j + 1)) < 5 * 0.5 + 1e-9);
                    found = true;
                }
            }
            CHECK(found);
        }
    }
    CHECK(spurious > 0);
    CHECK(real > 1000);
}

TEST_CASE("invalid parameters are input errors; unknown preset too") {
    std::vector<Road> roads{{1, 1, true, {{0, 0}, {100, 0}}}};
    RoadNetwork net(roads);
    ScenarioConfig cfg;
    cfg.n_frames = 1;
    CHECK_THROWS_AS(generate(net, cfg), InputError);
    CHECK_THROWS_AS(make_preset("seq9"), InputError);
}
