#include "spaam/solver.hpp"

#include "spaam/cost.hpp"
#include "spaam/errors.hpp"
#include "spaam/trellis.hpp"

#include <doctest.h>

#include <random>

using namespace spaam;

namespace {

RoadNetwork test_road() {
    std::vector<Road> roads{{1, 1, true, {{-1000, -300}, {1000, 300}}},
                            {2, 1, true, {{-1000, 300}, {1000, -300}}}};
    return RoadNetwork(std::move(roads));
}

AdjacencyRule all_rule(const FrameSet& fs) {
    return [&fs](const NodeRef& n) {
        std::vector<int> out;
        for (int b = 1; b <= fs.detections_in(n.frame + 1); ++b) out.push_back(b);
        return out;
    };
}

WindowProblem make_problem(const TrellisGraph& g, const ProjectionCache& cache,
                           const CostParams& params) {
    WindowProblem p;
    p.graph = &g;
    p.hypotheses = enumerate_tracks(g, 2);
    p.costs = CostEvaluator(cache, params).costs(p.hypotheses, g.frame_span());
    return p;
}

// Random instance in the acceptance-criterion regime: frames <= 4,
// detections <= 5, adjacency density 0.3..1.0.
struct RandomInstance {
    FrameSet detections;
    std::vector<std::vector<std::vector<int>>> adjacency;
};

RandomInstance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> frames_dist(2, 4), det_dist(0, 5);
    std::uniform_real_distribution<double> density(0.3, 1.0), coord(-80.0, 80.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    RandomInstance inst;
    int frames = frames_dist(rng);
    for (int f = 0; f < frames; ++f) {
        std::vector<Vec2> row;
        int d = det_dist(rng);
        for (int j = 0; j < d; ++j) row.push_back({coord(rng), coord(rng) / 4});
        inst.detections.frames.push_back(std::move(row));
    }
    double p = density(rng);
    inst.adjacency.resize(frames);
    for (int f = 0; f + 1 < frames; ++f) {
        inst.adjacency[f].resize(inst.detections.frames[f].size() + 1);
        for (std::size_t j = 1; j < inst.adjacency[f].size(); ++j) {
            for (int b = 1; b <= static_cast<int>(inst.detections.frames[f + 1].size()); ++b) {
                if (coin(rng) < p) inst.adjacency[f][j].push_back(b);
            }
        }
    }
    return inst;
}

}  // namespace

TEST_CASE("single chain: the full-length track is selected") {
    RoadNetwork net = test_road();
    FrameSet fs;
    fs.frames = {{{0, 0}}, {{12, 3.6}}, {{24, 7.2}}};
    ProjectionCache cache(net, fs);
    TrellisGraph g = build_trellis(fs, 1, 3, all_rule(fs));
    WindowProblem p = make_problem(g, cache, CostParams{});
    Solution s = solve_window(p);
    REQUIRE(s.selected.size() == 1);
    CHECK(p.hypotheses[s.selected[0]].nodes == std::vector<int>{1, 1, 1});
    CHECK(check_feasible(g, s.subgraph.tracks));
}

TEST_CASE("crossing vehicles: the motion-consistent pairing wins") {
    // Two constant-velocity vehicles on crossing roads; detections are
    // closest mid-sequence. The exhaustive oracle confirms the optimum keeps
    // identities.
    RoadNetwork net = test_road();
    FrameSet fs;
    for (int f = 0; f < 4; ++f) {
        double x = -45 + 30.0 * f;
        double y = 0.3 * x;
        fs.frames.push_back({{x, y}, {x, -y}});
    }
    ProjectionCache cache(net, fs);
    TrellisGraph g = build_trellis(fs, 1, 4, all_rule(fs));
    WindowProblem p = make_problem(g, cache, CostParams{});
    Solution s = solve_window(p);
    Solution oracle = brute_force_oracle(p);
    CHECK(s.total_cost == doctest::Approx(oracle.total_cost).epsilon(1e-12));
    CHECK(s.selected == oracle.selected);
    REQUIRE(s.selected.size() == 2);
    for (int id : s.selected) {
        const Track& t = p.hypotheses[id];
        CHECK(t.nodes == std::vector<int>(4, t.nodes[0]));  // no swap
    }
}

TEST_CASE("missed detection bridges through a dummy; spurious stays a singleton") {
    RoadNetwork net = test_road();
    FrameSet fs;
    fs.frames = {{{-45, -13.5}}, {{-15, -4.5}, {60, 200}}, {}, {{45, 13.5}}};
    ProjectionCache cache(net, fs);
    TrellisGraph g = build_trellis(fs, 1, 4, all_rule(fs));
    WindowProblem p = make_problem(g, cache, CostParams{});
    Solution s = solve_window(p);
    Solution oracle = brute_force_oracle(p);
    CHECK(s.selected == oracle.selected);
    bool found_bridge = false, found_spurious = false;
    for (int id : s.selected) {
        const Track& t = p.hypotheses[id];
        if (t.nodes == std::vector<int>{1, 1, 0, 1}) found_bridge = true;
        if (t.nodes == std::vector<int>{0, 2, 0, 0}) found_spurious = true;
    }
    CHECK(found_bridge);
    CHECK(found_spurious);
}

TEST_CASE("empty window: empty selection with zero cost") {
    RoadNetwork net = test_road();
    FrameSet fs;
    fs.frames = {{}, {}, {}};
    ProjectionCache cache(net, fs);
    TrellisGraph g = build_trellis(fs, 1, 3, all_rule(fs));
    WindowProblem p;
    p.graph = &g;
    Solution s = solve_window(p);
    CHECK(s.selected.empty());
    CHECK(s.total_cost == 0.0);
    CHECK(brute_force_oracle(p).total_cost == 0.0);
}

TEST_CASE("single hypothesis covering everything is selected") {
    FrameSet fs;
    fs.frames = {{{0, 0}}, {{1, 0}}};
    TrellisGraph g = build_trellis(fs, 1, 2, all_rule(fs));
    WindowProblem p;
    p.graph = &g;
    Track t;
    t.start_frame = 1;
    t.nodes = {1, 1};
    p.hypotheses = {t};
    p.costs = {-0.5};
    Solution s = solve_window(p);
    CHECK(s.selected == std::vector<int>{0});
    CHECK(s.total_cost == doctest::Approx(-0.5));
}

TEST_CASE("uncoverable node is an internal error") {
    FrameSet fs;
    fs.frames = {{{0, 0}}, {{1, 0}}};
    TrellisGraph g = build_trellis(fs, 1, 2, all_rule(fs));
    WindowProblem p;
    p.graph = &g;
    Track t;
    t.start_frame = 1;
    t.nodes = {1, 0};
    p.hypotheses = {t};  // frame 2's node is never covered
    p.costs = {-0.5};
    CHECK_THROWS_AS(solve_window(p), InternalError);
}

TEST_CASE("timeout raises a capacity-class error carrying the incumbent") {
    // Full-length hypotheses only, all equal cost: every selection ties, so
    // nothing prunes and the search tree is huge.
    FrameSet fs;
    for (int f = 0; f < 6; ++f) {
        std::vector<Vec2> row;
        for (int j = 0; j < 6; ++j) row.push_back({f * 10.0, j * 5.0});
        fs.frames.push_back(std::move(row));
    }
    TrellisGraph g = build_trellis(fs, 1, 6, all_rule(fs));
    WindowProblem p;
    p.graph = &g;
    for (const Track& t : enumerate_tracks(g, 1, 2'000'000)) {
        if (t.real_count() == 6) p.hypotheses.push_back(t);
    }
    p.costs.assign(p.hypotheses.size(), -0.25);
    SolveOptions opts;
    opts.timeout_seconds = 0.0;
    CHECK_THROWS_AS(solve_window(p, opts), TimeoutError);
}

TEST_CASE("oracle equivalence and determinism on random small instances") {
    RoadNetwork net = test_road();
    std::mt19937_64 rng(41);
    CostParams params;
    int solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        RandomInstance inst = random_instance(rng);
        ProjectionCache cache(net, inst.detections);
        auto rule = [&inst](const NodeRef& n) { return inst.adjacency[n.frame - 1][n.index]; };
        TrellisGraph g =
            build_trellis(inst.detections, 1, inst.detections.frame_count(), rule);
        if (g.total_real_nodes() == 0) continue;
        WindowProblem p = make_problem(g, cache, params);
        if (p.hypotheses.size() > 10000) continue;
        Solution a = solve_window(p);
        Solution b = brute_force_oracle(p);
        CHECK(std::abs(a.total_cost - b.total_cost) <= 1e-9);
        CHECK(a.selected == b.selected);
        CHECK(check_feasible(g, a.subgraph.tracks));
        Solution again = solve_window(p);
        CHECK(again.selected == a.selected);
        CHECK(again.total_cost == a.total_cost);
        ++solved;
    }
    CHECK(solved > 20);
}
