#include "spaam/spaam.hpp"

#include "spaam/adjacency.hpp"
#include "spaam/baselines.hpp"
#include "spaam/errors.hpp"
#include "spaam/stochastic.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

namespace spaam {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::exception_ptr first_error;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int n = std::min(threads, count);
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<std::pair<int, int>> partition_frames(int n, int size) {
    std::vector<std::pair<int, int>> out;
    for (int ws = 1; ws <= n; ws += size) out.emplace_back(ws, std::min(ws + size - 1, n));
    return out;
}

int max_level(int n, int m, int q) {
    int level = 0;
    long long size = m;
    while (size < n) {
        size *= q;
        ++level;
    }
    return level;
}

std::vector<TrellisGraph> link_level(const FrameSet& detections, int n_frames,
                                     int prev_window_size, int window_size,
                                     const std::vector<Subgraph>& prev_solutions,
                                     const AdjacencyFn& base) {
    // Successors estimated by the previous level, across all its windows.
    // Real nodes keep their singleton estimate; dummy nodes keep the dummy
    // edges the previous solutions actually used (plus dummy-to-dummy), so
    // settled segments are not reopened away from the window seams.
    std::map<std::pair<int, int>, int> successor;
    std::map<int, std::set<int>> dummy_successors;
    auto prev_windows = partition_frames(n_frames, prev_window_size);
    if (prev_windows.size() != prev_solutions.size()) {
        throw InternalError("link_level: expected " + std::to_string(prev_windows.size()) +
                            " previous-level windows, got " +
                            std::to_string(prev_solutions.size()));
    }
    for (const Subgraph& sol : prev_solutions) {
        for (const Track& t : sol.tracks) {
            for (int f = 0; f + 1 < t.length(); ++f) {
                int frame = t.start_frame + f;
                if (t.nodes[f] != 0) {
                    successor[{frame, t.nodes[f]}] = t.nodes[f + 1];
                } else {
                    dummy_successors[frame].insert(t.nodes[f + 1]);
                }
            }
        }
    }

    auto rule = [&](const NodeRef& node) -> std::vector<int> {
        if (node.frame % prev_window_size == 0) return base(node);
        if (node.index == 0) {
            std::vector<int> out{0};
            auto it = dummy_successors.find(node.frame);
            if (it != dummy_successors.end()) out.assign(it->second.begin(), it->second.end());
            if (!std::count(out.begin(), out.end(), 0)) out.push_back(0);
            return out;
        }
        auto it = successor.find({node.frame, node.index});
        if (it == successor.end()) {
            throw InternalError("link_level: node (" + std::to_string(node.frame) + "," +
                                std::to_string(node.index) +
                                ") missing from the previous-level solution");
        }
        return {it->second};
    };

    std::vector<TrellisGraph> graphs;
    for (auto [ws, we] : partition_frames(n_frames, window_size)) {
        graphs.push_back(build_trellis_explicit(detections, ws, we, rule));
    }
    return graphs;
}

SpaamResult spaam_run(const ProjectionCache& cache, const CostParams& cost_params,
                      const SpaamConfig& cfg, const Subgraph* init) {
    const FrameSet& detections = cache.detections();
    const RoadNetwork& net = cache.network();
    const int n = detections.frame_count();
    if (n < 2) throw InputError("spaam_run: need at least 2 frames");
    if (cfg.initial_window < 2) throw InputError("spaam_run: initial window must be >= 2");
    if (cfg.branching < 2) throw InputError("spaam_run: branching factor must be >= 2");

    CostEvaluator evaluator(cache, cost_params);
    AdjacencyRule reach = road_reachability_rule(net, detections, cfg.tau);
    auto full_next = [&detections](int frame) {
        std::vector<int> out(detections.detections_in(frame + 1) + 1);
        for (std::size_t b = 0; b < out.size(); ++b) out[b] = static_cast<int>(b);
        return out;
    };
    // Level-0 candidate sets: dummies connect to the whole next frame, real
    // nodes to the dummy plus their road-reachable candidates.
    AdjacencyFn cold = [&reach, &full_next](const NodeRef& node) {
        if (node.index == 0) return full_next(node.frame);
        std::vector<int> out = reach(node);
        out.push_back(0);
        std::sort(out.begin(), out.end());
        return out;
    };

    SpaamResult result;
    Subgraph current;
    bool warm = false;
    if (init && !cfg.cold_start) {
        current = *init;
        warm = true;
    }

    for (int t = 1; t <= cfg.max_iters; ++t) {
        auto started = std::chrono::steady_clock::now();
        const int m = std::min(cfg.initial_window + (t - 1), n);

        IterationStats stats;
        stats.iteration = t;
        stats.window_size = m;

        std::map<std::pair<int, int>, std::vector<int>> base_map;
        AdjacencyFn base = cold;
        if (warm) {
            ConfidenceMap conf;
            if (cfg.confidence_mode == SpaamConfig::ConfidenceMode::Marginal) {
                MarginalEstimateOptions mopts;
                mopts.window = m;
                mopts.enum_cap = cfg.confidence_enum_cap;
                mopts.max_consecutive_dummies = cfg.max_consecutive_dummies;
                mopts.tau = cfg.tau;
                conf = estimate_confidence_marginal(current, cache, cost_params, mopts);
            } else {
                conf = estimate_confidence_gmm(current, cache, cost_params, cfg.gmm);
            }
            DisassociationResult dis =
                disassociate(current, conf, net, detections, cfg.tau, mix_seed(cfg.seed, t));
            stats.edges_retained = dis.retained;
            stats.edges_dissolved = dis.dissolved;
            base_map = std::move(dis.adjacency);
            base = [&base_map, &cold, &full_next](const NodeRef& node) -> std::vector<int> {
                if (node.index == 0) return full_next(node.frame);
                auto it = base_map.find({node.frame, node.index});
                if (it != base_map.end()) return it->second;
                // Nodes without an estimated association (none in a feasible
                // subgraph) fall back to the reachability candidates.
                return cold(node);
            };
        }

        const int levels = max_level(n, m, cfg.branching);
        std::vector<Subgraph> prev_solutions;
        int prev_size = 0;
        for (int level = 0; level <= levels; ++level) {
            long long size_ll = m;
            for (int i = 0; i < level; ++i) size_ll *= cfg.branching;
            const int size = static_cast<int>(std::min<long long>(size_ll, n));

            std::vector<TrellisGraph> graphs;
            std::function<bool(int)> reentry;  // level 0: everywhere
            if (level == 0) {
                for (auto [ws, we] : partition_frames(n, size)) {
                    graphs.push_back(build_trellis_explicit(detections, ws, we, base));
                }
            } else {
                graphs = link_level(detections, n, prev_size, size, prev_solutions, base);
                // Settled segments are only re-linked at the previous level's
                // window seams.
                int seam = prev_size;
                reentry = [seam](int frame) { return (frame - 1) % seam == 0; };
            }
            stats.windows_per_level.push_back(static_cast<int>(graphs.size()));

            std::vector<Subgraph> solutions(graphs.size());
            try {
                parallel_for(static_cast<int>(graphs.size()), cfg.threads, [&](int w) {
                    WindowProblem problem;
                    problem.graph = &graphs[w];
                    problem.hypotheses = enumerate_tracks(graphs[w], cfg.max_consecutive_dummies,
                                                          cfg.hypothesis_cap, reentry);
                    problem.costs = evaluator.costs(problem.hypotheses, graphs[w].frame_span());
                    SolveOptions sopts;
                    sopts.timeout_seconds = cfg.solver_timeout_seconds;
                    solutions[w] = solve_window(problem, sopts).subgraph;
                });
            } catch (const Error& e) {
                throw Error(e.error_class(),
                            "iteration " + std::to_string(t) + ", level " +
                                std::to_string(level) + ": " + e.what());
            }
            prev_solutions = std::move(solutions);
            prev_size = size;
        }

        current = std::move(prev_solutions.front());
        warm = true;
        stats.total_cost = subgraph_cost(current, cache, cost_params);
        stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.trace.iterations.push_back(std::move(stats));

        // Converged: nothing was reopened, so further iterations cannot move.
        if (t > 1 && result.trace.iterations.back().edges_dissolved == 0) break;
    }

    result.subgraph = std::move(current);
    return result;
}

}  // namespace spaam
