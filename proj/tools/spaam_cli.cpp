// spaam: road-constrained multi-frame vehicle tracking from the command line.
//   track  estimate tracks from detections + a road network
//   eval   score estimated tracks against ground truth
//   synth  generate a synthetic scenario (bundled presets or custom)
//   plot   render trace curves as SVG

#include "spaam/adjacency.hpp"
#include "spaam/baselines.hpp"
#include "spaam/config.hpp"
#include "spaam/errors.hpp"
#include "spaam/io.hpp"
#include "spaam/kernels.hpp"
#include "spaam/metrics.hpp"
#include "spaam/spaam.hpp"
#include "spaam/synth.hpp"
#include "spaam/svg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace spaam;

namespace {

struct TrackOutputs {
    Subgraph subgraph;
    IterationTrace trace;
};

GmmParams obtain_gmm_params(const RunConfig& cfg, const RoadNetwork& net, const Subgraph& init,
                            const ProjectionCache& cache) {
    if (!cfg.gmm_params.empty()) return io::read_gmm_json(cfg.gmm_params);

    std::vector<Eigen::Vector4d> labeled;
    std::optional<ProjectionCache> train_cache;
    std::optional<FrameSet> train_dets;
    if (!cfg.train_gt.empty()) {
        if (cfg.train_detections.empty()) {
            throw InputError("spaam-em training needs --train-detections with --train-gt");
        }
        // The labeled component is fitted on ground-truth associations of a
        // (possibly different) scenario; the GT trellis uses the GT points
        // as its own detections.
        LabeledFrames gt = io::read_ground_truth_csv(cfg.train_gt);
        train_dets = io::read_detections_csv(cfg.train_detections);
        FrameSet gt_points;
        gt_points.frames.resize(gt.size());
        std::map<int, Track> tracks;
        for (std::size_t fi = 0; fi < gt.size(); ++fi) {
            for (const LabeledPoint& p : gt[fi]) {
                gt_points.frames[fi].push_back(p.pos);
                auto [it, fresh] = tracks.try_emplace(p.id);
                if (fresh) {
                    it->second.start_frame = 1;
                    it->second.nodes.assign(gt.size(), 0);
                }
                it->second.nodes[fi] = static_cast<int>(gt_points.frames[fi].size());
            }
        }
        Subgraph gt_sub;
        gt_sub.start_frame = 1;
        gt_sub.end_frame = static_cast<int>(gt.size());
        for (auto& [id, t] : tracks) gt_sub.tracks.push_back(std::move(t));
        train_cache.emplace(net, gt_points);
        labeled = association_features(gt_sub, *train_cache, cfg.cost);
    }
    std::vector<Eigen::Vector4d> unlabeled = association_features(init, cache, cfg.cost);
    EmResult em = em_fit(labeled, unlabeled);
    return em.params;
}

TrackOutputs run_tracker(const RunConfig& cfg, const RoadNetwork& net, const FrameSet& dets) {
    ProjectionCache cache(net, dets);
    OtParams ot;
    ot.tau = cfg.tau;
    ot.miss_cost = cfg.ot_miss_cost;
    ot.max_coast = cfg.ot_max_coast;

    TrackOutputs out;
    auto spaam_cfg = [&](SpaamConfig::ConfidenceMode mode) {
        SpaamConfig sc;
        sc.initial_window = cfg.initial_window;
        sc.branching = cfg.branching;
        sc.max_iters = cfg.max_iters;
        sc.confidence_mode = mode;
        sc.seed = cfg.seed;
        sc.tau = cfg.tau;
        sc.max_consecutive_dummies = cfg.max_consecutive_dummies;
        sc.hypothesis_cap = cfg.hypothesis_cap;
        sc.confidence_enum_cap = cfg.confidence_enum_cap;
        sc.solver_timeout_seconds = cfg.solver_timeout;
        sc.threads = cfg.threads;
        return sc;
    };

    if (cfg.algorithm == "ot") {
        auto started = std::chrono::steady_clock::now();
        out.subgraph = ot_track(dets, cache, cfg.cost, ot);
        IterationStats st;
        st.iteration = 1;
        st.total_cost = subgraph_cost(out.subgraph, cache, cfg.cost);
        st.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out.trace.iterations.push_back(st);
    } else if (cfg.algorithm == "mda-icm") {
        Subgraph init = ot_track(dets, cache, cfg.cost, ot);
        auto started = std::chrono::steady_clock::now();
        IcmResult icm = mda_icm(dets, cache, cfg.cost, cfg.tau, std::move(init),
                                cfg.icm_max_sweeps);
        double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out.subgraph = std::move(icm.subgraph);
        for (std::size_t i = 0; i < icm.sweep_costs.size(); ++i) {
            IterationStats st;
            st.iteration = static_cast<int>(i);
            st.total_cost = icm.sweep_costs[i];
            st.wall_seconds = i == 0 ? 0.0 : wall / icm.sweeps;
            out.trace.iterations.push_back(st);
        }
    } else if (cfg.algorithm == "spaam-minus") {
        SpaamConfig sc = spaam_cfg(SpaamConfig::ConfidenceMode::Marginal);
        sc.cold_start = true;
        sc.max_iters = 1;
        sc.initial_window = cfg.window;
        SpaamResult res = spaam_run(cache, cfg.cost, sc, nullptr);
        out.subgraph = std::move(res.subgraph);
        out.trace = std::move(res.trace);
    } else if (cfg.algorithm == "spaam-m" || cfg.algorithm == "spaam-em") {
        Subgraph init = ot_track(dets, cache, cfg.cost, ot);
        SpaamConfig sc = spaam_cfg(cfg.algorithm == "spaam-m"
                                       ? SpaamConfig::ConfidenceMode::Marginal
                                       : SpaamConfig::ConfidenceMode::Gmm);
        if (cfg.algorithm == "spaam-em") {
            sc.gmm = obtain_gmm_params(cfg, net, init, cache);
            io::atomic_write_text(fs::path(cfg.out_dir) / "gmm_params.json",
                                  io::gmm_to_json(sc.gmm));
        }
        SpaamResult res = spaam_run(cache, cfg.cost, sc, &init);
        out.subgraph = std::move(res.subgraph);
        out.trace = std::move(res.trace);
    } else {
        throw InputError("unknown algorithm: " + cfg.algorithm +
                         " (expected spaam-m, spaam-em, spaam-minus, ot or mda-icm)");
    }
    return out;
}

int cmd_track(const RunConfig& cfg) {
    if (cfg.detections.empty() || cfg.roadnet.empty()) {
        throw InputError("track: --detections and --roadnet are required");
    }
    RoadNetwork net = load_road_network(cfg.roadnet);
    FrameSet dets = io::read_detections_csv(cfg.detections);
    TrackOutputs out = run_tracker(cfg, net, dets);

    fs::path dir(cfg.out_dir);
    io::atomic_write_text(dir / "tracks.csv", io::tracks_to_csv(out.subgraph, dets));
    io::atomic_write_text(dir / "trace.json", io::trace_to_json(out.trace));
    io::atomic_write_text(dir / "effective_config.toml", dump_config(cfg));

    int tracks = 0;
    for (const Track& t : out.subgraph.tracks) tracks += t.real_count() > 0;
    std::cout << cfg.algorithm << ": " << tracks << " tracks over " << dets.frame_count()
              << " frames";
    if (!out.trace.iterations.empty()) {
        std::cout << ", final cost " << out.trace.iterations.back().total_cost;
    }
    std::cout << "\nwrote " << (dir / "tracks.csv").string() << "\n";
    return 0;
}

int cmd_eval(const std::string& est_path, const std::string& gt_path, double radius,
             const std::string& out_dir) {
    LabeledFrames est = io::read_tracks_csv(est_path);
    LabeledFrames gt = io::read_ground_truth_csv(gt_path);
    MotReport report = evaluate(est, gt, radius);
    std::string table = format_mot_table(report, fs::path(est_path).stem().string());
    std::cout << table;
    if (!out_dir.empty()) {
        io::atomic_write_text(fs::path(out_dir) / "report.json",
                              io::mot_report_to_json(report));
        io::atomic_write_text(fs::path(out_dir) / "report.txt", table);
    }
    return 0;
}

int cmd_synth(const std::string& preset, const std::vector<Road>& roads,
              const ScenarioConfig& cfg, const std::string& out_dir) {
    RoadNetwork net(roads);
    ScenarioData data = generate(net, cfg);

    fs::path dir(out_dir);
    io::atomic_write_text(dir / "roadnet.json", road_network_to_json(roads));
    io::atomic_write_text(dir / "detections.csv", io::detections_to_csv(data.detections));
    io::atomic_write_text(dir / "gt.csv", io::ground_truth_to_csv(data.ground_truth));

    std::size_t n_det = 0;
    for (const auto& f : data.detections.frames) n_det += f.size();
    std::cout << "scenario" << (preset.empty() ? "" : " " + preset) << ": " << cfg.n_vehicles
              << " vehicles, " << cfg.n_frames << " frames, " << n_det << " detections\nwrote "
              << (dir / "detections.csv").string() << "\n";
    return 0;
}

int cmd_plot(const std::vector<std::string>& trace_paths, const std::string& kind,
             const std::string& out_path) {
    std::vector<PlotSeries> series;
    for (const std::string& path : trace_paths) {
        IterationTrace trace = io::read_trace_json(path);
        PlotSeries s;
        s.label = fs::path(path).stem().string();
        for (const IterationStats& it : trace.iterations) {
            if (kind == "cost") {
                s.points.emplace_back(it.iteration, it.total_cost);
            } else {
                s.points.emplace_back(it.window_size, it.wall_seconds);
            }
        }
        series.push_back(std::move(s));
    }
    std::string title = kind == "cost" ? "Total track cost per iteration"
                                       : "Wall time per window size";
    std::string xl = kind == "cost" ? "iteration" : "window size (frames)";
    std::string yl = kind == "cost" ? "total cost" : "seconds";
    io::atomic_write_text(out_path, render_line_chart(title, xl, yl, series));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPAAM road-constrained multi-frame vehicle tracking"};
    app.require_subcommand(1);

    RunConfig cfg;
    // The config file loads before flag parsing so flags override it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(cfg, argv[i + 1]);
            } catch (const Error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return static_cast<int>(e.error_class());
            }
        }
    }

    auto* track = app.add_subcommand("track", "estimate tracks");
    std::string config_path;
    track->add_option("--config", config_path, "key = value config file");
    track->add_option("--detections", cfg.detections, "detections CSV");
    track->add_option("--roadnet", cfg.roadnet, "road network JSON");
    track->add_option("--algo", cfg.algorithm, "spaam-m|spaam-em|spaam-minus|ot|mda-icm");
    track->add_option("--out", cfg.out_dir, "output directory");
    track->add_option("--seed", cfg.seed, "RNG seed");
    track->add_option("--threads", cfg.threads, "worker threads");
    track->add_option("--tau", cfg.tau, "max per-frame road travel distance (m)");
    track->add_option("--sigma-m", cfg.cost.sigma_m, "motion irregularity weight");
    track->add_option("--sigma-d", cfg.cost.sigma_d, "road distance weight");
    track->add_option("--sigma-theta", cfg.cost.sigma_theta, "road direction weight");
    track->add_option("--sigma-g", cfg.cost.sigma_g, "dummy transition weight");
    track->add_option("--half-window", cfg.cost.half_window, "velocity window W");
    track->add_option("--dt", cfg.cost.dt, "inter-frame seconds");
    track->add_option("--m1", cfg.initial_window, "initial window M1");
    track->add_option("--q", cfg.branching, "hierarchy branching factor");
    track->add_option("--max-iters", cfg.max_iters, "iterations");
    track->add_option("--window", cfg.window, "fixed window (spaam-minus)");
    track->add_option("--solver-timeout", cfg.solver_timeout, "per-window seconds");
    track->add_option("--hypothesis-cap", cfg.hypothesis_cap, "per-window hypothesis cap");
    track->add_option("--gmm-params", cfg.gmm_params, "pre-fitted GMM JSON (spaam-em)");
    track->add_option("--train-detections", cfg.train_detections, "EM training detections");
    track->add_option("--train-gt", cfg.train_gt, "EM training ground truth");
    track->add_option("--ot-miss-cost", cfg.ot_miss_cost, "OT dummy assignment cost");
    track->add_option("--icm-max-sweeps", cfg.icm_max_sweeps, "MDA-ICM sweep limit");

    auto* eval = app.add_subcommand("eval", "score tracks against ground truth");
    std::string est_path, gt_path, eval_out;
    double radius = 5.0;
    eval->add_option("--est", est_path, "estimated tracks CSV")->required();
    eval->add_option("--gt", gt_path, "ground truth CSV")->required();
    eval->add_option("--radius", radius, "match radius (m)");
    eval->add_option("--out", eval_out, "output directory");

    auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    std::string preset, synth_roadnet, synth_out = ".";
    ScenarioConfig scen;
    synth->add_option("--preset", preset, "seq1|seq2|seq3");
    synth->add_option("--roadnet", synth_roadnet, "road network JSON (custom scenario)");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", scen.seed, "RNG seed");
    // Preset values apply first; explicitly given flags override them.
    std::vector<std::pair<CLI::Option*, std::function<void(ScenarioConfig&)>>> scen_overrides;
    auto scen_opt = [&](CLI::Option* opt, auto member) {
        scen_overrides.emplace_back(opt, [member, &scen](ScenarioConfig& c) {
            c.*member = scen.*member;
        });
    };
    scen_opt(synth->add_option("--vehicles", scen.n_vehicles, "vehicle count"),
             &ScenarioConfig::n_vehicles);
    scen_opt(synth->add_option("--frames", scen.n_frames, "frame count"),
             &ScenarioConfig::n_frames);
    scen_opt(synth->add_option("--dt", scen.dt, "inter-frame seconds"), &ScenarioConfig::dt);
    scen_opt(synth->add_option("--noise", scen.noise_sigma, "detection noise sigma (m)"),
             &ScenarioConfig::noise_sigma);
    scen_opt(synth->add_option("--miss", scen.miss_prob, "missed-detection probability"),
             &ScenarioConfig::miss_prob);
    scen_opt(synth->add_option("--spurious", scen.spurious_rate,
                               "spurious detections per frame"),
             &ScenarioConfig::spurious_rate);
    scen_opt(synth->add_option("--speed-min", scen.speed_min, "m/s"), &ScenarioConfig::speed_min);
    scen_opt(synth->add_option("--speed-max", scen.speed_max, "m/s"), &ScenarioConfig::speed_max);

    auto* plot = app.add_subcommand("plot", "render trace curves as SVG");
    std::vector<std::string> traces;
    std::string kind = "cost", plot_out = "plot.svg";
    plot->add_option("--trace", traces, "trace JSON files")->required();
    plot->add_option("--kind", kind, "cost|runtime")
        ->check(CLI::IsMember({"cost", "runtime"}));
    plot->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors are exit class 1
    }

    try {
        if (track->parsed()) return cmd_track(cfg);
        if (eval->parsed()) return cmd_eval(est_path, gt_path, radius, eval_out);
        if (synth->parsed()) {
            std::vector<Road> roads;
            ScenarioConfig final_cfg = scen;
            if (!preset.empty()) {
                Scenario s = make_preset(preset);
                roads = std::move(s.roads);
                final_cfg = s.config;
                final_cfg.seed = scen.seed;
                for (auto& [opt, apply] : scen_overrides) {
                    if (opt->count() > 0) apply(final_cfg);
                }
            } else {
                if (synth_roadnet.empty()) {
                    throw InputError("synth: either --preset or --roadnet is required");
                }
                roads = load_road_network(synth_roadnet).roads();
            }
            return cmd_synth(preset, roads, final_cfg, synth_out);
        }
        if (plot->parsed()) return cmd_plot(traces, kind, plot_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ErrorClass::Internal);
    }
    return 0;
}
