#pragma once

#include "spaam/baselines.hpp"
#include "spaam/cost.hpp"
#include "spaam/spaam.hpp"

#include <filesystem>
#include <string>

namespace spaam {

// Everything a `track` run needs; file values load first, CLI flags override,
// and the effective configuration is dumped beside the outputs.
struct RunConfig {
    std::string algorithm = "spaam-em";  // spaam-m|spaam-em|spaam-minus|ot|mda-icm
    std::string detections;
    std::string roadnet;
    std::string gt;
    std::string out_dir = ".";
    uint64_t seed = 0;
    int threads = 1;

    CostParams cost;  // sigma_m, sigma_d, sigma_theta, sigma_g, half_window, dt
    double tau = 25.0;
    double max_projection_distance = 50.0;

    int initial_window = 3;  // M^(1)
    int branching = 2;       // q
    int max_iters = 6;
    int window = 5;  // spaam-minus fixed window
    int max_consecutive_dummies = 2;
    std::size_t hypothesis_cap = 2'000'000;
    std::size_t confidence_enum_cap = 200'000;
    double solver_timeout = 60.0;

    double ot_miss_cost = 15.0;
    int ot_max_coast = 2;
    int icm_max_sweeps = 50;

    double match_radius = 5.0;

    std::string gmm_params;        // pre-fitted parameter file (spaam-em)
    std::string train_detections;  // labeled-feature source for em_fit
    std::string train_gt;
};

/// key = value lines; '#' comments; unknown keys are an input error.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Effective configuration in the same format; reloading reproduces the run.
std::string dump_config(const RunConfig& cfg);

}  // namespace spaam
