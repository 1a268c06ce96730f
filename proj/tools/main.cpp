#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ttbeam/ttbeam.hpp"

int main(int argc, char** argv) {
    CLI::App app{"two-timescale IRS beamforming link simulator"};
    app.name("ttbeam");

    std::string experiment;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int frames = 2000;

    std::string names;
    for (const auto& n : ttbeam::experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("--experiment", experiment, "experiment to run: " + names)->required();
    app.add_option("--config", config_path, "key=value config file (defaults when omitted)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (default: config rng_seed)");
    app.add_option("--out", out_path, "output CSV path (default: <experiment>.csv)");
    app.add_option("--frames", frames, "evaluation frames per scheme")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        ttbeam::SystemConfig cfg;
        if (!config_path.empty()) cfg = ttbeam::load_config(config_path);
        ttbeam::validate(cfg);
        ttbeam::ExperimentSpec spec = ttbeam::default_experiment(experiment, cfg);
        if (seed_opt->count() > 0) spec.seed = seed;
        if (!out_path.empty()) spec.output_path = out_path;
        spec.n_frames = frames;
        ttbeam::run_experiment(spec, cfg);
        std::cout << spec.output_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
