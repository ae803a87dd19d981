#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "microbeam/commands.hpp"
#include "microbeam/config.hpp"
#include "microbeam/errors.hpp"

namespace {

// Exit codes: 0 ok, 1 validation, 2 I/O, 3 internal invariant violation.
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

microbeam::ExperimentConfig resolve_config(const std::string& profile,
                                           const std::string& config_path,
                                           bool seed_set, std::uint64_t seed) {
    microbeam::ExperimentConfig base;
    if (profile == "desk") {
        base = microbeam::desk_profile();
    } else if (profile == "full") {
        base = microbeam::full_profile();
    } else {
        throw microbeam::config_error("unknown profile '" + profile +
                                      "' (expected desk or full)");
    }
    microbeam::ExperimentConfig config =
        config_path.empty() ? base : microbeam::load_config_file(config_path, base);
    if (seed_set) {
        config.scene.master_seed = seed;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-channel FMCW micro-Doppler simulation and classification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string profile = "desk";
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "experiment config file")
        ->check(CLI::ExistingFile);
    app.add_option("--profile", profile, "base parameter profile: desk or full");
    app.add_option("--seed", seed, "override scene.master_seed")
        ->each([&](const std::string&) { seed_set = true; });

    std::string out_dir;
    std::string model_path = "model.mbm";
    std::string input_path;

    CLI::App* simulate = app.add_subcommand("simulate", "synthesize a labeled dataset");
    simulate->add_option("--out", out_dir, "output directory")->required();

    CLI::App* process = app.add_subcommand("process", "compute spectrogram pairs");
    process->add_option("dataset", input_path, "simulated dataset directory")->required();
    process->add_option("--out", out_dir, "output directory")->required();

    CLI::App* train = app.add_subcommand("train", "fit 2D-PCA models and the NN classifier");
    train->add_option("spectra", input_path, "spectrogram directory")->required();
    train->add_option("--model", model_path, "output model file");

    CLI::App* evaluate = app.add_subcommand("evaluate", "classify the held-out split");
    evaluate->add_option("spectra", input_path, "spectrogram directory")->required();
    evaluate->add_option("--model", model_path, "trained model file");
    evaluate->add_option("--out", out_dir, "optional machine-readable report file");

    CLI::App* render = app.add_subcommand("render", "export a spectrogram as a PGM image");
    render->add_option("spectrogram", input_path, "spectrogram file")->required();
    render->add_option("--out", out_dir, "output image path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the usage message
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (simulate->parsed()) {
            const auto config = resolve_config(profile, config_path, seed_set, seed);
            microbeam::cmd_simulate(config, out_dir);
            std::cout << "wrote " << config.scene.count_class1 + config.scene.count_class2
                      << " examples to " << out_dir << "\n";
        } else if (process->parsed()) {
            const auto config = resolve_config(profile, config_path, seed_set, seed);
            microbeam::cmd_process(config, input_path, out_dir);
            std::cout << "wrote spectrogram pairs to " << out_dir << "\n";
        } else if (train->parsed()) {
            const auto config = resolve_config(profile, config_path, seed_set, seed);
            microbeam::cmd_train(config, input_path, model_path);
            std::cout << "wrote model to " << model_path << "\n";
        } else if (evaluate->parsed()) {
            microbeam::cmd_evaluate(model_path, input_path, std::cout, out_dir);
        } else if (render->parsed()) {
            microbeam::cmd_render(input_path, out_dir);
            std::cout << "wrote " << out_dir << "\n";
        }
    } catch (const microbeam::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const microbeam::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const microbeam::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
