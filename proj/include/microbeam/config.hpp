#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "microbeam/dsp.hpp"
#include "microbeam/scene.hpp"

namespace microbeam {

struct SplitConfig {
    int train_per_class = 46;
    std::uint64_t seed = 7;
};

// Everything one experiment run needs, grouped the way the config file is:
// radar.* and scene.* populate the dataset spec, processing.* the DSP chain,
// pca.* and split.* the training stage.
struct ExperimentConfig {
    DatasetSpec scene;  // embeds RadarParams as scene.radar
    ChainConfig processing;
    int pca_k = 2;
    SplitConfig split;

    void validate() const;
};

// Reduced-scale profile for fast runs: P=128 at 1 GHz bandwidth over 4 s.
ExperimentConfig desk_profile();

// Acquisition-scale profile: P=512 at 5 GHz bandwidth over 12 s.
ExperimentConfig full_profile();

// Flat `section.key = value` text. Unknown or duplicate keys are rejected;
// keys not present keep the base profile's value.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const ExperimentConfig& base);

// Canonical serialization; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

std::string window_name(WindowKind kind);
WindowKind window_from_name(const std::string& name);

}  // namespace microbeam
