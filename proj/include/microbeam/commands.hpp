#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "microbeam/classify.hpp"
#include "microbeam/config.hpp"
#include "microbeam/formats.hpp"

namespace microbeam {

// Orchestration layer behind the CLI subcommands. Each function validates
// first and throws (domain/config/io) rather than returning codes; the CLI
// shell maps exceptions onto process exit codes.

// Deterministic stratified split: per class, shuffle that class's positions
// in `labels` with the split seed and take the first train_per_class.
// Returns (train indices, test indices), each ascending.
std::pair<std::vector<int>, std::vector<int>> split_train_test(
    const std::vector<int>& labels, int train_per_class, std::uint64_t seed);

// Synthesize the configured dataset into out_dir: one cube file per example
// plus manifest.tsv.
void cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Run the beamform/range/spectrogram chain over a simulated dataset dir;
// writes a theta1/theta2 spectrogram file pair per example plus
// spectra.tsv. Per-example failures are reported itemized, then raised.
void cmd_process(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                 const std::filesystem::path& out_dir);

// Split, fit the two PCA models, memorize training features, write the
// model file.
void cmd_train(const ExperimentConfig& config, const std::filesystem::path& spectra_dir,
               const std::filesystem::path& model_path);

struct EvaluationReport {
    ConfusionMatrix confusion;
    int train_count = 0;
    int test_count = 0;
};

// Re-derives the held-out set from the model's stored config, classifies it,
// prints the confusion table to `out` and optionally writes report_path.
EvaluationReport cmd_evaluate(const std::filesystem::path& model_path,
                              const std::filesystem::path& spectra_dir,
                              std::ostream& out,
                              const std::filesystem::path& report_path = {});

void cmd_render(const std::filesystem::path& spectrogram_path,
                const std::filesystem::path& image_path);

// Shared by cmd_train/cmd_evaluate: projection + fusion of one spectrogram
// pair under a trained model pair.
FusedFeature fused_feature(const Spectrogram& spec1, const Spectrogram& spec2,
                           const PcaModel& model1, const PcaModel& model2, int label);

}  // namespace microbeam
