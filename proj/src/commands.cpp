#include "microbeam/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>

#include "microbeam/errors.hpp"
#include "microbeam/parallel.hpp"
#include "microbeam/rng.hpp"

namespace microbeam {

namespace fs = std::filesystem;

namespace {

std::string indexed_name(const char* prefix, int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d%s", prefix, index, suffix);
    return buf;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw io_error("cannot create output directory " + dir.string());
    }
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> split_train_test(
    const std::vector<int>& labels, int train_per_class, std::uint64_t seed) {
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<int>(i));
    }

    std::vector<int> train;
    std::vector<int> test;
    for (auto& [label, positions] : by_class) {
        if (static_cast<int>(positions.size()) < train_per_class) {
            throw domain_error("class " + std::to_string(label) + " has only " +
                               std::to_string(positions.size()) + " examples, need " +
                               std::to_string(train_per_class) + " for training");
        }
        RandomSource rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
        deterministic_shuffle(positions, rng);
        train.insert(train.end(), positions.begin(), positions.begin() + train_per_class);
        test.insert(test.end(), positions.begin() + train_per_class, positions.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

void cmd_simulate(const ExperimentConfig& config, const fs::path& out_dir) {
    config.validate();
    const int total = config.scene.count_class1 + config.scene.count_class2;
    if (total == 0) {
        throw domain_error("dataset must request at least one example");
    }
    ensure_directory(out_dir);

    std::vector<ManifestEntry> entries(total);
    parallel_for_index(static_cast<std::size_t>(total), [&](std::size_t i) {
        const int index = static_cast<int>(i);
        const SceneSpec scene = dataset_scene(config.scene, index);
        const RawDataCube cube = synthesize(scene, config.scene.radar);
        const std::string name = indexed_name("cube", index, ".mbc");
        write_cube_file(out_dir / name, cube);
        entries[i] = {index, name, scene.class_label,
                      dataset_example_seed(config.scene, index)};
    });
    write_manifest(out_dir / "manifest.tsv", entries);
}

void cmd_process(const ExperimentConfig& config, const fs::path& dataset_dir,
                 const fs::path& out_dir) {
    config.validate();
    const fs::path manifest_path = dataset_dir / "manifest.tsv";
    if (!fs::exists(manifest_path)) {
        throw io_error("no manifest.tsv in " + dataset_dir.string() +
                       "; is this a simulated dataset directory?");
    }
    const std::vector<ManifestEntry> manifest = read_manifest(manifest_path);
    if (manifest.empty()) {
        throw io_error("manifest in " + dataset_dir.string() + " lists no examples");
    }
    ensure_directory(out_dir);

    std::vector<SpectraEntry> entries(manifest.size());
    std::vector<std::string> failures(manifest.size());
    parallel_for_index(manifest.size(), [&](std::size_t i) {
        const ManifestEntry& item = manifest[i];
        try {
            const RawDataCube cube = read_cube_file(dataset_dir / item.file);
            const auto [spec1, spec2] = process_example(
                cube, config.scene.theta1_deg, config.scene.theta2_deg, config.processing);
            SpectraEntry entry;
            entry.index = item.index;
            entry.label = item.label;
            entry.file_theta1 = indexed_name("spec", item.index, "_t1.mbs");
            entry.file_theta2 = indexed_name("spec", item.index, "_t2.mbs");
            write_spectrogram_file(out_dir / entry.file_theta1, spec1);
            write_spectrogram_file(out_dir / entry.file_theta2, spec2);
            entries[i] = entry;
        } catch (const std::exception& e) {
            failures[i] = item.file + ": " + e.what();
        }
    });

    std::string report;
    int failed = 0;
    for (const std::string& f : failures) {
        if (!f.empty()) {
            ++failed;
            report += "  " + f + "\n";
        }
    }
    if (failed > 0) {
        std::cerr << failed << " example(s) failed to process:\n" << report;
        throw io_error(std::to_string(failed) + " example(s) failed to process");
    }
    write_spectra_manifest(out_dir / "spectra.tsv", entries);
}

FusedFeature fused_feature(const Spectrogram& spec1, const Spectrogram& spec2,
                           const PcaModel& model1, const PcaModel& model2, int label) {
    FusedFeature feature = fuse(project(spec1, model1), project(spec2, model2));
    feature.label = label;
    return feature;
}

namespace {

struct LoadedPair {
    Spectrogram spec1;
    Spectrogram spec2;
    int label = 0;
};

std::vector<LoadedPair> load_pairs(const fs::path& spectra_dir,
                                   const std::vector<SpectraEntry>& entries,
                                   const std::vector<int>& indices) {
    std::vector<LoadedPair> pairs(indices.size());
    parallel_for_index(indices.size(), [&](std::size_t i) {
        const SpectraEntry& e = entries[static_cast<std::size_t>(indices[i])];
        pairs[i] = {read_spectrogram_file(spectra_dir / e.file_theta1),
                    read_spectrogram_file(spectra_dir / e.file_theta2), e.label};
    });
    return pairs;
}

std::vector<SpectraEntry> load_spectra_manifest(const fs::path& spectra_dir) {
    const fs::path manifest_path = spectra_dir / "spectra.tsv";
    if (!fs::exists(manifest_path)) {
        throw io_error("no spectra.tsv in " + spectra_dir.string() +
                       "; run the process step first");
    }
    const std::vector<SpectraEntry> entries = read_spectra_manifest(manifest_path);
    if (entries.empty()) {
        throw io_error("spectra manifest in " + spectra_dir.string() + " is empty");
    }
    return entries;
}

}  // namespace

void cmd_train(const ExperimentConfig& config, const fs::path& spectra_dir,
               const fs::path& model_path) {
    config.validate();
    const std::vector<SpectraEntry> entries = load_spectra_manifest(spectra_dir);

    std::vector<int> labels;
    labels.reserve(entries.size());
    for (const SpectraEntry& e : entries) labels.push_back(e.label);
    const auto [train_idx, test_idx] =
        split_train_test(labels, config.split.train_per_class, config.split.seed);

    const std::vector<LoadedPair> train_pairs = load_pairs(spectra_dir, entries, train_idx);
    std::vector<SpectrogramPair> spectra;
    spectra.reserve(train_pairs.size());
    for (const LoadedPair& p : train_pairs) spectra.emplace_back(p.spec1, p.spec2);

    ModelFile model;
    model.config = config;
    std::tie(model.model_theta1, model.model_theta2) = fit(spectra, config.pca_k);
    model.nn.metric = Metric::euclidean;
    model.nn.features.reserve(train_pairs.size());
    for (const LoadedPair& p : train_pairs) {
        model.nn.features.push_back(fused_feature(p.spec1, p.spec2, model.model_theta1,
                                                  model.model_theta2, p.label));
    }
    write_model_file(model_path, model);
}

EvaluationReport cmd_evaluate(const fs::path& model_path, const fs::path& spectra_dir,
                              std::ostream& out, const fs::path& report_path) {
    const ModelFile model = read_model_file(model_path);
    const std::vector<SpectraEntry> entries = load_spectra_manifest(spectra_dir);

    std::vector<int> labels;
    labels.reserve(entries.size());
    for (const SpectraEntry& e : entries) labels.push_back(e.label);
    // Same deterministic split the training step used; evaluate only the
    // held-out complement.
    const auto [train_idx, test_idx] = split_train_test(
        labels, model.config.split.train_per_class, model.config.split.seed);
    if (test_idx.empty()) {
        throw domain_error("the split leaves no held-out examples to evaluate");
    }

    const std::vector<LoadedPair> test_pairs = load_pairs(spectra_dir, entries, test_idx);
    std::vector<FusedFeature> test_features;
    test_features.reserve(test_pairs.size());
    for (const LoadedPair& p : test_pairs) {
        test_features.push_back(fused_feature(p.spec1, p.spec2, model.model_theta1,
                                              model.model_theta2, p.label));
    }

    EvaluationReport report;
    report.confusion = evaluate(model.nn, test_features);
    report.train_count = static_cast<int>(train_idx.size());
    report.test_count = static_cast<int>(test_idx.size());

    out << "Evaluated " << report.test_count << " held-out examples ("
        << report.train_count << " trained, K = " << model.config.pca_k << ")\n"
        << report.confusion.to_text();

    if (!report_path.empty()) {
        const ConfusionMatrix& cm = report.confusion;
        atomic_write_text(report_path, [&](std::ostream& file) {
            file << "predicted\tactual\tcount\tpercent\n";
            char buf[64];
            const int c = static_cast<int>(cm.class_labels.size());
            for (int i = 0; i < c; ++i) {
                for (int j = 0; j < c; ++j) {
                    std::snprintf(buf, sizeof buf, "%d\t%d\t%d\t%.6f\n", cm.class_labels[i],
                                  cm.class_labels[j], cm.counts(i, j), cm.percentages(i, j));
                    file << buf;
                }
            }
            std::snprintf(buf, sizeof buf, "# accuracy\t%.6f\n", cm.accuracy);
            file << buf;
        });
    }
    return report;
}

void cmd_render(const fs::path& spectrogram_path, const fs::path& image_path) {
    render_pgm(image_path, read_spectrogram_file(spectrogram_path));
}

}  // namespace microbeam
