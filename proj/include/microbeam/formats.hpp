#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "microbeam/classify.hpp"
#include "microbeam/config.hpp"
#include "microbeam/dsp.hpp"
#include "microbeam/features.hpp"
#include "microbeam/scene.hpp"

namespace microbeam {

// On-disk formats (all little-endian):
//   cube        "MBC1" + u32 version + u64 N + u32 M + radar doubles + u8 label
//                + N*M interleaved float32 complex samples, time-major
//   spectrogram "MBS1" + u32 F + u32 T + f64 look angle + u32 hop + u32 window
//                + F*T float32 power values, frequency-major
//   model       "MBM1" + u32 version + config text + two PCA blocks + NN block
// Writers stage to <path>.tmp and rename, so a failure never leaves a
// partially-written file at the target path.

struct ManifestEntry {
    int index = 0;
    std::string file;
    int label = 0;
    std::uint64_t seed = 0;
};

struct SpectraEntry {
    int index = 0;
    std::string file_theta1;
    std::string file_theta2;
    int label = 0;
};

struct ModelFile {
    std::uint32_t version = 1;
    PcaModel model_theta1;
    PcaModel model_theta2;
    NnModel nn;
    ExperimentConfig config;
};

void write_cube_file(const std::filesystem::path& path, const RawDataCube& cube);
RawDataCube read_cube_file(const std::filesystem::path& path);

void write_spectrogram_file(const std::filesystem::path& path, const Spectrogram& spec);
Spectrogram read_spectrogram_file(const std::filesystem::path& path);

void write_model_file(const std::filesystem::path& path, const ModelFile& model);
ModelFile read_model_file(const std::filesystem::path& path);

// 8-bit binary PGM: time left-to-right, zero Doppler at vertical center,
// 60 dB of dynamic range mapped onto 0..255 with the peak at 255.
void render_pgm(const std::filesystem::path& path, const Spectrogram& spec);

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

void write_spectra_manifest(const std::filesystem::path& path,
                            const std::vector<SpectraEntry>& entries);
std::vector<SpectraEntry> read_spectra_manifest(const std::filesystem::path& path);

// FNV-1a over a file's bytes; used for determinism checks.
std::uint64_t hash_file(const std::filesystem::path& path);

// Stage-and-rename text writer shared by every artifact emitter.
void atomic_write_text(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace microbeam
