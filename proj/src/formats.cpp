#include "microbeam/formats.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "microbeam/errors.hpp"

namespace microbeam {

namespace {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T read_raw(std::istream& in, const std::string& what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) throw io_error("truncated file while reading " + what);
    return value;
}

void write_magic(std::ostream& out, const char magic[4]) { out.write(magic, 4); }

void expect_magic(std::istream& in, const char magic[4], const std::string& kind) {
    char got[4] = {};
    in.read(got, 4);
    if (!in || std::memcmp(got, magic, 4) != 0) {
        throw io_error("not a " + kind + " file (bad magic '" +
                       std::string(got, got + 4) + "', expected '" +
                       std::string(magic, magic + 4) + "')");
    }
}

// Stage into <path>.tmp; rename only after the writer succeeded.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::filesystem::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw io_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                       ec.message());
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    return in;
}

void write_pca_block(std::ostream& out, const PcaModel& model) {
    const auto f = static_cast<std::uint32_t>(model.mean_image.rows());
    const auto t = static_cast<std::uint32_t>(model.mean_image.cols());
    const auto k = static_cast<std::uint32_t>(model.k);
    write_raw(out, f);
    write_raw(out, t);
    write_raw(out, k);
    for (std::uint32_t i = 0; i < f; ++i)
        for (std::uint32_t j = 0; j < t; ++j) write_raw(out, model.mean_image(i, j));
    for (std::uint32_t i = 0; i < t; ++i)
        for (std::uint32_t j = 0; j < k; ++j) write_raw(out, model.basis(i, j));
    for (std::uint32_t i = 0; i < k; ++i) write_raw(out, model.eigenvalues[i]);
}

PcaModel read_pca_block(std::istream& in) {
    const auto f = read_raw<std::uint32_t>(in, "pca rows");
    const auto t = read_raw<std::uint32_t>(in, "pca cols");
    const auto k = read_raw<std::uint32_t>(in, "pca k");
    PcaModel model;
    model.k = static_cast<int>(k);
    model.mean_image.resize(f, t);
    for (std::uint32_t i = 0; i < f; ++i)
        for (std::uint32_t j = 0; j < t; ++j)
            model.mean_image(i, j) = read_raw<double>(in, "pca mean");
    model.basis.resize(t, k);
    for (std::uint32_t i = 0; i < t; ++i)
        for (std::uint32_t j = 0; j < k; ++j)
            model.basis(i, j) = read_raw<double>(in, "pca basis");
    model.eigenvalues.resize(k);
    for (std::uint32_t i = 0; i < k; ++i)
        model.eigenvalues[i] = read_raw<double>(in, "pca eigenvalues");
    return model;
}

int window_id(WindowKind kind) { return static_cast<int>(kind); }

WindowKind window_from_id(std::uint32_t id) {
    if (id > 3) throw io_error("unknown window id " + std::to_string(id));
    return static_cast<WindowKind>(id);
}

}  // namespace

void write_cube_file(const std::filesystem::path& path, const RawDataCube& cube) {
    atomic_write(path, [&](std::ostream& out) {
        write_magic(out, "MBC1");
        write_raw<std::uint32_t>(out, 1);
        write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(cube.data.rows()));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cube.data.cols()));
        const RadarParams& p = cube.params;
        write_raw(out, p.carrier_hz);
        write_raw(out, p.bandwidth_hz);
        write_raw(out, p.pri_s);
        write_raw(out, p.adc_rate_sps);
        write_raw(out, p.spacing_wavelengths);
        write_raw(out, p.noise_variance);
        write_raw<std::uint8_t>(out, static_cast<std::uint8_t>(cube.label));
        // time-major, channel-minor, interleaved float32
        std::vector<float> row(2 * cube.data.cols());
        for (Eigen::Index n = 0; n < cube.data.rows(); ++n) {
            for (Eigen::Index m = 0; m < cube.data.cols(); ++m) {
                row[2 * m] = static_cast<float>(cube.data(n, m).real());
                row[2 * m + 1] = static_cast<float>(cube.data(n, m).imag());
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size() * sizeof(float)));
        }
    });
}

RawDataCube read_cube_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    expect_magic(in, "MBC1", "raw data cube");
    const auto version = read_raw<std::uint32_t>(in, "cube version");
    if (version != 1) {
        throw io_error("unsupported cube version " + std::to_string(version) +
                       " in " + path.string());
    }
    const auto n = read_raw<std::uint64_t>(in, "cube N");
    const auto m = read_raw<std::uint32_t>(in, "cube M");
    RawDataCube cube;
    RadarParams& p = cube.params;
    p.carrier_hz = read_raw<double>(in, "carrier");
    p.bandwidth_hz = read_raw<double>(in, "bandwidth");
    p.pri_s = read_raw<double>(in, "pri");
    p.adc_rate_sps = read_raw<double>(in, "adc rate");
    p.spacing_wavelengths = read_raw<double>(in, "spacing");
    p.noise_variance = read_raw<double>(in, "noise variance");
    cube.label = read_raw<std::uint8_t>(in, "label");
    p.num_rx = static_cast<int>(m);
    p.samples_per_pri = static_cast<int>(std::llround(p.adc_rate_sps * p.pri_s));
    if (p.samples_per_pri < 1 || n % static_cast<std::uint64_t>(p.samples_per_pri) != 0) {
        throw io_error("cube sample count is inconsistent with its radar parameters");
    }
    p.num_pri = static_cast<int>(n / static_cast<std::uint64_t>(p.samples_per_pri));

    cube.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    std::vector<float> row(2 * m);
    for (std::uint64_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw io_error("truncated cube data in " + path.string());
        for (std::uint32_t ch = 0; ch < m; ++ch) {
            cube.data(static_cast<Eigen::Index>(i), ch) =
                std::complex<double>(row[2 * ch], row[2 * ch + 1]);
        }
    }
    return cube;
}

void write_spectrogram_file(const std::filesystem::path& path, const Spectrogram& spec) {
    atomic_write(path, [&](std::ostream& out) {
        write_magic(out, "MBS1");
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(spec.power.rows()));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(spec.power.cols()));
        write_raw(out, spec.look_angle_deg);
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(spec.hop));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(window_id(spec.window)));
        for (Eigen::Index i = 0; i < spec.power.rows(); ++i)
            for (Eigen::Index j = 0; j < spec.power.cols(); ++j)
                write_raw(out, static_cast<float>(spec.power(i, j)));
    });
}

Spectrogram read_spectrogram_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    expect_magic(in, "MBS1", "spectrogram");
    const auto f = read_raw<std::uint32_t>(in, "spectrogram F");
    const auto t = read_raw<std::uint32_t>(in, "spectrogram T");
    Spectrogram spec;
    spec.look_angle_deg = read_raw<double>(in, "look angle");
    spec.hop = static_cast<int>(read_raw<std::uint32_t>(in, "hop"));
    spec.window = window_from_id(read_raw<std::uint32_t>(in, "window id"));
    spec.power.resize(f, t);
    for (std::uint32_t i = 0; i < f; ++i)
        for (std::uint32_t j = 0; j < t; ++j)
            spec.power(i, j) = read_raw<float>(in, "spectrogram data");
    return spec;
}

void write_model_file(const std::filesystem::path& path, const ModelFile& model) {
    atomic_write(path, [&](std::ostream& out) {
        write_magic(out, "MBM1");
        write_raw(out, model.version);
        const std::string config_text = serialize_config(model.config);
        write_raw<std::uint64_t>(out, config_text.size());
        out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));
        write_pca_block(out, model.model_theta1);
        write_pca_block(out, model.model_theta2);
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(model.nn.metric));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(model.nn.features.size()));
        const auto dim = model.nn.features.empty()
                             ? std::uint64_t{0}
                             : static_cast<std::uint64_t>(model.nn.features[0].values.size());
        write_raw<std::uint64_t>(out, dim);
        for (const FusedFeature& f : model.nn.features) {
            write_raw<std::uint8_t>(out, static_cast<std::uint8_t>(f.label));
            for (Eigen::Index i = 0; i < f.values.size(); ++i) write_raw(out, f.values[i]);
        }
    });
}

ModelFile read_model_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    expect_magic(in, "MBM1", "model");
    ModelFile model;
    model.version = read_raw<std::uint32_t>(in, "model version");
    if (model.version != 1) {
        throw io_error("unsupported model version " + std::to_string(model.version) +
                       " in " + path.string());
    }
    const auto config_len = read_raw<std::uint64_t>(in, "config length");
    std::string config_text(config_len, '\0');
    in.read(config_text.data(), static_cast<std::streamsize>(config_len));
    if (!in) throw io_error("truncated config block in " + path.string());
    model.config = parse_config(config_text, desk_profile());
    model.model_theta1 = read_pca_block(in);
    model.model_theta2 = read_pca_block(in);
    model.nn.metric = static_cast<Metric>(read_raw<std::uint32_t>(in, "metric"));
    const auto count = read_raw<std::uint32_t>(in, "feature count");
    const auto dim = read_raw<std::uint64_t>(in, "feature dim");
    model.nn.features.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        FusedFeature& f = model.nn.features[i];
        f.label = read_raw<std::uint8_t>(in, "feature label");
        f.values.resize(static_cast<Eigen::Index>(dim));
        for (std::uint64_t j = 0; j < dim; ++j)
            f.values[static_cast<Eigen::Index>(j)] = read_raw<double>(in, "feature value");
    }
    return model;
}

void render_pgm(const std::filesystem::path& path, const Spectrogram& spec) {
    const Eigen::Index f = spec.power.rows();
    const Eigen::Index t = spec.power.cols();
    if (f == 0 || t == 0) throw dimension_error("cannot render an empty spectrogram");

    const double peak = spec.power.maxCoeff();
    atomic_write(path, [&](std::ostream& out) {
        out << "P5\n" << t << ' ' << f << "\n255\n";
        std::vector<unsigned char> row(static_cast<std::size_t>(t));
        for (Eigen::Index i = 0; i < f; ++i) {
            // image top = highest Doppler = last matrix row
            const Eigen::Index src = f - 1 - i;
            for (Eigen::Index j = 0; j < t; ++j) {
                double value = 0.0;
                if (peak > 0.0) {
                    const double db =
                        10.0 * std::log10(std::max(spec.power(src, j), 1e-6 * peak));
                    const double db_peak = 10.0 * std::log10(peak);
                    value = 255.0 * (db - (db_peak - 60.0)) / 60.0;
                }
                row[static_cast<std::size_t>(j)] =
                    static_cast<unsigned char>(std::clamp(std::lround(value), 0L, 255L));
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size()));
        }
    });
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
    atomic_write(path, [&](std::ostream& out) {
        out << "index\tfile\tlabel\tseed\n";
        for (const ManifestEntry& e : entries) {
            out << e.index << '\t' << e.file << '\t' << e.label << '\t' << e.seed << '\n';
        }
    });
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "index\tfile\tlabel\tseed") {
        throw io_error("malformed manifest header in " + path.string());
    }
    std::vector<ManifestEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        ManifestEntry e;
        std::string file;
        if (!(row >> e.index >> file >> e.label >> e.seed)) {
            throw io_error("malformed manifest row '" + line + "' in " + path.string());
        }
        e.file = file;
        entries.push_back(e);
    }
    return entries;
}

void write_spectra_manifest(const std::filesystem::path& path,
                            const std::vector<SpectraEntry>& entries) {
    atomic_write(path, [&](std::ostream& out) {
        out << "index\tfile_theta1\tfile_theta2\tlabel\n";
        for (const SpectraEntry& e : entries) {
            out << e.index << '\t' << e.file_theta1 << '\t' << e.file_theta2 << '\t'
                << e.label << '\n';
        }
    });
}

std::vector<SpectraEntry> read_spectra_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open spectra manifest " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "index\tfile_theta1\tfile_theta2\tlabel") {
        throw io_error("malformed spectra manifest header in " + path.string());
    }
    std::vector<SpectraEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        SpectraEntry e;
        if (!(row >> e.index >> e.file_theta1 >> e.file_theta2 >> e.label)) {
            throw io_error("malformed spectra manifest row '" + line + "' in " +
                           path.string());
        }
        entries.push_back(e);
    }
    return entries;
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
    atomic_write(path, writer);
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[65536];
    while (in) {
        in.read(buffer, sizeof buffer);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

}  // namespace microbeam
