#include "microbeam/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "microbeam/errors.hpp"

namespace microbeam {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as a number");
    }
    if (used != value.size()) {
        throw config_error("key '" + key + "': trailing junk in '" + value + "'");
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as an integer");
    }
    if (used != value.size()) {
        throw config_error("key '" + key + "': trailing junk in '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
        out = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as a seed");
    }
    if (used != value.size()) {
        throw config_error("key '" + key + "': trailing junk in '" + value + "'");
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// P follows the ADC rate so a config only ever states rates and durations.
void derive_samples_per_pri(RadarParams& radar) {
    radar.samples_per_pri = static_cast<int>(std::llround(radar.adc_rate_sps * radar.pri_s));
}

}  // namespace

std::string window_name(WindowKind kind) {
    switch (kind) {
        case WindowKind::rectangular: return "rectangular";
        case WindowKind::hamming: return "hamming";
        case WindowKind::hann: return "hann";
        case WindowKind::blackman: return "blackman";
    }
    throw internal_error("unreachable window kind");
}

WindowKind window_from_name(const std::string& name) {
    if (name == "rectangular") return WindowKind::rectangular;
    if (name == "hamming") return WindowKind::hamming;
    if (name == "hann") return WindowKind::hann;
    if (name == "blackman") return WindowKind::blackman;
    throw config_error("unknown window kind '" + name + "'");
}

void ExperimentConfig::validate() const {
    scene.radar.validate();
    if (scene.count_class1 < 0 || scene.count_class2 < 0) {
        throw config_error("per-class counts must be non-negative");
    }
    if (!(scene.theta1_deg >= 0.0 && scene.theta1_deg <= 180.0) ||
        !(scene.theta2_deg >= 0.0 && scene.theta2_deg <= 180.0)) {
        throw config_error("look angles must lie in [0, 180] deg");
    }
    if (scene.speed_min_mps <= 0.0 || scene.speed_max_mps < scene.speed_min_mps) {
        throw config_error("speed jitter interval is empty or non-positive");
    }
    if (scene.gait_min_hz <= 0.0 || scene.gait_max_hz < scene.gait_min_hz) {
        throw config_error("gait jitter interval is empty or non-positive");
    }
    if (scene.closest_range_min_m <= 0.0 ||
        scene.closest_range_max_m < scene.closest_range_min_m) {
        throw config_error("range jitter interval is empty or non-positive");
    }
    if (scene.torso_rcs < 0.0 || scene.limb_rcs < 0.0 || scene.limb_sway_mps < 0.0) {
        throw config_error("RCS amplitudes and sway must be non-negative");
    }
    const double doppler_limit =
        scene.radar.wavelength_m() / (4.0 * scene.radar.pri_s);
    if (!(scene.speed_max_mps + scene.limb_sway_mps < doppler_limit)) {
        throw config_error("speed_max + limb_sway = " +
                           std::to_string(scene.speed_max_mps + scene.limb_sway_mps) +
                           " m/s violates the unambiguous Doppler limit " +
                           std::to_string(doppler_limit) + " m/s");
    }
    if (processing.stft_len < 2 || processing.stft_len > scene.radar.num_pri) {
        throw config_error("stft length must lie in [2, num_pri]");
    }
    if (processing.hop < 1 || processing.frames < 1) {
        throw config_error("hop and frame count must be at least 1");
    }
    if (processing.gate.mode == GatePolicy::Mode::auto_energy) {
        if (!(processing.gate.energy_fraction > 0.0 && processing.gate.energy_fraction <= 1.0)) {
            throw config_error("gate energy fraction must lie in (0, 1]");
        }
    } else {
        if (processing.gate.lo < 0 || processing.gate.hi < processing.gate.lo ||
            processing.gate.hi >= scene.radar.samples_per_pri) {
            throw config_error("explicit gate bounds invalid for P = " +
                               std::to_string(scene.radar.samples_per_pri));
        }
    }
    if (pca_k < 1 || pca_k > processing.frames) {
        throw config_error("pca.k must lie in [1, frames]");
    }
    if (split.train_per_class < 1) {
        throw config_error("split.train_per_class must be at least 1");
    }
}

ExperimentConfig desk_profile() {
    ExperimentConfig c;
    c.scene.radar.carrier_hz = 77e9;
    c.scene.radar.bandwidth_hz = 1e9;
    c.scene.radar.pri_s = 1e-3;
    c.scene.radar.adc_rate_sps = 128e3;
    c.scene.radar.samples_per_pri = 128;
    c.scene.radar.num_pri = 4000;
    c.scene.radar.num_rx = 4;
    c.scene.radar.spacing_wavelengths = 0.5;
    c.scene.radar.noise_variance = 0.1;
    c.processing.window = WindowKind::hamming;
    c.processing.stft_len = 128;
    c.processing.hop = 10;  // keeps 384 frames over the 4000-PRI window
    c.processing.frames = 384;
    c.processing.gate = GatePolicy::auto_energy(0.95);
    c.pca_k = 2;
    c.split.train_per_class = 46;
    c.split.seed = 7;
    return c;
}

ExperimentConfig full_profile() {
    ExperimentConfig c = desk_profile();
    c.scene.radar.bandwidth_hz = 5e9;
    c.scene.radar.adc_rate_sps = 512e3;
    c.scene.radar.samples_per_pri = 512;
    c.scene.radar.num_pri = 12000;
    c.processing.hop = 31;  // (384-1)*31+128 = 12001: one padded tail sample
    return c;
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    ExperimentConfig config = base;
    DatasetSpec& sc = config.scene;
    RadarParams& rd = sc.radar;
    ChainConfig& pr = config.processing;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"radar.carrier_hz", [&](auto& k, auto& v) { rd.carrier_hz = parse_double(k, v); }},
        {"radar.bandwidth_hz", [&](auto& k, auto& v) { rd.bandwidth_hz = parse_double(k, v); }},
        {"radar.pri_s", [&](auto& k, auto& v) { rd.pri_s = parse_double(k, v); }},
        {"radar.adc_rate_sps", [&](auto& k, auto& v) { rd.adc_rate_sps = parse_double(k, v); }},
        {"radar.num_pri", [&](auto& k, auto& v) { rd.num_pri = static_cast<int>(parse_int(k, v)); }},
        {"radar.num_rx", [&](auto& k, auto& v) { rd.num_rx = static_cast<int>(parse_int(k, v)); }},
        {"radar.spacing_wavelengths",
         [&](auto& k, auto& v) { rd.spacing_wavelengths = parse_double(k, v); }},
        {"radar.noise_variance",
         [&](auto& k, auto& v) { rd.noise_variance = parse_double(k, v); }},
        {"scene.theta1_deg", [&](auto& k, auto& v) { sc.theta1_deg = parse_double(k, v); }},
        {"scene.theta2_deg", [&](auto& k, auto& v) { sc.theta2_deg = parse_double(k, v); }},
        {"scene.count_class1",
         [&](auto& k, auto& v) { sc.count_class1 = static_cast<int>(parse_int(k, v)); }},
        {"scene.count_class2",
         [&](auto& k, auto& v) { sc.count_class2 = static_cast<int>(parse_int(k, v)); }},
        {"scene.speed_min_mps", [&](auto& k, auto& v) { sc.speed_min_mps = parse_double(k, v); }},
        {"scene.speed_max_mps", [&](auto& k, auto& v) { sc.speed_max_mps = parse_double(k, v); }},
        {"scene.gait_min_hz", [&](auto& k, auto& v) { sc.gait_min_hz = parse_double(k, v); }},
        {"scene.gait_max_hz", [&](auto& k, auto& v) { sc.gait_max_hz = parse_double(k, v); }},
        {"scene.closest_range_min_m",
         [&](auto& k, auto& v) { sc.closest_range_min_m = parse_double(k, v); }},
        {"scene.closest_range_max_m",
         [&](auto& k, auto& v) { sc.closest_range_max_m = parse_double(k, v); }},
        {"scene.torso_rcs", [&](auto& k, auto& v) { sc.torso_rcs = parse_double(k, v); }},
        {"scene.limb_rcs", [&](auto& k, auto& v) { sc.limb_rcs = parse_double(k, v); }},
        {"scene.limb_sway_mps",
         [&](auto& k, auto& v) { sc.limb_sway_mps = parse_double(k, v); }},
        {"scene.master_seed", [&](auto& k, auto& v) { sc.master_seed = parse_u64(k, v); }},
        {"processing.window",
         [&](auto&, auto& v) { pr.window = window_from_name(v); }},
        {"processing.stft_len",
         [&](auto& k, auto& v) { pr.stft_len = static_cast<int>(parse_int(k, v)); }},
        {"processing.hop", [&](auto& k, auto& v) { pr.hop = static_cast<int>(parse_int(k, v)); }},
        {"processing.frames",
         [&](auto& k, auto& v) { pr.frames = static_cast<int>(parse_int(k, v)); }},
        {"processing.gate_policy",
         [&](auto& k, auto& v) {
             if (v == "auto") {
                 pr.gate.mode = GatePolicy::Mode::auto_energy;
             } else if (v == "explicit") {
                 pr.gate.mode = GatePolicy::Mode::explicit_bounds;
             } else {
                 throw config_error("key '" + k + "': expected 'auto' or 'explicit'");
             }
         }},
        {"processing.gate_energy_fraction",
         [&](auto& k, auto& v) { pr.gate.energy_fraction = parse_double(k, v); }},
        {"processing.gate_lo",
         [&](auto& k, auto& v) { pr.gate.lo = static_cast<int>(parse_int(k, v)); }},
        {"processing.gate_hi",
         [&](auto& k, auto& v) { pr.gate.hi = static_cast<int>(parse_int(k, v)); }},
        {"pca.k", [&](auto& k, auto& v) { config.pca_k = static_cast<int>(parse_int(k, v)); }},
        {"split.train_per_class",
         [&](auto& k, auto& v) { config.split.train_per_class = static_cast<int>(parse_int(k, v)); }},
        {"split.seed", [&](auto& k, auto& v) { config.split.seed = parse_u64(k, v); }},
    };

    std::set<std::string> seen;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw config_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw config_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        it->second(key, value);
    }

    derive_samples_per_pri(rd);
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), base);
}

std::string serialize_config(const ExperimentConfig& c) {
    const DatasetSpec& sc = c.scene;
    const RadarParams& rd = sc.radar;
    const ChainConfig& pr = c.processing;
    std::ostringstream out;
    out << "radar.carrier_hz = " << format_double(rd.carrier_hz) << '\n'
        << "radar.bandwidth_hz = " << format_double(rd.bandwidth_hz) << '\n'
        << "radar.pri_s = " << format_double(rd.pri_s) << '\n'
        << "radar.adc_rate_sps = " << format_double(rd.adc_rate_sps) << '\n'
        << "radar.num_pri = " << rd.num_pri << '\n'
        << "radar.num_rx = " << rd.num_rx << '\n'
        << "radar.spacing_wavelengths = " << format_double(rd.spacing_wavelengths) << '\n'
        << "radar.noise_variance = " << format_double(rd.noise_variance) << '\n'
        << "scene.theta1_deg = " << format_double(sc.theta1_deg) << '\n'
        << "scene.theta2_deg = " << format_double(sc.theta2_deg) << '\n'
        << "scene.count_class1 = " << sc.count_class1 << '\n'
        << "scene.count_class2 = " << sc.count_class2 << '\n'
        << "scene.speed_min_mps = " << format_double(sc.speed_min_mps) << '\n'
        << "scene.speed_max_mps = " << format_double(sc.speed_max_mps) << '\n'
        << "scene.gait_min_hz = " << format_double(sc.gait_min_hz) << '\n'
        << "scene.gait_max_hz = " << format_double(sc.gait_max_hz) << '\n'
        << "scene.closest_range_min_m = " << format_double(sc.closest_range_min_m) << '\n'
        << "scene.closest_range_max_m = " << format_double(sc.closest_range_max_m) << '\n'
        << "scene.torso_rcs = " << format_double(sc.torso_rcs) << '\n'
        << "scene.limb_rcs = " << format_double(sc.limb_rcs) << '\n'
        << "scene.limb_sway_mps = " << format_double(sc.limb_sway_mps) << '\n'
        << "scene.master_seed = " << sc.master_seed << '\n'
        << "processing.window = " << window_name(pr.window) << '\n'
        << "processing.stft_len = " << pr.stft_len << '\n'
        << "processing.hop = " << pr.hop << '\n'
        << "processing.frames = " << pr.frames << '\n'
        << "processing.gate_policy = "
        << (pr.gate.mode == GatePolicy::Mode::auto_energy ? "auto" : "explicit") << '\n'
        << "processing.gate_energy_fraction = " << format_double(pr.gate.energy_fraction)
        << '\n'
        << "processing.gate_lo = " << pr.gate.lo << '\n'
        << "processing.gate_hi = " << pr.gate.hi << '\n'
        << "pca.k = " << c.pca_k << '\n'
        << "split.train_per_class = " << c.split.train_per_class << '\n'
        << "split.seed = " << c.split.seed << '\n';
    return out.str();
}

}  // namespace microbeam
