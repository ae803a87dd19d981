#include "microbeam/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <string>

#include "microbeam/errors.hpp"

namespace microbeam {

Eigen::VectorXcd apply_beamformer(const RawDataCube& cube, const BeamWeights& weights) {
    if (cube.data.cols() != weights.weights.size()) {
        throw dimension_error("cube has " + std::to_string(cube.data.cols()) +
                              " channels but the beamformer expects " +
                              std::to_string(weights.weights.size()));
    }
    return cube.data * weights.weights;
}

Eigen::MatrixXcd reshape_to_pri(const Eigen::VectorXcd& x, int samples_per_pri) {
    if (samples_per_pri < 1) {
        throw dimension_error("samples_per_pri must be at least 1");
    }
    if (x.size() % samples_per_pri != 0) {
        throw dimension_error("signal length " + std::to_string(x.size()) +
                              " is not divisible by P = " + std::to_string(samples_per_pri));
    }
    const Eigen::Index q = x.size() / samples_per_pri;
    return Eigen::Map<const Eigen::MatrixXcd>(x.data(), samples_per_pri, q);
}

RangeMap range_map(const Eigen::MatrixXcd& x2d, double look_angle_deg,
                   double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) {
        throw domain_error("bandwidth must be positive");
    }
    RangeMap map;
    map.look_angle_deg = look_angle_deg;
    map.range_bin_m = kSpeedOfLight / (2.0 * bandwidth_hz);
    map.data.resize(x2d.rows(), x2d.cols());

    Eigen::FFT<double> fft;
    Eigen::VectorXcd in(x2d.rows()), out(x2d.rows());
    for (Eigen::Index q = 0; q < x2d.cols(); ++q) {
        in = x2d.col(q);
        fft.fwd(out, in);
        map.data.col(q) = out;
    }
    return map;
}

GateBounds select_gate(const RangeMap& map, const GatePolicy& policy) {
    const int bins = static_cast<int>(map.data.rows());
    if (bins == 0 || map.data.cols() == 0) {
        throw dimension_error("cannot gate an empty range map");
    }

    if (policy.mode == GatePolicy::Mode::explicit_bounds) {
        if (policy.lo < 0 || policy.hi >= bins || policy.lo > policy.hi) {
            throw domain_error("explicit gate bounds [" + std::to_string(policy.lo) + ", " +
                               std::to_string(policy.hi) + "] invalid for " +
                               std::to_string(bins) + " bins");
        }
        return {policy.lo, policy.hi};
    }

    if (!(policy.energy_fraction > 0.0 && policy.energy_fraction <= 1.0)) {
        throw domain_error("gate energy fraction must lie in (0, 1]");
    }

    // Slow-time-integrated energy per range bin.
    Eigen::VectorXd profile = map.data.cwiseAbs2().rowwise().sum();
    const double total = profile.sum();
    if (!(total > 0.0)) {
        throw dimension_error("range map carries no energy; cannot auto-gate");
    }

    int peak = 0;
    profile.maxCoeff(&peak);
    const double target = policy.energy_fraction * total;

    // Prefix sums make each candidate interval an O(1) check; scan widths
    // ascending so the first hit is the smallest qualifying interval.
    Eigen::VectorXd prefix(bins + 1);
    prefix[0] = 0.0;
    for (int i = 0; i < bins; ++i) prefix[i + 1] = prefix[i] + profile[i];

    for (int width = 1; width <= bins; ++width) {
        const int lo_min = std::max(0, peak - width + 1);
        const int lo_max = std::min(peak, bins - width);
        for (int lo = lo_min; lo <= lo_max; ++lo) {
            const double energy = prefix[lo + width] - prefix[lo];
            if (energy >= target) {
                return {lo, lo + width - 1};
            }
        }
    }
    return {0, bins - 1};  // energy_fraction == 1 with rounding slack
}

SlowTimeSignal collapse_range(const RangeMap& map, GateBounds gate) {
    const int bins = static_cast<int>(map.data.rows());
    if (gate.lo < 0 || gate.hi >= bins || gate.lo > gate.hi) {
        throw dimension_error("gate [" + std::to_string(gate.lo) + ", " +
                              std::to_string(gate.hi) + "] out of bounds for " +
                              std::to_string(bins) + " bins");
    }
    SlowTimeSignal sig;
    sig.look_angle_deg = map.look_angle_deg;
    sig.gate = gate;
    sig.samples = map.data.middleRows(gate.lo, gate.hi - gate.lo + 1).colwise().sum();
    return sig;
}

std::vector<double> make_window(WindowKind kind, int length) {
    std::vector<double> h(length, 1.0);
    if (length == 1) return h;
    const double denom = length - 1.0;
    for (int m = 0; m < length; ++m) {
        const double x = 2.0 * M_PI * m / denom;
        switch (kind) {
            case WindowKind::rectangular:
                break;
            case WindowKind::hamming:
                h[m] = 0.54 - 0.46 * std::cos(x);
                break;
            case WindowKind::hann:
                h[m] = 0.5 - 0.5 * std::cos(x);
                break;
            case WindowKind::blackman:
                h[m] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
                break;
        }
    }
    return h;
}

Spectrogram spectrogram(const SlowTimeSignal& sig, WindowKind window, int stft_len,
                        int hop, int frames) {
    if (stft_len < 2) throw domain_error("stft length must be at least 2");
    if (hop < 1) throw domain_error("hop must be at least 1");
    if (frames < 1) throw domain_error("frame count must be at least 1");
    const Eigen::Index q = sig.samples.size();
    if (stft_len > q) {
        throw domain_error("stft length " + std::to_string(stft_len) +
                           " exceeds slow-time length " + std::to_string(q));
    }

    const std::vector<double> h = make_window(window, stft_len);
    Spectrogram spec;
    spec.look_angle_deg = sig.look_angle_deg;
    spec.hop = hop;
    spec.window = window;
    spec.power.setZero(stft_len, frames);

    Eigen::FFT<double> fft;
    Eigen::VectorXcd frame(stft_len), out(stft_len);
    const int half = stft_len / 2;
    for (int t = 0; t < frames; ++t) {
        const std::int64_t start = static_cast<std::int64_t>(t) * hop;
        for (int m = 0; m < stft_len; ++m) {
            const std::int64_t idx = start + m;
            frame[m] = idx < q ? h[m] * sig.samples[idx] : 0.0;  // tail zero-padding
        }
        fft.fwd(out, frame);
        for (int k = 0; k < stft_len; ++k) {
            spec.power((k + half) % stft_len, t) = std::norm(out[k]);
        }
    }
    return spec;
}

namespace {

Spectrogram run_chain(const RawDataCube& cube, const BeamWeights& weights,
                      const ChainConfig& config) {
    const Eigen::VectorXcd beamformed = apply_beamformer(cube, weights);
    const Eigen::MatrixXcd stacked = reshape_to_pri(beamformed, cube.params.samples_per_pri);
    const RangeMap map = range_map(stacked, weights.look_angle_deg, cube.params.bandwidth_hz);
    const GateBounds gate = select_gate(map, config.gate);
    const SlowTimeSignal slow = collapse_range(map, gate);
    return spectrogram(slow, config.window, config.stft_len, config.hop, config.frames);
}

}  // namespace

Spectrogram process_with_weights(const RawDataCube& cube, const BeamWeights& weights,
                                 const ChainConfig& config) {
    return run_chain(cube, weights, config);
}

std::pair<Spectrogram, Spectrogram> process_example(const RawDataCube& cube,
                                                    double theta1_deg, double theta2_deg,
                                                    const ChainConfig& config) {
    const ArrayGeometry geometry = cube.params.geometry();
    return {run_chain(cube, beam_weights(geometry, theta1_deg), config),
            run_chain(cube, beam_weights(geometry, theta2_deg), config)};
}

}  // namespace microbeam
