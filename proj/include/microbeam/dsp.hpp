#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "microbeam/array.hpp"
#include "microbeam/scene.hpp"

namespace microbeam {

// Complex P x Q matrix of per-PRI fast-time DFTs; row l is range bin l.
// Transforms are unnormalized forward DFTs, so per column
// sum_l |r(l,q)|^2 == P * sum_p |x(p,q)|^2.
struct RangeMap {
    Eigen::MatrixXcd data;
    double look_angle_deg = 0.0;
    double range_bin_m = 0.0;
};

// Inclusive range-bin interval [lo, hi].
struct GateBounds {
    int lo = 0;
    int hi = 0;
};

// Complex Q-vector after coherently summing the gated range bins.
struct SlowTimeSignal {
    Eigen::VectorXcd samples;
    double look_angle_deg = 0.0;
    GateBounds gate;
};

enum class WindowKind { rectangular, hamming, hann, blackman };

// F x T power matrix, F == stft length. The frequency axis is circularly
// shifted so row F/2 is zero Doppler and positive complex frequency sits
// above it; with the synthesis phase convention an approaching scatterer
// therefore lands in the lower half-plane.
struct Spectrogram {
    Eigen::MatrixXd power;
    double look_angle_deg = 0.0;
    int hop = 1;
    WindowKind window = WindowKind::hamming;
};

struct GatePolicy {
    enum class Mode { explicit_bounds, auto_energy };
    Mode mode = Mode::auto_energy;
    int lo = 0;
    int hi = 0;
    double energy_fraction = 0.95;

    static GatePolicy explicit_bounds(int lo, int hi) {
        return {Mode::explicit_bounds, lo, hi, 0.0};
    }
    static GatePolicy auto_energy(double fraction) {
        return {Mode::auto_energy, 0, 0, fraction};
    }
};

// Everything process_example needs besides the cube itself.
struct ChainConfig {
    WindowKind window = WindowKind::hamming;
    int stft_len = 128;  // H
    int hop = 31;
    int frames = 384;
    GatePolicy gate = GatePolicy::auto_energy(0.95);
};

// out[n] = sum_m cube[n, m] * weights[m].
Eigen::VectorXcd apply_beamformer(const RawDataCube& cube, const BeamWeights& weights);

// Stack consecutive PRIs into columns: column q holds x[qP .. qP+P-1].
Eigen::MatrixXcd reshape_to_pri(const Eigen::VectorXcd& x, int samples_per_pri);

// Column-wise unnormalized P-point DFT; range_bin_m = c / (2 * bandwidth).
RangeMap range_map(const Eigen::MatrixXcd& x2d, double look_angle_deg,
                   double bandwidth_hz);

// Explicit policy returns its bounds. Auto policy returns the smallest
// contiguous interval around the global-peak bin of the slow-time-integrated
// range profile whose energy share reaches energy_fraction.
GateBounds select_gate(const RangeMap& map, const GatePolicy& policy);

// samples[q] = sum of rows lo..hi of column q (coherent sum).
SlowTimeSignal collapse_range(const RangeMap& map, GateBounds gate);

std::vector<double> make_window(WindowKind kind, int length);

// power[k, t] = |sum_m h(m) sig[t*hop + m] e^{-j 2 pi k m / H}|^2 with the
// tail zero-padded so exactly `frames` frames exist, then zero-centered.
Spectrogram spectrogram(const SlowTimeSignal& sig, WindowKind window, int stft_len,
                        int hop, int frames);

// Full per-example chain for both look angles; the gate policy is applied
// independently per angle.
std::pair<Spectrogram, Spectrogram> process_example(const RawDataCube& cube,
                                                    double theta1_deg, double theta2_deg,
                                                    const ChainConfig& config);

// Same chain driven by explicit weights (used for single-antenna processing
// with a selection vector).
Spectrogram process_with_weights(const RawDataCube& cube, const BeamWeights& weights,
                                 const ChainConfig& config);

}  // namespace microbeam
