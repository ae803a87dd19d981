#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "microbeam/array.hpp"

namespace microbeam {

inline constexpr double kSpeedOfLight = 299792458.0;

// Dechirped FMCW acquisition parameters. samples_per_pri (P) must equal
// round(adc_rate_sps * pri_s); total fast-time length is N = P * Q.
struct RadarParams {
    double carrier_hz = 77e9;
    double bandwidth_hz = 5e9;
    double pri_s = 1e-3;
    double adc_rate_sps = 512e3;
    int samples_per_pri = 512;   // P
    int num_pri = 12000;         // Q
    int num_rx = 4;              // M
    double spacing_wavelengths = 0.5;
    double noise_variance = 0.0;  // sigma_v^2, per complex sample per channel

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double chirp_slope_hz_per_s() const { return bandwidth_hz / pri_s; }
    double prf_hz() const { return 1.0 / pri_s; }
    double duration_s() const { return num_pri * pri_s; }
    std::int64_t total_samples() const {
        return static_cast<std::int64_t>(samples_per_pri) * num_pri;
    }
    ArrayGeometry geometry() const { return {num_rx, spacing_wavelengths}; }

    void validate() const;
};

// One point-scatterer walker: torso plus two limbs with opposite-phase
// sinusoidal velocity sway about the torso. Azimuth is constant (pure
// radial walk); radial_speed_mps < 0 means approaching the radar.
struct WalkerSpec {
    double azimuth_deg = 90.0;
    double initial_range_m = 5.0;
    double radial_speed_mps = 0.0;
    double gait_hz = 1.0;
    double torso_rcs = 1.0;
    double limb_rcs = 0.4;
    double limb_sway_mps = 0.15;
    std::uint64_t phase_seed = 0;
};

// Torso bob rides on the limb sway amplitude so that limb_sway_mps = 0
// reduces the walker to a single constant-velocity scatterer.
inline constexpr double kTorsoBobFraction = 0.1;

struct ScattererState {
    double range_m = 0.0;
    double radial_velocity_mps = 0.0;
    double amplitude = 0.0;
};

struct SceneSpec {
    std::vector<WalkerSpec> walkers;
    int class_label = 0;  // 0 = unlabeled, otherwise 1 or 2
    double duration_s = 0.0;
    std::uint64_t noise_seed = 0;
};

// Complex N x M received matrix; row n is the array snapshot at fast/slow
// time index n, column m the m-th receive channel.
struct RawDataCube {
    Eigen::MatrixXcd data;
    RadarParams params;
    int label = 0;  // 0 = unlabeled
};

// Kinematic states (torso, limb A, limb B) of one walker at scene time t.
std::vector<ScattererState> walker_state(const WalkerSpec& spec, double t_s,
                                         double duration_s);

void validate_scene(const SceneSpec& scene, const RadarParams& params);

// Point-scatterer synthesis of the dechirped multi-channel return:
// each scatterer contributes, on channel m of PRI q at fast-time sample p,
//   amplitude * exp(j 2 pi f_b p / f_s) * exp(j 4 pi R(t_q) / lambda) * a_m(theta)
// with f_b = 2 R slope / c. With this phase convention an approaching
// scatterer (dR/dt < 0) produces a negative slow-time Doppler frequency.
// Circular Gaussian noise of variance noise_variance is added per sample
// per channel from noise_seed. Deterministic in (scene, params).
RawDataCube synthesize(const SceneSpec& scene, const RadarParams& params);

// Experiment-level dataset description: two walkers at fixed azimuths,
// per-example kinematic jitter, exact class balance.
// Class 1: theta1 walker approaches, theta2 walker recedes. Class 2: reversed.
struct DatasetSpec {
    RadarParams radar;
    double theta1_deg = 75.0;
    double theta2_deg = 105.0;
    int count_class1 = 60;
    int count_class2 = 60;
    double speed_min_mps = 0.4;
    double speed_max_mps = 0.8;
    double gait_min_hz = 0.8;
    double gait_max_hz = 1.2;
    // Jitter on the closest range of the trajectory; approaching walkers
    // start at closest + |v| * duration so the end of the walk lands here.
    double closest_range_min_m = 2.5;
    double closest_range_max_m = 4.0;
    double torso_rcs = 1.0;
    double limb_rcs = 0.4;
    double limb_sway_mps = 0.15;
    std::uint64_t master_seed = 1;
};

// Deterministic scene for example `index` of the dataset (also used by the
// manifest to record per-example seeds).
SceneSpec dataset_scene(const DatasetSpec& spec, int index);
std::uint64_t dataset_example_seed(const DatasetSpec& spec, int index);
int dataset_label(const DatasetSpec& spec, int index);

std::vector<RawDataCube> make_dataset(const DatasetSpec& spec);

}  // namespace microbeam
