#include "microbeam/scene.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "microbeam/errors.hpp"
#include "microbeam/rng.hpp"

namespace microbeam {

namespace {

// Seed streams hung off the per-example / per-walker seeds.
constexpr std::uint64_t kNoiseStream = 0xA0;
constexpr std::uint64_t kWalkerStream = 0xB0;
constexpr std::uint64_t kJitterStream = 0xC0;

struct WalkerPhases {
    double limb_a;      // limb B is opposite-phase
    double bob;
    double torso_refl;  // initial reflectivity phases of the three scatterers
    double limb_a_refl;
    double limb_b_refl;
};

WalkerPhases walker_phases(const WalkerSpec& spec) {
    RandomSource rng(mix_seed(spec.phase_seed, kWalkerStream));
    WalkerPhases p;
    p.limb_a = rng.uniform(0.0, 2.0 * M_PI);
    p.bob = rng.uniform(0.0, 2.0 * M_PI);
    p.torso_refl = rng.uniform(0.0, 2.0 * M_PI);
    p.limb_a_refl = rng.uniform(0.0, 2.0 * M_PI);
    p.limb_b_refl = rng.uniform(0.0, 2.0 * M_PI);
    return p;
}

void validate_walker(const WalkerSpec& w, const RadarParams& params) {
    if (!(w.initial_range_m > 0.0)) {
        throw domain_error("walker initial range must be positive");
    }
    if (w.gait_hz <= 0.0 && w.limb_sway_mps > 0.0) {
        throw domain_error("gait rate must be positive when limb sway is nonzero");
    }
    if (w.limb_sway_mps < 0.0 || w.torso_rcs < 0.0 || w.limb_rcs < 0.0) {
        throw domain_error("walker RCS and sway amplitudes must be non-negative");
    }
    const double doppler_limit = params.wavelength_m() / (4.0 * params.pri_s);
    if (!(std::abs(w.radial_speed_mps) + w.limb_sway_mps < doppler_limit)) {
        throw config_error("walker velocity " + std::to_string(w.radial_speed_mps) +
                           " + sway " + std::to_string(w.limb_sway_mps) +
                           " m/s exceeds the unambiguous Doppler limit " +
                           std::to_string(doppler_limit) + " m/s");
    }
}

}  // namespace

void RadarParams::validate() const {
    if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0) || !(pri_s > 0.0) ||
        !(adc_rate_sps > 0.0)) {
        throw domain_error("radar rates and durations must be strictly positive");
    }
    if (samples_per_pri < 1 || num_pri < 1 || num_rx < 1) {
        throw domain_error("radar sample counts must be at least 1");
    }
    if (samples_per_pri != static_cast<int>(std::llround(adc_rate_sps * pri_s))) {
        throw domain_error("samples_per_pri must equal round(adc_rate_sps * pri_s)");
    }
    if (!(spacing_wavelengths > 0.0)) {
        throw domain_error("element spacing must be positive");
    }
    if (noise_variance < 0.0) {
        throw domain_error("noise variance must be non-negative");
    }
}

namespace {

std::vector<ScattererState> states_at(const WalkerSpec& spec, const WalkerPhases& phases,
                                      double t_s) {
    const double bulk_range = spec.initial_range_m + spec.radial_speed_mps * t_s;

    const double bob_amp = kTorsoBobFraction * spec.limb_sway_mps;
    const double bob_hz = 2.0 * spec.gait_hz;  // two steps per gait cycle
    double torso_range = bulk_range;
    double torso_vel = spec.radial_speed_mps;
    if (bob_amp > 0.0) {
        const double w = 2.0 * M_PI * bob_hz;
        // displacement integrates the velocity sinusoid; anchored so that
        // range(0) == initial_range_m exactly
        torso_range -= bob_amp / w * (std::cos(w * t_s + phases.bob) - std::cos(phases.bob));
        torso_vel += bob_amp * std::sin(w * t_s + phases.bob);
    }

    std::vector<ScattererState> states;
    states.reserve(3);
    states.push_back({torso_range, torso_vel, spec.torso_rcs});

    const double limb_phase[2] = {phases.limb_a, phases.limb_a + M_PI};
    for (int i = 0; i < 2; ++i) {
        double range = torso_range;
        double vel = torso_vel;
        if (spec.limb_sway_mps > 0.0) {
            const double w = 2.0 * M_PI * spec.gait_hz;
            range -= spec.limb_sway_mps / w *
                     (std::cos(w * t_s + limb_phase[i]) - std::cos(limb_phase[i]));
            vel += spec.limb_sway_mps * std::sin(w * t_s + limb_phase[i]);
        }
        states.push_back({range, vel, spec.limb_rcs});
    }
    return states;
}

}  // namespace

std::vector<ScattererState> walker_state(const WalkerSpec& spec, double t_s,
                                         double duration_s) {
    if (t_s < 0.0 || t_s > duration_s) {
        throw domain_error("walker state requested outside the observation window");
    }
    if (spec.gait_hz <= 0.0 && spec.limb_sway_mps > 0.0) {
        throw domain_error("gait rate must be positive when limb sway is nonzero");
    }
    return states_at(spec, walker_phases(spec), t_s);
}

void validate_scene(const SceneSpec& scene, const RadarParams& params) {
    params.validate();
    if (scene.duration_s <= 0.0) {
        throw domain_error("scene duration must be positive");
    }
    for (const WalkerSpec& w : scene.walkers) {
        validate_walker(w, params);
    }
    if (scene.walkers.size() == 2 && (scene.class_label == 1 || scene.class_label == 2)) {
        const double v1 = scene.walkers[0].radial_speed_mps;
        const double v2 = scene.walkers[1].radial_speed_mps;
        const bool class1 = v1 < 0.0 && v2 > 0.0;
        const bool class2 = v1 > 0.0 && v2 < 0.0;
        if ((scene.class_label == 1 && !class1) || (scene.class_label == 2 && !class2)) {
            throw config_error("class label does not match walker approach/recede pattern");
        }
    }
}

RawDataCube synthesize(const SceneSpec& scene, const RadarParams& params) {
    validate_scene(scene, params);

    const int P = params.samples_per_pri;
    const int Q = params.num_pri;
    const int M = params.num_rx;
    const std::int64_t N = params.total_samples();
    if (scene.duration_s < params.duration_s() - 1e-12) {
        throw config_error("scene duration shorter than the radar observation window");
    }

    RawDataCube cube;
    cube.params = params;
    cube.label = scene.class_label;
    cube.data = Eigen::MatrixXcd::Zero(N, M);

    const double lambda = params.wavelength_m();
    const double slope = params.chirp_slope_hz_per_s();
    const double fs = params.adc_rate_sps;

    Eigen::VectorXcd base(P);
    for (const WalkerSpec& walker : scene.walkers) {
        const SteeringVector sv = steering_vector(params.geometry(), walker.azimuth_deg);
        const WalkerPhases phases = walker_phases(walker);
        const double refl_phase[3] = {phases.torso_refl, phases.limb_a_refl,
                                      phases.limb_b_refl};

        for (int q = 0; q < Q; ++q) {
            const double t_q = q * params.pri_s;  // range evaluated at PRI start
            const std::vector<ScattererState> states = states_at(walker, phases, t_q);

            base.setZero();
            for (std::size_t s = 0; s < states.size(); ++s) {
                const ScattererState& st = states[s];
                if (st.amplitude == 0.0) continue;
                if (st.range_m <= 0.0) {
                    throw config_error("walker range became non-positive during the window");
                }
                const double beat_hz = 2.0 * st.range_m * slope / kSpeedOfLight;
                const std::complex<double> step = std::polar(1.0, 2.0 * M_PI * beat_hz / fs);
                std::complex<double> acc =
                    std::polar(st.amplitude,
                               4.0 * M_PI * st.range_m / lambda + refl_phase[s]);
                for (int p = 0; p < P; ++p) {
                    base[p] += acc;
                    acc *= step;
                }
            }
            for (int m = 0; m < M; ++m) {
                cube.data.col(m).segment(static_cast<std::int64_t>(q) * P, P) +=
                    base * sv.elements[m];
            }
        }
    }

    if (params.noise_variance > 0.0) {
        RandomSource rng(mix_seed(scene.noise_seed, kNoiseStream));
        const double sigma = std::sqrt(params.noise_variance / 2.0);
        for (std::int64_t n = 0; n < N; ++n) {
            for (int m = 0; m < M; ++m) {
                cube.data(n, m) +=
                    std::complex<double>(sigma * rng.gaussian(), sigma * rng.gaussian());
            }
        }
    }
    return cube;
}

std::uint64_t dataset_example_seed(const DatasetSpec& spec, int index) {
    return mix_seed(spec.master_seed, static_cast<std::uint64_t>(index));
}

int dataset_label(const DatasetSpec& spec, int index) {
    if (index < 0 || index >= spec.count_class1 + spec.count_class2) {
        throw domain_error("dataset example index out of range");
    }
    return index < spec.count_class1 ? 1 : 2;
}

SceneSpec dataset_scene(const DatasetSpec& spec, int index) {
    const int label = dataset_label(spec, index);
    const std::uint64_t seed = dataset_example_seed(spec, index);
    RandomSource jitter(mix_seed(seed, kJitterStream));
    const double duration = spec.radar.duration_s();

    SceneSpec scene;
    scene.class_label = label;
    scene.duration_s = duration;
    scene.noise_seed = seed;

    const double theta[2] = {spec.theta1_deg, spec.theta2_deg};
    for (int w = 0; w < 2; ++w) {
        const bool approaching = (label == 1) == (w == 0);
        WalkerSpec walker;
        walker.azimuth_deg = theta[w];
        const double speed = jitter.uniform(spec.speed_min_mps, spec.speed_max_mps);
        const double gait = jitter.uniform(spec.gait_min_hz, spec.gait_max_hz);
        const double closest =
            jitter.uniform(spec.closest_range_min_m, spec.closest_range_max_m);
        walker.radial_speed_mps = approaching ? -speed : speed;
        walker.initial_range_m = approaching ? closest + speed * duration : closest;
        walker.gait_hz = gait;
        walker.torso_rcs = spec.torso_rcs;
        walker.limb_rcs = spec.limb_rcs;
        walker.limb_sway_mps = spec.limb_sway_mps;
        walker.phase_seed = mix_seed(seed, static_cast<std::uint64_t>(w + 1));
        scene.walkers.push_back(walker);
    }
    return scene;
}

std::vector<RawDataCube> make_dataset(const DatasetSpec& spec) {
    const int total = spec.count_class1 + spec.count_class2;
    if (spec.count_class1 < 0 || spec.count_class2 < 0 || total == 0) {
        throw domain_error("dataset must request at least one example");
    }
    std::vector<RawDataCube> cubes;
    cubes.reserve(total);
    for (int i = 0; i < total; ++i) {
        cubes.push_back(synthesize(dataset_scene(spec, i), spec.radar));
    }
    return cubes;
}

}  // namespace microbeam
