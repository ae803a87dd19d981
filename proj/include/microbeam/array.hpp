#pragma once

#include <Eigen/Dense>
#include <complex>

namespace microbeam {

// Uniform linear receive array. Spacing is expressed as d/lambda so the
// geometry is frequency-independent.
struct ArrayGeometry {
    int num_elements = 4;
    double spacing_wavelengths = 0.5;
};

// Per-element phase profile of a plane wave from azimuth theta.
// Element m carries phase 2*pi*(d/lambda)*m*cos(theta), so broadside is
// theta = 90 deg (many texts use sin(theta); this project does not).
struct SteeringVector {
    Eigen::VectorXcd elements;
    double angle_deg = 0.0;
};

// Conjugated steering vector, applied as an inner product per time sample.
struct BeamWeights {
    Eigen::VectorXcd weights;
    double look_angle_deg = 0.0;
};

// cos(theta) evaluated so that 90 deg maps to exactly 0 and 0/180 deg to
// exactly +/-1; keeps the broadside steering vector bit-exact all-ones.
double cos_deg(double theta_deg);

void validate_geometry(const ArrayGeometry& geometry);

SteeringVector steering_vector(const ArrayGeometry& geometry, double theta_deg);

BeamWeights beam_weights(const ArrayGeometry& geometry, double theta_deg);

// sum_m conj(a_m(look)) * a_m(source); |response| peaks at M when the phase
// profiles match. Diagnostic for sidelobe-leakage analysis.
std::complex<double> array_response(const ArrayGeometry& geometry, double look_deg,
                                    double source_deg);

}  // namespace microbeam
