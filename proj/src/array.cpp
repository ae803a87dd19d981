#include "microbeam/array.hpp"

#include <cmath>
#include <string>

#include "microbeam/errors.hpp"

namespace microbeam {

namespace {

void validate_angle(double theta_deg) {
    if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
        throw domain_error("azimuth angle must lie in [0, 180] deg, got " +
                           std::to_string(theta_deg));
    }
}

}  // namespace

double cos_deg(double theta_deg) {
    return std::sin((90.0 - theta_deg) * M_PI / 180.0);
}

void validate_geometry(const ArrayGeometry& geometry) {
    if (geometry.num_elements < 1) {
        throw domain_error("array needs at least one element");
    }
    if (!(geometry.spacing_wavelengths > 0.0)) {
        throw domain_error("element spacing must be positive");
    }
}

SteeringVector steering_vector(const ArrayGeometry& geometry, double theta_deg) {
    validate_geometry(geometry);
    validate_angle(theta_deg);

    const double phase_step = 2.0 * M_PI * geometry.spacing_wavelengths * cos_deg(theta_deg);
    SteeringVector sv;
    sv.angle_deg = theta_deg;
    sv.elements.resize(geometry.num_elements);
    for (int m = 0; m < geometry.num_elements; ++m) {
        sv.elements[m] = std::polar(1.0, phase_step * m);
    }
    return sv;
}

BeamWeights beam_weights(const ArrayGeometry& geometry, double theta_deg) {
    BeamWeights bw;
    bw.look_angle_deg = theta_deg;
    bw.weights = steering_vector(geometry, theta_deg).elements.conjugate();
    return bw;
}

std::complex<double> array_response(const ArrayGeometry& geometry, double look_deg,
                                    double source_deg) {
    const SteeringVector look = steering_vector(geometry, look_deg);
    const SteeringVector source = steering_vector(geometry, source_deg);
    return look.elements.dot(source.elements);  // Eigen dot conjugates the left side
}

}  // namespace microbeam
