#pragma once

#include "uavmd/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace uavmd {

struct LinkBudget {
    double transmit_power = 0.0;    // watts
    double tx_gain = 1.0;           // linear
    double rx_gain = 1.0;           // linear
    double carrier_frequency = 0.0; // Hz
    double system_loss = 1.0;       // linear
    double path_loss = 1.0;         // linear

    double wavelength() const { return speed_of_light / carrier_frequency; }
    void validate() const;
};

struct BodyScatterer {
    double initial_range = 50.0;         // m
    double radial_velocity = 5.0;        // m/s
    double rcs = 0.1;                    // m^2
    double vibration_amplitude = 0.05;   // m
    double vibration_frequency = 100.0;  // Hz
    double vibration_azimuth = 0.0;      // rad
    double elevation = 0.0;              // rad
    double azimuth = 0.0;                // rad

    void validate() const;
};

struct RcsCoefficients {
    std::vector<double> a, b, c;
};

// Tip-scatterer coefficients of a carbon-fibre blade.
RcsCoefficients carbon_fiber_rcs();

struct RotorBlade {
    double length = 0.5;         // m
    double rotation_rate = 80.0; // rotations per second
    double initial_angle = 0.0;  // rad
    double elevation = 0.0;      // rad
    RcsCoefficients rcs = carbon_fiber_rcs();

    void validate() const;
};

struct MotionTerms {
    bool translation = true;
    bool vibration = true;
    bool rotation = true;
};

struct UavScene {
    BodyScatterer body;
    std::vector<RotorBlade> blades;
    LinkBudget link;
    MotionTerms terms;

    void validate() const;
};

// Reference scene: 3.5 GHz carrier, 28 dBm, 18 dB antennas, UAV at 50 m
// closing at 5 m/s, 30 deg elevation, one 0.5 m blade at 80 r/s, 100 Hz body
// vibration of 5 cm at 10 deg azimuth.
UavScene reference_scene();

double db_to_linear(double db);
double dbm_to_watts(double dbm);

enum class ScattererKind { body_translation, body_vibration, blade_tip };

double scatterer_range(ScattererKind kind, double t, const UavScene& scene, std::size_t blade = 0);

// Index of the rotation window containing t; windows have length 1/f_r and
// tile t >= 0 starting at zero.
std::size_t rotation_window(double t, const RotorBlade& blade);

// Signed dynamic RCS of a blade tip.
double rotor_rcs(double t, const RotorBlade& blade);

// Radar-equation intensity, keeping the sign of sigma.
double scattering_amplitude(double sigma, double range, const LinkBudget& link);

struct SceneComponents {
    std::vector<cplx> translation;
    std::vector<cplx> vibration;
    std::vector<cplx> rotation;

    std::vector<cplx> total() const;
};

// Per-term contributions; disabled terms are all-zero.
SceneComponents synthesize_components(const UavScene& scene, std::span<const double> timeline);

// k_D: coherent sum of all enabled scatterers.
std::vector<cplx> synthesize_slow_time(const UavScene& scene, std::span<const double> timeline);

} // namespace uavmd
