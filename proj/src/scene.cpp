#include "uavmd/scene.hpp"
#include "uavmd/error.hpp"

#include <cmath>
#include <string>

namespace uavmd {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }

void LinkBudget::validate() const {
    if (!(transmit_power > 0 && tx_gain > 0 && rx_gain > 0 && carrier_frequency > 0 && system_loss > 0 &&
          path_loss > 0))
        throw ParameterError("link budget: all fields must be positive");
}

void BodyScatterer::validate() const {
    if (!(initial_range > 0)) throw ParameterError("body: initial range must be positive");
    if (rcs < 0) throw ParameterError("body: rcs must be non-negative");
    if (vibration_amplitude < 0) throw ParameterError("body: vibration amplitude must be non-negative");
    if (vibration_frequency < 0) throw ParameterError("body: vibration frequency must be non-negative");
}

RcsCoefficients carbon_fiber_rcs() {
    return {{1.133, 0.425, 0.7121, -0.1588, 0.1046, 0.0027},
            {356.8, 1445, 608, 1946, 2236, 3513},
            {-0.1997, -2.464, 1.695, 1.319, -0.1277, -0.2433}};
}

void RotorBlade::validate() const {
    if (!(length > 0)) throw ParameterError("blade: length must be positive");
    if (!(rotation_rate > 0)) throw ParameterError("blade: rotation rate must be positive");
    if (rcs.a.empty() || rcs.a.size() != rcs.b.size() || rcs.a.size() != rcs.c.size())
        throw ParameterError("blade: rcs coefficient vectors must share a non-zero length");
}

void UavScene::validate() const {
    body.validate();
    link.validate();
    for (const auto& b : blades) b.validate();
}

UavScene reference_scene() {
    UavScene s;
    s.body.initial_range = 50.0;
    s.body.radial_velocity = 5.0;
    s.body.rcs = 0.1;
    s.body.vibration_amplitude = 0.05;
    s.body.vibration_frequency = 100.0;
    s.body.vibration_azimuth = 10.0 * pi / 180.0;
    s.body.elevation = 30.0 * pi / 180.0;
    s.body.azimuth = 0.0;
    RotorBlade blade;
    blade.elevation = s.body.elevation;
    s.blades.push_back(blade);
    s.link.transmit_power = dbm_to_watts(28.0);
    s.link.tx_gain = db_to_linear(18.0);
    s.link.rx_gain = db_to_linear(18.0);
    s.link.carrier_frequency = 3.5e9;
    return s;
}

double scatterer_range(ScattererKind kind, double t, const UavScene& scene, std::size_t blade) {
    if (t < 0) throw ParameterError("scatterer_range: t must be non-negative");
    const BodyScatterer& b = scene.body;
    const double bulk = b.initial_range + b.radial_velocity * t;
    switch (kind) {
    case ScattererKind::body_translation:
        return bulk;
    case ScattererKind::body_vibration:
        return bulk + b.vibration_amplitude * std::sin(2 * pi * b.vibration_frequency * t) * std::cos(b.elevation) *
                          std::cos(b.vibration_azimuth);
    case ScattererKind::blade_tip: {
        if (blade >= scene.blades.size())
            throw ParameterError("scatterer_range: no blade with index " + std::to_string(blade));
        const RotorBlade& r = scene.blades[blade];
        return bulk + 0.5 * r.length * std::cos(r.elevation) *
                          std::cos(2 * pi * r.rotation_rate * t + r.initial_angle);
    }
    }
    throw ParameterError("scatterer_range: unknown scatterer kind");
}

std::size_t rotation_window(double t, const RotorBlade& blade) {
    return static_cast<std::size_t>(std::floor(t * blade.rotation_rate));
}

double rotor_rcs(double t, const RotorBlade& blade) {
    // The windows tile the time axis, so the gate sum is identically one and
    // the sinusoid phase runs on without resetting at window edges.
    const double arg_scale = blade.rotation_rate / 100.0;
    const double shifted = t + blade.initial_angle / (2 * pi * blade.rotation_rate);
    double sigma = 0.0;
    for (std::size_t i = 0; i < blade.rcs.a.size(); ++i)
        sigma += blade.rcs.a[i] * std::sin(blade.rcs.b[i] * arg_scale * shifted + blade.rcs.c[i]);
    return sigma;
}

double scattering_amplitude(double sigma, double range, const LinkBudget& link) {
    if (!(range > 0)) throw ParameterError("scattering_amplitude: range must be positive");
    const double lambda = link.wavelength();
    const double four_pi_cubed = std::pow(4 * pi, 3);
    return link.transmit_power * link.tx_gain * link.rx_gain * lambda * lambda * sigma /
           (four_pi_cubed * std::pow(range, 4) * link.system_loss * link.path_loss);
}

std::vector<cplx> SceneComponents::total() const {
    std::vector<cplx> out(translation.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = translation[m] + vibration[m] + rotation[m];
    return out;
}

namespace {
cplx echo(double amplitude, double range, double lambda) {
    return amplitude * std::polar(1.0, -4 * pi * range / lambda);
}
} // namespace

SceneComponents synthesize_components(const UavScene& scene, std::span<const double> timeline) {
    if (timeline.empty()) throw ParameterError("synthesize_slow_time: empty timeline");
    for (std::size_t m = 1; m < timeline.size(); ++m)
        if (!(timeline[m] > timeline[m - 1])) throw ParameterError("synthesize_slow_time: timeline not increasing");
    scene.validate();
    const double lambda = scene.link.wavelength();
    const std::size_t M = timeline.size();
    SceneComponents out{std::vector<cplx>(M), std::vector<cplx>(M), std::vector<cplx>(M)};
    for (std::size_t m = 0; m < M; ++m) {
        const double t = timeline[m];
        if (scene.terms.translation) {
            const double R = scatterer_range(ScattererKind::body_translation, t, scene);
            out.translation[m] = echo(scattering_amplitude(scene.body.rcs, R, scene.link), R, lambda);
        }
        if (scene.terms.vibration) {
            const double R = scatterer_range(ScattererKind::body_vibration, t, scene);
            out.vibration[m] = echo(scattering_amplitude(scene.body.rcs, R, scene.link), R, lambda);
        }
        if (scene.terms.rotation) {
            for (std::size_t p = 0; p < scene.blades.size(); ++p) {
                const double R = scatterer_range(ScattererKind::blade_tip, t, scene, p);
                const double sigma = rotor_rcs(t, scene.blades[p]);
                out.rotation[m] += echo(scattering_amplitude(sigma, R, scene.link), R, lambda);
            }
        }
    }
    return out;
}

std::vector<cplx> synthesize_slow_time(const UavScene& scene, std::span<const double> timeline) {
    return synthesize_components(scene, timeline).total();
}

} // namespace uavmd
