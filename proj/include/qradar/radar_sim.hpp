// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qradar/common.hpp"

namespace qradar::radar {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadarConfig {
    double carrier_freq = 9.0e9;
    double sample_rate = 1.0e4;
    double duration = 0.5;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    std::size_t sample_count() const;
    /// Throws ParameterRange on non-positive rate, duration or carrier.
    void validate() const;
};

enum class TargetClass : int { Helicopter = 0, Propeller = 1, Jet = 2 };

inline constexpr int kNumClasses = 3;
std::string_view to_string(TargetClass c);

struct TargetParams {
    TargetClass class_label = TargetClass::Helicopter;
    double body_velocity = 0.0;   // m/s, radial
    int blade_count = 4;          // per rotor / propeller
    double rotation_freq = 20.0;  // Hz
    double blade_length = 3.0;    // m
    double engine_mod_freq = 0.0; // Hz (jet only)
    int scatterers_per_blade = 10;

    /// Throws ParameterRange when the class invariants are violated.
    void validate() const;
};

/// Draws parameters uniformly inside the class ranges.
TargetParams sample_target_params(TargetClass c, Rng &rng);

enum class Weather : int { Clear = 0, LightRain = 1, HeavyRain = 2, Fog = 3 };

inline constexpr int kNumWeather = 4;
std::string_view to_string(Weather w);

struct AttenuationRange {
    double lo;
    double hi;
};
AttenuationRange attenuation_range(Weather w);

struct Environment {
    Weather weather = Weather::Clear;
    double attenuation_db_per_km = 0.0;
    double path_km = 1.0;
    double turbulence_intensity = 0.0;
    double snr_db = 10.0;

    void validate() const;
};

struct ComplexSignal {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;

    std::size_t size() const { return samples.size(); }
    double mean_power() const;
};

/// One rotor of rigid blades, each carrying evenly spaced point scatterers.
struct Rotor {
    int blades = 1;
    double rotation_freq = 20.0; // Hz
    double blade_length = 3.0;   // m
    int scatterers_per_blade = 10;
    double blade_amplitude = 1.0; // shared by the scatterers of one blade
    double start_angle = 0.0;     // rad, angle of blade 0 at t = 0
};

/// Sum over blades k and scatterers m of (A/M) exp(j (4 pi / lambda) r_m sin(2 pi f t + psi_k)),
/// r_m = L (m + 1) / M, psi_k = start_angle + 2 pi k / blades. No body Doppler, no normalization.
std::vector<std::complex<double>> rotor_return(const RadarConfig &config, const Rotor &rotor);

/// Noiseless point-scatterer return for one target, normalized to unit mean power.
ComplexSignal synth_target(const RadarConfig &config, const TargetParams &params, Rng &rng);

/// One-way field attenuation 10^(-alpha * R / 20). Clear weather is an exact identity.
ComplexSignal apply_weather(const ComplexSignal &signal, const Environment &env);

/// Multiplicative amplitude/phase scintillation driven by two independent
/// unit-variance first-order low-pass Gaussian processes.
ComplexSignal apply_turbulence(const ComplexSignal &signal, const Environment &env, Rng &rng);

inline constexpr double kTurbulenceCutoffHz = 50.0;

/// Circular complex Gaussian noise at the requested SNR relative to the measured signal power.
ComplexSignal add_awgn(const ComplexSignal &signal, double snr_db, Rng &rng);

struct LabeledSignal {
    ComplexSignal signal;
    TargetClass label = TargetClass::Helicopter;
    TargetParams params;
    Environment env;
    std::uint64_t seed = 0; // derived per-sample stream seed
};

/// n_per_class samples per class, ordered class-major. Sample (c, i) draws from
/// its own stream derived from (seed, c, i), so the result does not depend on
/// the thread count. A fixed SNR replaces the drawn one after the draw, so the
/// rest of each stream is unchanged.
std::vector<LabeledSignal> generate_dataset(const RadarConfig &config, int n_per_class, std::uint64_t seed,
                                            unsigned threads = 1, std::optional<double> fixed_snr_db = std::nullopt);

} // namespace qradar::radar
