// SPDX-License-Identifier: Apache-2.0
#include "qradar/radar_sim.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qradar::radar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative amplitudes of the scattering centres. Body return is the reference.
constexpr double kHelicopterBladeAmplitude = 1.2;
constexpr double kPropellerBladeAmplitude = 1.0;

constexpr int kPropellerBlades = 3;
constexpr int kPropellerCount = 2;
constexpr double kPropellerRotationHz = 50.0;
constexpr double kPropellerRadius = 1.5;

constexpr double kJetModulationIndex = 0.3;
const double kJetSecondHarmonic = std::pow(10.0, -6.0 / 20.0);
const double kJetThirdHarmonic = std::pow(10.0, -12.0 / 20.0);

struct VelocityRange {
    double lo, hi;
};

VelocityRange body_velocity_range(TargetClass c)
{
    switch (c) {
    case TargetClass::Helicopter: return {0.0, 50.0};
    case TargetClass::Propeller: return {50.0, 120.0};
    case TargetClass::Jet: return {150.0, 300.0};
    }
    return {0.0, 0.0};
}

[[noreturn]] void range_error(const std::string &what)
{
    throw Error(ErrorKind::ParameterRange, what);
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

void normalize_power(ComplexSignal &s)
{
    double p = s.mean_power();
    if (!(p > 0.0) || !std::isfinite(p))
        throw Error(ErrorKind::DegenerateInput, "synthesized signal has zero or non-finite power");
    double g = 1.0 / std::sqrt(p);
    for (auto &v : s.samples)
        v *= g;
}

} // namespace

std::size_t RadarConfig::sample_count() const
{
    return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

void RadarConfig::validate() const
{
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        range_error("carrier_freq must be positive");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        range_error("sample_rate must be positive");
    if (!(duration > 0.0) || !std::isfinite(duration))
        range_error("duration must be positive");
    if (sample_count() == 0)
        range_error("sample_rate * duration rounds to zero samples");
}

std::string_view to_string(TargetClass c)
{
    switch (c) {
    case TargetClass::Helicopter: return "helicopter";
    case TargetClass::Propeller: return "propeller";
    case TargetClass::Jet: return "jet";
    }
    return "unknown";
}

std::string_view to_string(Weather w)
{
    switch (w) {
    case Weather::Clear: return "clear";
    case Weather::LightRain: return "light_rain";
    case Weather::HeavyRain: return "heavy_rain";
    case Weather::Fog: return "fog";
    }
    return "unknown";
}

AttenuationRange attenuation_range(Weather w)
{
    switch (w) {
    case Weather::Clear: return {0.0, 0.0};
    case Weather::LightRain: return {0.5, 2.0};
    case Weather::HeavyRain: return {5.0, 15.0};
    case Weather::Fog: return {0.1, 0.5};
    }
    return {0.0, 0.0};
}

void TargetParams::validate() const
{
    std::ostringstream msg;
    msg << to_string(class_label) << ": ";
    if (scatterers_per_blade < 1)
        range_error(msg.str() + "scatterers_per_blade must be >= 1");
    if (!std::isfinite(body_velocity))
        range_error(msg.str() + "body_velocity must be finite");
    switch (class_label) {
    case TargetClass::Helicopter:
        if (blade_count < 3 || blade_count > 5)
            range_error(msg.str() + "blade_count must be in [3, 5]");
        if (!within(rotation_freq, 15.0, 25.0))
            range_error(msg.str() + "rotation_freq must be in [15, 25] Hz");
        if (!within(blade_length, 2.5, 4.0))
            range_error(msg.str() + "blade_length must be in [2.5, 4.0] m");
        break;
    case TargetClass::Propeller:
        if (blade_count != kPropellerBlades)
            range_error(msg.str() + "blade_count must be 3 per propeller");
        if (rotation_freq != kPropellerRotationHz)
            range_error(msg.str() + "rotation_freq must be 50 Hz");
        if (blade_length != kPropellerRadius)
            range_error(msg.str() + "blade_length must be 1.5 m");
        break;
    case TargetClass::Jet:
        if (!within(engine_mod_freq, 80.0, 120.0))
            range_error(msg.str() + "engine_mod_freq must be in [80, 120] Hz");
        break;
    }
}

TargetParams sample_target_params(TargetClass c, Rng &rng)
{
    TargetParams p;
    p.class_label = c;
    auto v = body_velocity_range(c);
    p.body_velocity = uniform(rng, v.lo, v.hi);
    switch (c) {
    case TargetClass::Helicopter:
        p.blade_count = 3 + static_cast<int>(rng() % 3);
        p.rotation_freq = uniform(rng, 15.0, 25.0);
        p.blade_length = uniform(rng, 2.5, 4.0);
        break;
    case TargetClass::Propeller:
        p.blade_count = kPropellerBlades;
        p.rotation_freq = kPropellerRotationHz;
        p.blade_length = kPropellerRadius;
        break;
    case TargetClass::Jet:
        p.blade_count = 0;
        p.rotation_freq = 0.0;
        p.blade_length = 0.0;
        p.engine_mod_freq = uniform(rng, 80.0, 120.0);
        break;
    }
    return p;
}

void Environment::validate() const
{
    auto r = attenuation_range(weather);
    if (!within(attenuation_db_per_km, r.lo, r.hi))
        range_error(std::string("attenuation for ") + std::string(to_string(weather)) + " out of range");
    if (!(path_km >= 0.0))
        range_error("path_km must be non-negative");
    if (!within(turbulence_intensity, 0.0, 1.0))
        range_error("turbulence_intensity must be in [0, 1]");
    if (!std::isfinite(snr_db))
        range_error("snr_db must be finite");
}

double ComplexSignal::mean_power() const
{
    if (samples.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto &v : samples)
        acc += std::norm(v);
    return acc / static_cast<double>(samples.size());
}

std::vector<std::complex<double>> rotor_return(const RadarConfig &config, const Rotor &rotor)
{
    config.validate();
    if (rotor.blades < 1 || rotor.scatterers_per_blade < 1)
        range_error("rotor needs at least one blade and one scatterer per blade");
    std::vector<std::complex<double>> out(config.sample_count(), {0.0, 0.0});
    const double dt = 1.0 / config.sample_rate;
    const double k = 4.0 * std::numbers::pi / config.wavelength();
    const int m_count = rotor.scatterers_per_blade;
    const double amp = rotor.blade_amplitude / m_count;
    for (int b = 0; b < rotor.blades; ++b) {
        const double psi = rotor.start_angle + kTwoPi * b / rotor.blades;
        for (int m = 0; m < m_count; ++m) {
            const double r = rotor.blade_length * (m + 1) / m_count;
            for (std::size_t n = 0; n < out.size(); ++n) {
                const double t = static_cast<double>(n) * dt;
                out[n] += amp * std::polar(1.0, k * r * std::sin(kTwoPi * rotor.rotation_freq * t + psi));
            }
        }
    }
    return out;
}

ComplexSignal synth_target(const RadarConfig &config, const TargetParams &params, Rng &rng)
{
    config.validate();
    params.validate();

    ComplexSignal s;
    s.sample_rate = config.sample_rate;
    s.samples.assign(config.sample_count(), {0.0, 0.0});

    const double dt = 1.0 / config.sample_rate;
    const double lambda = config.wavelength();
    const double doppler = 2.0 * params.body_velocity / lambda;
    const double body_phase = uniform(rng, 0.0, kTwoPi);

    // The whole airframe translates, so every scatterer carries the body Doppler.
    std::vector<std::complex<double>> rotors(s.size(), {0.0, 0.0});
    switch (params.class_label) {
    case TargetClass::Helicopter:
        rotors = rotor_return(config, Rotor{params.blade_count, params.rotation_freq, params.blade_length,
                                            params.scatterers_per_blade, kHelicopterBladeAmplitude,
                                            uniform(rng, 0.0, kTwoPi)});
        break;
    case TargetClass::Propeller:
        for (int p = 0; p < kPropellerCount; ++p) {
            const double start = uniform(rng, 0.0, kTwoPi);
            const auto carrier = std::polar(1.0, p == 0 ? 0.0 : uniform(rng, 0.0, kTwoPi));
            const auto prop = rotor_return(config, Rotor{params.blade_count, params.rotation_freq, params.blade_length,
                                                         params.scatterers_per_blade, kPropellerBladeAmplitude, start});
            for (std::size_t n = 0; n < rotors.size(); ++n)
                rotors[n] += carrier * prop[n];
        }
        break;
    case TargetClass::Jet:
        break;
    }

    std::array<double, 3> jem_phase{};
    if (params.class_label == TargetClass::Jet)
        for (auto &ph : jem_phase)
            ph = uniform(rng, 0.0, kTwoPi);

    for (std::size_t n = 0; n < s.size(); ++n) {
        const double t = static_cast<double>(n) * dt;
        double phase = kTwoPi * doppler * t + body_phase;
        std::complex<double> v{1.0, 0.0};
        if (params.class_label == TargetClass::Jet) {
            const double w = kTwoPi * params.engine_mod_freq * t;
            phase += kJetModulationIndex * (std::sin(w + jem_phase[0]) +
                                            kJetSecondHarmonic * std::sin(2.0 * w + jem_phase[1]) +
                                            kJetThirdHarmonic * std::sin(3.0 * w + jem_phase[2]));
        }
        v += rotors[n];
        s.samples[n] = v * std::polar(1.0, phase);
    }

    normalize_power(s);
    return s;
}

ComplexSignal apply_weather(const ComplexSignal &signal, const Environment &env)
{
    if (!(env.path_km >= 0.0))
        range_error("path_km must be non-negative");
    auto r = attenuation_range(env.weather);
    if (!within(env.attenuation_db_per_km, r.lo, r.hi))
        range_error(std::string("attenuation for ") + std::string(to_string(env.weather)) + " out of range");
    if (env.weather == Weather::Clear)
        return signal;

    ComplexSignal out = signal;
    const double gain = std::pow(10.0, -env.attenuation_db_per_km * env.path_km / 20.0);
    for (auto &v : out.samples)
        v *= gain;
    return out;
}

ComplexSignal apply_turbulence(const ComplexSignal &signal, const Environment &env, Rng &rng)
{
    if (!within(env.turbulence_intensity, 0.0, 1.0))
        range_error("turbulence_intensity must be in [0, 1]");
    if (env.turbulence_intensity == 0.0 || signal.samples.empty())
        return signal;

    // AR(1) with unit stationary variance: y[n] = rho*y[n-1] + sqrt(1-rho^2)*w[n].
    const double rho = std::exp(-kTwoPi * kTurbulenceCutoffHz / signal.sample_rate);
    const double drive = std::sqrt(1.0 - rho * rho);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double a = gauss(rng);
    double phi = gauss(rng);

    ComplexSignal out = signal;
    const double intensity = env.turbulence_intensity;
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (n > 0) {
            a = rho * a + drive * gauss(rng);
            phi = rho * phi + drive * gauss(rng);
        }
        out.samples[n] *= (1.0 + intensity * a) * std::polar(1.0, intensity * phi);
    }
    return out;
}

ComplexSignal add_awgn(const ComplexSignal &signal, double snr_db, Rng &rng)
{
    if (signal.samples.empty())
        throw Error(ErrorKind::InvalidArgument, "add_awgn: empty signal");
    if (!std::isfinite(snr_db))
        range_error("snr_db must be finite");
    const double noise_power = signal.mean_power() / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));

    ComplexSignal out = signal;
    for (auto &v : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += std::complex<double>(re, im);
    }
    return out;
}

std::vector<LabeledSignal> generate_dataset(const RadarConfig &config, int n_per_class, std::uint64_t seed,
                                            unsigned threads, std::optional<double> fixed_snr_db)
{
    if (n_per_class < 1)
        throw Error(ErrorKind::InvalidArgument, "n_per_class must be >= 1");
    config.validate();

    const std::size_t total = static_cast<std::size_t>(n_per_class) * kNumClasses;
    std::vector<LabeledSignal> out(total);
    parallel_for(total, threads, [&](std::size_t idx) {
        const auto cls = static_cast<TargetClass>(idx / n_per_class);
        const auto i = idx % n_per_class;
        LabeledSignal &item = out[idx];
        item.seed = derive_seed(seed, {static_cast<std::uint64_t>(cls), i});
        Rng rng(item.seed);

        item.label = cls;
        item.params = sample_target_params(cls, rng);
        item.env.weather = static_cast<Weather>(rng() % kNumWeather);
        auto r = attenuation_range(item.env.weather);
        item.env.attenuation_db_per_km = uniform(rng, r.lo, r.hi);
        item.env.path_km = uniform(rng, 1.0, 10.0);
        item.env.turbulence_intensity = uniform(rng, 0.0, 0.3);
        item.env.snr_db = uniform(rng, 5.0, 15.0);
        if (fixed_snr_db)
            item.env.snr_db = *fixed_snr_db;

        auto s = synth_target(config, item.params, rng);
        s = apply_weather(s, item.env);
        s = apply_turbulence(s, item.env, rng);
        item.signal = add_awgn(s, item.env.snr_db, rng);
    });
    return out;
}

} // namespace qradar::radar
