// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "qradar/radar_sim.hpp"
#include "qradar/signal_io.hpp"
#include "qradar/spectral_features.hpp"

using namespace qradar;
using namespace qradar::radar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

/// Plain O(N) DFT power at one frequency.
double dft_power(const std::vector<std::complex<double>> &x, double f, double fs)
{
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < x.size(); ++n)
        acc += x[n] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(n) / fs);
    return std::norm(acc);
}

ComplexSignal tone(double f, double fs, std::size_t n, double amp = 1.0)
{
    ComplexSignal s;
    s.sample_rate = fs;
    for (std::size_t i = 0; i < n; ++i)
        s.samples.push_back(std::polar(amp, 2.0 * kPi * f * static_cast<double>(i) / fs));
    return s;
}

TargetParams jet(double v)
{
    TargetParams p;
    p.class_label = TargetClass::Jet;
    p.body_velocity = v;
    p.blade_count = 0;
    p.rotation_freq = 0.0;
    p.blade_length = 0.0;
    p.engine_mod_freq = 100.0;
    return p;
}

TargetParams helicopter(int blades, double f_rot, double length, double v = 0.0)
{
    TargetParams p;
    p.class_label = TargetClass::Helicopter;
    p.blade_count = blades;
    p.rotation_freq = f_rot;
    p.blade_length = length;
    p.body_velocity = v;
    return p;
}

/// Welch estimate (Hann segments, half overlap) of the power at one frequency.
double welch_power(const std::vector<std::complex<double>> &x, double f, double fs, std::size_t seg)
{
    double acc = 0.0;
    int count = 0;
    for (std::size_t a = 0; a + seg <= x.size(); a += seg / 2) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t n = 0; n < seg; ++n) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(seg));
            sum += w * x[a + n] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(n) / fs);
        }
        acc += std::norm(sum);
        ++count;
    }
    return acc / count;
}

/// Width of the contiguous region around the peak that stays within 3 dB of it.
double minus3db_width(const std::vector<std::complex<double>> &x, double fs, double centre, double span, double step)
{
    std::vector<double> f, p;
    for (double v = centre - span; v <= centre + span; v += step) {
        f.push_back(v);
        p.push_back(welch_power(x, v, fs, 256));
    }
    const auto peak = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double half = p[peak] / 2.0;
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && p[lo - 1] >= half)
        --lo;
    while (hi + 1 < p.size() && p[hi + 1] >= half)
        ++hi;
    return f[hi] - f[lo] + step;
}

} // namespace

TEST_CASE("radar config derives the wavelength from the carrier", "[radar]")
{
    RadarConfig c;
    CHECK_THAT(c.wavelength() * c.carrier_freq, WithinRel(kSpeedOfLight, 1e-3));
    CHECK_THAT(c.wavelength(), WithinAbs(0.0333, 1e-4));
    CHECK(c.sample_count() == 5000);

    RadarConfig bad;
    bad.sample_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = RadarConfig{};
    bad.duration = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sampled target parameters respect the class ranges", "[radar]")
{
    Rng rng = make_rng(1);
    for (int i = 0; i < 300; ++i) {
        auto h = sample_target_params(TargetClass::Helicopter, rng);
        REQUIRE_NOTHROW(h.validate());
        CHECK((h.blade_count >= 3 && h.blade_count <= 5));
        CHECK((h.rotation_freq >= 15.0 && h.rotation_freq <= 25.0));
        CHECK((h.blade_length >= 2.5 && h.blade_length <= 4.0));
        CHECK((h.body_velocity >= 0.0 && h.body_velocity <= 50.0));

        auto p = sample_target_params(TargetClass::Propeller, rng);
        REQUIRE_NOTHROW(p.validate());
        CHECK(p.blade_count == 3);
        CHECK(p.rotation_freq == 50.0);
        CHECK(p.blade_length == 1.5);

        auto j = sample_target_params(TargetClass::Jet, rng);
        REQUIRE_NOTHROW(j.validate());
        CHECK((j.engine_mod_freq >= 80.0 && j.engine_mod_freq <= 120.0));
        CHECK((j.body_velocity >= 150.0 && j.body_velocity <= 300.0));
    }
}

TEST_CASE("class invariant violations are parameter-range errors", "[radar]")
{
    auto expect_range = [](const TargetParams &p) {
        try {
            p.validate();
            FAIL("accepted invalid parameters");
        } catch (const Error &e) {
            CHECK(e.kind() == ErrorKind::ParameterRange);
        }
    };
    expect_range(helicopter(6, 20.0, 3.0));
    expect_range(helicopter(4, 30.0, 3.0));
    expect_range(helicopter(4, 20.0, 5.0));
    auto h = helicopter(4, 20.0, 3.0);
    h.scatterers_per_blade = 0;
    expect_range(h);

    TargetParams prop;
    prop.class_label = TargetClass::Propeller;
    prop.blade_count = 3;
    prop.rotation_freq = 40.0;
    prop.blade_length = 1.5;
    expect_range(prop);

    auto j = jet(200.0);
    j.engine_mod_freq = 130.0;
    expect_range(j);

    Rng rng = make_rng(2);
    CHECK_THROWS_AS(synth_target(RadarConfig{}, helicopter(2, 20.0, 3.0), rng), Error);
}

TEST_CASE("synthesized returns have unit mean power and the configured length", "[radar]")
{
    Rng rng = make_rng(3);
    for (auto c : {TargetClass::Helicopter, TargetClass::Propeller, TargetClass::Jet}) {
        for (int i = 0; i < 5; ++i) {
            auto s = synth_target(RadarConfig{}, sample_target_params(c, rng), rng);
            REQUIRE(s.size() == 5000);
            CHECK(s.sample_rate == 1e4);
            CHECK_THAT(s.mean_power(), WithinAbs(1.0, 1e-9));
            for (auto v : s.samples)
                REQUIRE((std::isfinite(v.real()) && std::isfinite(v.imag())));
        }
    }
}

TEST_CASE("constant-velocity body line sits at 2v/lambda", "[radar]")
{
    RadarConfig cfg;
    const double expected = 2.0 * 10.0 / cfg.wavelength();
    CHECK_THAT(expected, WithinAbs(600.6, 0.5)); // 600.6 uses lambda rounded to 0.0333 m

    Rng rng = make_rng(4);
    const auto s = synth_target(cfg, jet(10.0), rng);

    // Spectrogram peak, averaged over frames, within one bin.
    const auto spec = features::stft(s);
    const Eigen::VectorXd mean_mag = spec.magnitudes.colwise().mean();
    Eigen::Index peak = 0;
    mean_mag.maxCoeff(&peak);
    const double bin_width = cfg.sample_rate / 128.0;
    CHECK(std::abs(spec.bin_freqs[static_cast<std::size_t>(peak)] - expected) <= bin_width);

    // Direct DFT scan at 1 Hz resolution around the line.
    double best_f = 0.0, best_p = -1.0;
    for (double f = 400.0; f <= 800.0; f += 1.0) {
        const double p = dft_power(s.samples, f, cfg.sample_rate);
        if (p > best_p) {
            best_p = p;
            best_f = f;
        }
    }
    CHECK(std::abs(best_f - expected) <= 2.0);
}

TEST_CASE("blade tip instantaneous frequency matches the rotating-scatterer phase", "[radar]")
{
    // Sample fast enough that the 22.6 kHz tip excursion is not folded.
    RadarConfig cfg;
    cfg.sample_rate = 4e5;
    cfg.duration = 0.05;
    Rotor tip{1, 20.0, 3.0, 1, 1.0, 0.0};
    const auto s = rotor_return(cfg, tip);

    const double lambda = cfg.wavelength();
    double max_if = 0.0, worst = 0.0;
    for (std::size_t n = 0; n + 1 < s.size(); ++n) {
        // Numerical derivative of the phase from consecutive samples.
        const double dphi = std::arg(s[n + 1] * std::conj(s[n]));
        const double f_num = dphi * cfg.sample_rate / (2.0 * kPi);
        const double t_mid = (static_cast<double>(n) + 0.5) / cfg.sample_rate;
        const double f_ref = 2.0 * (2.0 * kPi * 20.0 * 3.0) / lambda * std::cos(2.0 * kPi * 20.0 * t_mid);
        worst = std::max(worst, std::abs(f_num - f_ref));
        max_if = std::max(max_if, std::abs(f_num));
    }
    CHECK(worst < 5.0); // Hz, midpoint rule error at this sample rate
    CHECK_THAT(max_if, WithinRel(22.6e3, 0.01));
}

TEST_CASE("rotor geometry: blade spacing and scatterer radii", "[radar]")
{
    RadarConfig cfg;
    const double k = 4.0 * kPi / cfg.wavelength();

    // Two opposite blades with one scatterer each form a conjugate pair: purely real sum.
    const auto pair = rotor_return(cfg, Rotor{2, 17.0, 2.0, 1, 1.0, 0.3});
    for (std::size_t n = 0; n < pair.size(); n += 37)
        CHECK_THAT(pair[n].imag(), WithinAbs(0.0, 1e-9));

    // At t = 0 with the blade along the line of sight, scatterer m sits at L (m+1)/M.
    const auto blade = rotor_return(cfg, Rotor{1, 20.0, 3.0, 3, 0.9, kPi / 2.0});
    std::complex<double> ref{0.0, 0.0};
    for (int m = 0; m < 3; ++m)
        ref += (0.9 / 3.0) * std::polar(1.0, k * 3.0 * (m + 1) / 3.0);
    CHECK_THAT(std::abs(blade[0] - ref), WithinAbs(0.0, 1e-12));
}

TEST_CASE("helicopter returns show periodic blade flashes", "[radar]")
{
    // A blade flashes when it is perpendicular to the line of sight. The coherent flash lasts
    // well under one sample here, so what survives sampling repeats N times per revolution;
    // odd blade counts may also show the interleaved half-turn flashes (2N).
    for (auto [blades, f_rot] : {std::pair{4, 20.0}, std::pair{3, 18.0}, std::pair{5, 22.0}}) {
        Rng rng = make_rng(5, {static_cast<std::uint64_t>(blades)});
        const auto s = synth_target(RadarConfig{}, helicopter(blades, f_rot, 3.0), rng);
        const auto spec = features::stft(s, {16, 4, features::WindowKind::Hann});

        std::vector<double> profile;
        for (Eigen::Index fr = 0; fr < spec.n_frames(); ++fr) {
            double e = 0.0;
            for (Eigen::Index b = 0; b < spec.n_bins(); ++b)
                if (std::abs(spec.bin_freqs[static_cast<std::size_t>(b)]) > 1000.0)
                    e += spec.magnitudes(fr, b) * spec.magnitudes(fr, b);
            profile.push_back(e);
        }
        double mean = 0.0;
        for (double v : profile)
            mean += v;
        mean /= static_cast<double>(profile.size());
        for (double &v : profile)
            v -= mean;

        const double frame_rate = 1e4 / 4.0;
        auto ac = [&](std::size_t lag) {
            double a = 0.0;
            for (std::size_t i = 0; i + lag < profile.size(); ++i)
                a += profile[i] * profile[i + lag];
            return a;
        };
        const double ac0 = ac(0);
        // First local maximum of the autocorrelation that is clearly periodic.
        std::size_t lag = 0;
        const auto min_lag = static_cast<std::size_t>(frame_rate / 400.0);
        const auto max_lag = static_cast<std::size_t>(frame_rate / 10.0);
        for (std::size_t l = min_lag; l < max_lag; ++l) {
            const double a = ac(l);
            if (a > 0.3 * ac0 && a >= ac(l - 1) && a >= ac(l + 1)) {
                lag = l;
                break;
            }
        }
        REQUIRE(lag > 0);
        const double rate = frame_rate / static_cast<double>(lag);
        const double base = blades * f_rot;
        INFO("blades " << blades << " measured flash rate " << rate << " Hz");
        CHECK(rate >= 0.8 * base);
        const bool near_multiple = std::abs(rate - base) <= 0.2 * base ||
                                   (blades % 2 == 1 && std::abs(rate - 2.0 * base) <= 0.4 * base);
        CHECK(near_multiple);
    }
}

TEST_CASE("weather attenuation is a one-way field factor", "[radar]")
{
    Rng rng = make_rng(6);
    const auto s = synth_target(RadarConfig{}, jet(200.0), rng);

    Environment clear;
    clear.path_km = 7.0;
    const auto same = apply_weather(s, clear);
    CHECK(same.samples == s.samples);

    Environment heavy;
    heavy.weather = Weather::HeavyRain;
    heavy.attenuation_db_per_km = 10.0;
    heavy.path_km = 1.0;
    const auto att = apply_weather(s, heavy);
    CHECK_THAT(std::abs(att.samples[10]) / std::abs(s.samples[10]), WithinRel(0.316227766, 1e-6));
    CHECK_THAT(att.mean_power() / s.mean_power(), WithinRel(0.1, 1e-9));

    for (int i = 0; i < 50; ++i) {
        auto r = attenuation_range(Weather::HeavyRain);
        heavy.attenuation_db_per_km = uniform(rng, r.lo, r.hi);
        const double ratio = apply_weather(s, heavy).mean_power() / s.mean_power();
        CHECK(ratio >= std::pow(10.0, -1.5) - 1e-12);
        CHECK(ratio <= std::pow(10.0, -0.5) + 1e-12);
    }

    heavy.path_km = -1.0;
    CHECK_THROWS_AS(apply_weather(s, heavy), Error);
    heavy.path_km = 1.0;
    heavy.attenuation_db_per_km = 20.0;
    CHECK_THROWS_AS(apply_weather(s, heavy), Error);
}

TEST_CASE("turbulence: identity at zero, bounded power, spectral broadening", "[radar]")
{
    const auto s = tone(1000.0, 1e4, 5000);
    Environment env;
    Rng rng = make_rng(7);
    CHECK(apply_turbulence(s, env, rng).samples == s.samples);

    env.turbulence_intensity = 0.2;
    for (int trial = 0; trial < 100; ++trial) {
        Rng r = make_rng(70, {static_cast<std::uint64_t>(trial)});
        const double ratio = apply_turbulence(s, env, r).mean_power() / s.mean_power();
        CHECK(ratio >= 0.6);
        CHECK(ratio <= 1.7);
    }

    // At the dataset cap (0.3) about 91% of the power stays in the carrier line and the
    // broadening hides in estimator noise; full intensity shows it plainly.
    env.turbulence_intensity = 1.0;
    const double before = minus3db_width(s.samples, 1e4, 1000.0, 200.0, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        Rng r = make_rng(71, {static_cast<std::uint64_t>(trial)});
        const auto t = apply_turbulence(s, env, r);
        const double after = minus3db_width(t.samples, 1e4, 1000.0, 200.0, 0.5);
        INFO("-3 dB width before " << before << " Hz, after " << after << " Hz");
        CHECK(after > before);
    }

    Rng r = make_rng(72);

    env.turbulence_intensity = 1.5;
    CHECK_THROWS_AS(apply_turbulence(s, env, r), Error);
}

TEST_CASE("AWGN is scaled to the measured signal power", "[radar]")
{
    const auto s = tone(500.0, 1e4, 5000);
    Rng rng = make_rng(8);

    const auto n0 = add_awgn(s, 0.0, rng);
    double noise = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        noise += std::norm(n0.samples[i] - s.samples[i]);
    CHECK_THAT(noise / 5000.0, WithinAbs(1.0, 0.05));

    const auto quiet = add_awgn(s, 100.0, rng);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        err += std::norm(quiet.samples[i] - s.samples[i]);
    CHECK(std::sqrt(err / 5000.0) / std::sqrt(s.mean_power()) < 1e-4);

    for (int trial = 0; trial < 20; ++trial) {
        Rng r = make_rng(80, {static_cast<std::uint64_t>(trial)});
        const auto y = add_awgn(s, 10.0, r);
        double resid = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            resid += std::norm(y.samples[i] - s.samples[i]);
        const double snr = 10.0 * std::log10(s.mean_power() / (resid / 5000.0));
        CHECK_THAT(snr, WithinAbs(10.0, 0.5));
    }

    CHECK_THROWS_AS(add_awgn(ComplexSignal{}, 10.0, rng), Error);
}

TEST_CASE("dataset generation is balanced and deterministic", "[radar]")
{
    RadarConfig cfg;
    const auto a = generate_dataset(cfg, 150, 42, 4);
    REQUIRE(a.size() == 450);
    int per_class[3] = {0, 0, 0};
    for (const auto &s : a) {
        ++per_class[static_cast<int>(s.label)];
        CHECK_NOTHROW(s.params.validate());
        CHECK_NOTHROW(s.env.validate());
        CHECK((s.env.path_km >= 1.0 && s.env.path_km <= 10.0));
        CHECK((s.env.turbulence_intensity >= 0.0 && s.env.turbulence_intensity <= 0.3));
        CHECK((s.env.snr_db >= 5.0 && s.env.snr_db <= 15.0));
        CHECK(s.signal.size() == 5000);
    }
    CHECK(per_class[0] == 150);
    CHECK(per_class[1] == 150);
    CHECK(per_class[2] == 150);

    const auto b = generate_dataset(cfg, 10, 42, 1);
    const auto c = generate_dataset(cfg, 10, 42, 3);
    const auto d = generate_dataset(cfg, 10, 43, 1);
    bool any_diff = false;
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b[i].signal.samples == c[i].signal.samples);
        any_diff = any_diff || b[i].signal.samples != d[i].signal.samples;
    }
    CHECK(any_diff);
    // Sample (c, i) owns its stream, so a smaller dataset is a prefix of each class block.
    CHECK(b[0].signal.samples == a[0].signal.samples);
    CHECK(b[10].signal.samples == a[150].signal.samples);

    const auto fixed = generate_dataset(cfg, 4, 42, 1, 10.0);
    const auto drawn = generate_dataset(cfg, 4, 42, 1);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        CHECK(fixed[i].env.snr_db == 10.0);
        CHECK(fixed[i].params.body_velocity == drawn[i].params.body_velocity);
        CHECK(fixed[i].env.path_km == drawn[i].env.path_km);
    }

    CHECK_THROWS_AS(generate_dataset(cfg, 0, 42), Error);
}

TEST_CASE("signals round-trip through the binary I/Q format", "[radar][io]")
{
    const auto dir = std::filesystem::temp_directory_path() / "qradar_io_test";
    std::filesystem::create_directories(dir);
    Rng rng = make_rng(9);
    const auto s = synth_target(RadarConfig{}, jet(180.0), rng);
    write_signal(dir / "a.iq", s);
    CHECK(std::filesystem::file_size(dir / "a.iq") == 8 + 16 * 5000);
    const auto back = read_signal(dir / "a.iq", 1e4);
    CHECK(back.samples == s.samples);

    std::filesystem::resize_file(dir / "a.iq", 8 + 16 * 10 + 3);
    CHECK_THROWS_AS(read_signal(dir / "a.iq", 1e4), Error);
    CHECK_THROWS_AS(read_signal(dir / "missing.iq", 1e4), Error);
    std::filesystem::remove_all(dir);
}
