// SPDX-License-Identifier: Apache-2.0
#include "qradar/spectral_features.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace qradar::features {

namespace {

// FFTW planning is not thread safe; execution on a private plan is.
std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftPlan {
  public:
    explicit FftPlan(int n) : n_(n)
    {
        in_ = fftw_alloc_complex(n);
        out_ = fftw_alloc_complex(n);
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftPlan()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftPlan(const FftPlan &) = delete;
    FftPlan &operator=(const FftPlan &) = delete;

    fftw_complex *in() { return in_; }
    const fftw_complex *out() const { return out_; }
    void execute() { fftw_execute(plan_); }

  private:
    int n_;
    fftw_complex *in_ = nullptr;
    fftw_complex *out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

} // namespace

std::vector<double> make_window(int length, WindowKind kind)
{
    std::vector<double> w(length, 1.0);
    if (kind == WindowKind::Hann) {
        // Periodic Hann, the usual choice for spectral analysis.
        for (int n = 0; n < length; ++n)
            w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
    }
    return w;
}

Spectrogram stft(const radar::ComplexSignal &signal, const StftParams &params)
{
    const int win = params.window_len;
    if (win < 1)
        throw Error(ErrorKind::InvalidArgument, "stft: window_len must be >= 1");
    if (params.hop < 1)
        throw Error(ErrorKind::InvalidArgument, "stft: hop must be >= 1");
    if (signal.samples.size() < static_cast<std::size_t>(win))
        throw Error(ErrorKind::InvalidArgument, "stft: signal shorter than one window");
    if (!(signal.sample_rate > 0.0))
        throw Error(ErrorKind::InvalidArgument, "stft: sample_rate must be positive");

    const auto window = make_window(win, params.window);
    const std::size_t n_frames = (signal.samples.size() - win) / params.hop + 1;
    const int half = win / 2;

    Spectrogram spec;
    spec.magnitudes.resize(static_cast<Eigen::Index>(n_frames), win);
    spec.frame_times.resize(n_frames);
    spec.bin_freqs.resize(win);
    for (int b = 0; b < win; ++b)
        spec.bin_freqs[b] = static_cast<double>(b - half) * signal.sample_rate / win;

    FftPlan fft(win);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t start = f * params.hop;
        for (int n = 0; n < win; ++n) {
            const auto v = signal.samples[start + n] * window[n];
            fft.in()[n][0] = v.real();
            fft.in()[n][1] = v.imag();
        }
        fft.execute();
        for (int b = 0; b < win; ++b) {
            const int k = (b - half + win) % win;
            spec.magnitudes(static_cast<Eigen::Index>(f), b) = std::hypot(fft.out()[k][0], fft.out()[k][1]);
        }
        spec.frame_times[f] = (static_cast<double>(start) + 0.5 * win) / signal.sample_rate;
    }
    return spec;
}

std::array<double, kNumFeatures> FeatureVector::to_array() const
{
    return {mag_mean,           mag_std,           mag_skewness,        mag_kurtosis,      spectral_bandwidth,
            peak_frequency,     centroid_delta_mean, centroid_delta_var, centroid_delta_max, spectral_entropy,
            spectral_centroid,  spectral_rolloff,  spectral_flatness,   dom_ratio_2,       dom_ratio_3};
}

FeatureVector extract_features(const Spectrogram &spec)
{
    const Eigen::Index frames = spec.n_frames();
    const Eigen::Index bins = spec.n_bins();
    if (frames == 0 || bins == 0)
        throw Error(ErrorKind::DegenerateInput, "extract_features: empty spectrogram");
    if (static_cast<Eigen::Index>(spec.bin_freqs.size()) != bins)
        throw Error(ErrorKind::DimensionMismatch, "extract_features: bin_freqs size differs from bin count");
    if (!spec.magnitudes.allFinite() || (spec.magnitudes.array() < 0.0).any())
        throw Error(ErrorKind::InvalidArgument, "extract_features: magnitudes must be finite and non-negative");

    FeatureVector fv;

    // Moments over every magnitude entry.
    const double count = static_cast<double>(spec.magnitudes.size());
    const double mean = spec.magnitudes.mean();
    const Eigen::ArrayXXd centered = spec.magnitudes.array() - mean;
    const double m2 = centered.square().sum() / count;
    const double m3 = centered.cube().sum() / count;
    const double m4 = centered.square().square().sum() / count;
    fv.mag_mean = mean;
    fv.mag_std = std::sqrt(m2);
    if (m2 > 0.0) {
        fv.mag_skewness = m3 / std::pow(m2, 1.5);
        fv.mag_kurtosis = m4 / (m2 * m2) - 3.0;
    }

    const Eigen::ArrayXXd power = spec.magnitudes.array().square();
    Eigen::ArrayXd p = power.colwise().mean().transpose();
    const double total = p.sum();
    if (!(total > 0.0))
        throw Error(ErrorKind::DegenerateInput, "extract_features: all-zero spectrogram");
    p /= total;

    const Eigen::Map<const Eigen::ArrayXd> freqs(spec.bin_freqs.data(), bins);

    fv.spectral_centroid = (freqs * p).sum();
    fv.spectral_bandwidth = std::sqrt(((freqs - fv.spectral_centroid).square() * p).sum());

    Eigen::Index peak = 0;
    p.maxCoeff(&peak);
    fv.peak_frequency = freqs(peak);

    double entropy = 0.0;
    double log_sum = 0.0;
    bool has_zero = false;
    for (Eigen::Index b = 0; b < bins; ++b) {
        if (p(b) > 0.0) {
            entropy -= p(b) * std::log2(p(b));
            log_sum += std::log(p(b));
        } else {
            has_zero = true;
        }
    }
    fv.spectral_entropy = std::clamp(entropy, 0.0, std::log2(static_cast<double>(bins)));

    const double arith = 1.0 / static_cast<double>(bins);
    const double geo = has_zero ? 0.0 : std::exp(log_sum / static_cast<double>(bins));
    fv.spectral_flatness = std::clamp(geo / arith, 0.0, 1.0);

    double cumulative = 0.0;
    fv.spectral_rolloff = freqs(bins - 1);
    for (Eigen::Index b = 0; b < bins; ++b) {
        cumulative += p(b);
        if (cumulative >= kRolloffFraction) {
            fv.spectral_rolloff = freqs(b);
            break;
        }
    }

    // Per-frame centroid trace; silent frames hold the previous centroid.
    std::vector<double> centroid(static_cast<std::size_t>(frames), 0.0);
    double last = 0.0;
    for (Eigen::Index f = 0; f < frames; ++f) {
        const double e = power.row(f).sum();
        if (e > 0.0)
            last = (power.row(f).transpose() * freqs).sum() / e;
        centroid[f] = last;
    }
    if (frames > 1) {
        std::vector<double> delta(frames - 1);
        for (Eigen::Index f = 1; f < frames; ++f)
            delta[f - 1] = std::abs(centroid[f] - centroid[f - 1]);
        double dm = 0.0;
        for (double d : delta)
            dm += d;
        dm /= static_cast<double>(delta.size());
        double dv = 0.0;
        for (double d : delta)
            dv += (d - dm) * (d - dm);
        dv /= static_cast<double>(delta.size());
        fv.centroid_delta_mean = dm;
        fv.centroid_delta_var = dv;
        fv.centroid_delta_max = *std::max_element(delta.begin(), delta.end());
    }

    // Local maxima on the circular frequency axis (aliasing wraps it).
    std::vector<double> maxima;
    if (bins >= 3) {
        for (Eigen::Index b = 0; b < bins; ++b) {
            const double left = p((b - 1 + bins) % bins);
            const double right = p((b + 1) % bins);
            if (p(b) > left && p(b) >= right)
                maxima.push_back(p(b));
        }
    }
    std::sort(maxima.begin(), maxima.end(), std::greater<>());
    if (!maxima.empty() && maxima[0] > 0.0) {
        if (maxima.size() >= 2)
            fv.dom_ratio_2 = maxima[1] / maxima[0];
        if (maxima.size() >= 3)
            fv.dom_ratio_3 = maxima[2] / maxima[0];
    }
    return fv;
}

Eigen::MatrixXd feature_matrix(const std::vector<radar::ComplexSignal> &signals, const StftParams &params,
                               unsigned threads)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(signals.size()), static_cast<Eigen::Index>(kNumFeatures));
    std::vector<std::array<double, kNumFeatures>> rows(signals.size());
    parallel_for(signals.size(), threads, [&](std::size_t i) { rows[i] = extract_features(stft(signals[i], params)).to_array(); });
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < kNumFeatures; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

std::string_view fft_backend_version() { return fftw_version; }

} // namespace qradar::features
