// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qradar/radar_sim.hpp"

namespace qradar::features {

enum class WindowKind { Hann, Rectangular };

struct StftParams {
    int window_len = 128;
    int hop = 64;
    WindowKind window = WindowKind::Hann;
};

/// Magnitude spectrogram. Rows are frames, columns are frequency bins ordered
/// from -fs/2 up to (but excluding) +fs/2.
struct Spectrogram {
    Eigen::MatrixXd magnitudes;
    std::vector<double> frame_times;
    std::vector<double> bin_freqs;

    Eigen::Index n_frames() const { return magnitudes.rows(); }
    Eigen::Index n_bins() const { return magnitudes.cols(); }
};

std::vector<double> make_window(int length, WindowKind kind);

Spectrogram stft(const radar::ComplexSignal &signal, const StftParams &params = {});

inline constexpr std::size_t kNumFeatures = 15;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "mag_mean",           "mag_std",           "mag_skewness",      "mag_kurtosis",
    "spectral_bandwidth", "peak_frequency",    "centroid_delta_mean", "centroid_delta_var",
    "centroid_delta_max", "spectral_entropy",  "spectral_centroid", "spectral_rolloff",
    "spectral_flatness",  "dom_ratio_2",       "dom_ratio_3",
};

struct FeatureVector {
    double mag_mean = 0.0;
    double mag_std = 0.0;
    double mag_skewness = 0.0;
    double mag_kurtosis = 0.0; // excess kurtosis
    double spectral_bandwidth = 0.0;
    double peak_frequency = 0.0;
    double centroid_delta_mean = 0.0;
    double centroid_delta_var = 0.0;
    double centroid_delta_max = 0.0;
    double spectral_entropy = 0.0; // bits
    double spectral_centroid = 0.0;
    double spectral_rolloff = 0.0;
    double spectral_flatness = 0.0;
    double dom_ratio_2 = 0.0;
    double dom_ratio_3 = 0.0;

    /// Values in kFeatureNames order.
    std::array<double, kNumFeatures> to_array() const;
};

inline constexpr double kRolloffFraction = 0.85;

/// Throws DegenerateInput for an empty or all-zero spectrogram.
FeatureVector extract_features(const Spectrogram &spec);

/// stft + extract_features over a batch, one row per signal.
Eigen::MatrixXd feature_matrix(const std::vector<radar::ComplexSignal> &signals, const StftParams &params = {},
                               unsigned threads = 1);

/// Version string of the FFT backend.
std::string_view fft_backend_version();

} // namespace qradar::features
