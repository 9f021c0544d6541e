// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qradar::harness {

using json = nlohmann::json;

enum class NoisePreset { Ideal, TorinoLike, FezLike };

std::string_view to_string(NoisePreset p);
NoisePreset parse_noise_preset(std::string_view name);

struct ExperimentConfig {
    std::uint64_t seed = 42;
    int n_per_class = 150;
    double split = 0.70; // train fraction, stratified per class
    int qubits = 4;
    int reps = 2;
    std::vector<std::uint64_t> shots{1024, 4096, 8096};
    NoisePreset noise_preset = NoisePreset::TorinoLike;
    std::filesystem::path output_dir = "out";

    double svm_c = 10.0;
    double encoding_max = 1.0;             // PCA outputs are min-max mapped onto [0, encoding_max]
    std::optional<double> fixed_snr_db;    // empty = per-sample SNR drawn from [5, 15] dB
    int shot_trials = 2000;                // repetitions behind the uncertainty-ratio summary
    double torino_fidelity = 0.89;
    double fez_fidelity = 0.94;
    bool classical_surrogate = false;      // PCA sweep continues to k = 12 with an RBF SVM
    bool save_signals = false;             // generate also writes raw I/Q files

    /// Throws ParameterRange naming the offending field.
    void validate() const;
};

/// Every field except output_dir (it does not change any result).
json to_json(const ExperimentConfig &config);

/// Fields missing from `j` keep their value from `base`; unknown keys are rejected.
ExperimentConfig config_from_json(const json &j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base = {});

/// 64-bit FNV-1a over the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace qradar::harness
