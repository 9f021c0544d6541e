// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qradar/harness/config.hpp"
#include "qradar/harness/dataset_io.hpp"
#include "qradar/pca.hpp"
#include "qradar/qkernel.hpp"
#include "qradar/qsim.hpp"
#include "qradar/svm.hpp"

namespace qradar::harness {

// File names inside the output directory.
inline constexpr const char *kFeaturesFile = "features.csv";
inline constexpr const char *kManifestFile = "manifest.csv";
inline constexpr const char *kSplitFile = "split.json";
inline constexpr const char *kDatasetFile = "dataset.json";
inline constexpr const char *kConfigFile = "config.json";
inline constexpr const char *kSweepFile = "pca_sweep.json";
inline constexpr const char *kMetricsFile = "metrics.json";
inline constexpr const char *kEncodingFile = "encoding.json";
inline constexpr const char *kShotsFile = "shots.json";
inline constexpr const char *kHardwareFile = "hw_emulation.json";
inline constexpr const char *kReportFile = "report.json";

/// Standardized train/test matrices built from a feature table and its split.
struct PreparedData {
    FeatureTable table;
    Split split;
    pca::Standardizer standardizer;
    Eigen::MatrixXd train_std;
    Eigen::MatrixXd test_std;
    std::vector<int> train_labels;
    std::vector<int> test_labels;
};

PreparedData prepare(FeatureTable table, Split split);
/// Reads the feature CSV and split persisted by cmd_generate; missing files are named in the error.
PreparedData load_prepared(const ExperimentConfig &config);

struct ClassicalRun {
    svm::RbfClassifier classifier;
    std::vector<int> predictions;
    svm::Metrics metrics;
    double train_seconds = 0.0;
};

ClassicalRun run_classical(const PreparedData &data, const ExperimentConfig &config, unsigned threads);

struct QsvmRun {
    pca::PcaModel pca;
    svm::EncodingScaler scaler;
    Eigen::MatrixXd encoded_train;
    Eigen::MatrixXd encoded_test;
    Eigen::MatrixXd kernel_train;
    Eigen::MatrixXd kernel_test; // test x train
    svm::MulticlassModel model;
    std::vector<int> predictions;
    svm::Metrics metrics;
    double kernel_seconds = 0.0;
    double train_seconds = 0.0;
};

/// PCA to k components, min-max angle encoding, exact ZZ kernel, one-vs-one SVM.
QsvmRun run_qsvm(const PreparedData &data, int k, const ExperimentConfig &config, unsigned threads);

/// What shots and hw-emulate need from a trained QSVM.
struct Encoding {
    pca::Standardizer standardizer;
    pca::PcaModel pca;
    svm::EncodingScaler scaler;
    int reps = 2;
    std::size_t sample_index = 0;      // row of the representative sample in the feature table
    std::vector<double> representative; // its encoded angles
};

json encoding_to_json(const Encoding &e);
Encoding encoding_from_json(const json &j);

/// Feature-map circuit of the representative sample, with terminal measurement.
qsim::Circuit reference_circuit(const Encoding &e);

struct PresetNoise {
    NoisePreset preset = NoisePreset::Ideal;
    qsim::NoiseModel noise;
    double target_fidelity = 1.0;
    double fidelity = 1.0;
    int iterations = 0;
};

/// Ideal plus the two calibrated presets, in that order.
std::vector<PresetNoise> calibrate_presets(const qsim::Circuit &reference, const ExperimentConfig &config);

/// Outcome distribution of the reference circuit under a noise model.
qsim::OutcomeDistribution emulate(const qsim::Circuit &reference, const qsim::NoiseModel &noise);

struct UncertaintyRatio {
    std::size_t outcome = 0; // most probable outcome of the distribution
    std::uint64_t low_shots = 0;
    std::uint64_t high_shots = 0;
    int trials = 0;
    double sd_low = 0.0;       // spread of the outcome frequency across trials
    double sd_high = 0.0;
    double empirical_ratio = 0.0; // sd_low / sd_high
    double plug_in_ratio = 0.0;   // ratio of mean 1.96 sqrt(p(1-p)/N) half-widths
};

UncertaintyRatio uncertainty_ratio(const qsim::OutcomeDistribution &dist, std::uint64_t low_shots,
                                   std::uint64_t high_shots, int trials, std::uint64_t seed);

struct HardwareRow {
    PresetNoise calibration;
    double entropy_bits = 0.0;
    double fidelity = 0.0;
    double noise_floor = 0.0;
    std::vector<std::size_t> top5;
    int top5_overlap = 0; // with the ideal top-5
};

std::vector<HardwareRow> hardware_rows(const qsim::Circuit &reference, const ExperimentConfig &config);

// Subcommands. Each writes its files under config.output_dir and returns the
// main JSON document it wrote. Wall-clock timings go to timings_<name>.json so
// the result files stay byte-identical across runs.
json cmd_generate(const ExperimentConfig &config, unsigned threads);
json cmd_pca_sweep(const ExperimentConfig &config, unsigned threads);
json cmd_compare(const ExperimentConfig &config, unsigned threads);
json cmd_shots(const ExperimentConfig &config, unsigned threads);
json cmd_hw_emulate(const ExperimentConfig &config, unsigned threads);
json cmd_report(const ExperimentConfig &config);

std::string version_string();

} // namespace qradar::harness
