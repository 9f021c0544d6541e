// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qradar/harness/config.hpp"
#include "qradar/radar_sim.hpp"

namespace qradar::harness {

/// printf %.17g, which round-trips every finite double.
std::string format_double(double v);

/// Parent directories are created. Failures throw Io with the path.
void write_text(const std::filesystem::path &path, const std::string &content);
std::string read_text(const std::filesystem::path &path);
void write_json(const std::filesystem::path &path, const json &j);
json read_json(const std::filesystem::path &path);

struct FeatureTable {
    Eigen::MatrixXd features; // rows = samples, columns in kFeatureNames order
    std::vector<int> labels;
};

/// Header `<feature names>,label`, one row per sample.
std::string features_csv(const FeatureTable &table);
FeatureTable parse_features_csv(const std::string &text);

/// One row per sample: path,label,snr_db,weather,seed followed by the remaining
/// environment and target parameters. `paths` may be empty when signals are not saved.
std::string manifest_csv(const std::vector<radar::LabeledSignal> &samples, const std::vector<std::string> &paths = {});

struct Split {
    std::vector<std::size_t> train; // ascending
    std::vector<std::size_t> test;  // ascending
};

/// Per class, round(train_fraction * n_c) rows go to train after a seeded
/// Fisher-Yates shuffle of that class's indices.
Split stratified_split(const std::vector<int> &labels, double train_fraction, std::uint64_t seed);

json split_to_json(const Split &split);
Split split_from_json(const json &j, std::size_t n_rows);

std::string matrix_csv(const Eigen::MatrixXd &m);
/// Rows = true class, columns = predicted class.
std::string confusion_csv(const std::vector<std::vector<long>> &confusion);

Eigen::MatrixXd rows_of(const Eigen::MatrixXd &m, const std::vector<std::size_t> &rows);
std::vector<int> rows_of(const std::vector<int> &v, const std::vector<std::size_t> &rows);

json vector_to_json(const Eigen::VectorXd &v);
Eigen::VectorXd vector_from_json(const json &j);
json matrix_to_json(const Eigen::MatrixXd &m); // array of rows
Eigen::MatrixXd matrix_from_json(const json &j);

} // namespace qradar::harness
