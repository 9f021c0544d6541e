// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qradar/common.hpp"

namespace qradar::svm {

enum class KernelType { Rbf, Precomputed };

struct SvmConfig {
    double C = 10.0;
    KernelType kernel = KernelType::Rbf;
    std::optional<double> gamma; // empty = scale heuristic
    double tol = 1e-3;           // maximal-violating-pair gap
    long max_iterations = 10'000'000;

    void validate() const;
};

/// 1 / (n_features * Var(all entries of X)).
double gamma_scale(const Eigen::MatrixXd &X);

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y, double gamma);

/// True when the smallest eigenvalue is >= -tol.
bool is_psd(const Eigen::MatrixXd &K, double tol = 1e-8);

/// Clips negative eigenvalues and restores a unit diagonal by symmetric
/// normalization. Kernels that already pass is_psd come back unchanged.
Eigen::MatrixXd repair_psd(const Eigen::MatrixXd &K);

struct BinaryModel {
    std::vector<double> alpha; // one per training row
    std::vector<int> labels;   // +1 / -1
    double bias = 0.0;         // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
    long iterations = 0;
    bool converged = false;

    std::vector<std::size_t> support() const;
    /// f evaluated from one row of kernel values against the training rows.
    double decision(std::span<const double> kernel_row) const;
};

/// Dual objective sum(alpha) - 1/2 alpha^T Q alpha, Q_ij = y_i y_j K_ij.
double dual_objective(const Eigen::MatrixXd &K, std::span<const int> y, std::span<const double> alpha);

/// SMO on the soft-margin dual with maximal-violating-pair selection (lowest
/// index wins ties). When `objective_trace` is non-null the dual objective is
/// recorded after every update.
BinaryModel train_binary(const Eigen::MatrixXd &K, std::span<const int> y, const SvmConfig &config,
                         std::vector<double> *objective_trace = nullptr);

struct KktReport {
    double max_violation = 0.0;
    bool satisfied = false;
};

/// Checks the complementary-slackness conditions on y_i f(x_i) at the given tolerance.
KktReport check_kkt(const Eigen::MatrixXd &K, const BinaryModel &model, double C, double tol);

struct PairModel {
    int positive_class = 0;
    int negative_class = 1;
    std::vector<std::size_t> rows; // indices into the full training set
    BinaryModel model;
};

struct MulticlassModel {
    std::vector<int> classes;
    std::vector<PairModel> pairs;
};

/// One-vs-one over every class pair.
MulticlassModel train_multiclass(const Eigen::MatrixXd &K_train, std::span<const int> labels, const SvmConfig &config,
                                 unsigned threads = 1);

/// K_test is (n_test x n_train). Majority vote; ties go to the larger summed
/// decision value, then to the smaller class label.
std::vector<int> predict(const MulticlassModel &model, const Eigen::MatrixXd &K_test);

/// RBF SVM on raw feature rows.
struct RbfClassifier {
    Eigen::MatrixXd train_rows;
    double gamma = 0.0;
    MulticlassModel model;
};

RbfClassifier train_rbf(const Eigen::MatrixXd &X, std::span<const int> labels, const SvmConfig &config,
                        unsigned threads = 1);
std::vector<int> predict(const RbfClassifier &clf, const Eigen::MatrixXd &X_test);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0; // weighted by class support
    double recall = 0.0;
    double f1 = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::vector<long>> confusion; // [truth][pred]
};

Metrics evaluate(std::span<const int> pred, std::span<const int> truth, int n_classes = 3);

/// Per-column min-max map of PCA outputs onto [0, upper] using train bounds.
struct EncodingScaler {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    double upper = std::numbers::pi;

    Eigen::MatrixXd transform(const Eigen::MatrixXd &X) const; // clamps into [0, upper]
    Eigen::MatrixXd inverse(const Eigen::MatrixXd &scaled) const;
};

EncodingScaler fit_encoding_scaler(const Eigen::MatrixXd &train, double upper = std::numbers::pi);

struct EncodedPair {
    Eigen::MatrixXd train;
    Eigen::MatrixXd test;
    EncodingScaler scaler;
};

EncodedPair scale_for_encoding(const Eigen::MatrixXd &train, const Eigen::MatrixXd &test,
                               double upper = std::numbers::pi);

} // namespace qradar::svm
