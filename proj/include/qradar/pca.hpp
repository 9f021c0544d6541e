// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qradar/common.hpp"

namespace qradar::pca {

/// Z-score statistics (population standard deviation).
struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;
};

/// Throws DegenerateInput naming the first constant column.
Standardizer fit_standardizer(const Eigen::MatrixXd &X);
Eigen::MatrixXd standardize(const Eigen::MatrixXd &X, const Standardizer &s);

struct EigenDecomposition {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors; // columns, matching values
    int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix; stops when the off-diagonal
/// Frobenius norm falls below tol * ||A||_F.
EigenDecomposition jacobi_eigen(const Eigen::MatrixXd &A, double tol = 1e-14, int max_sweeps = 100);

struct PcaModel {
    Eigen::MatrixXd components;              // k x d, orthonormal rows
    Eigen::VectorXd eigenvalues;             // k, descending
    Eigen::VectorXd explained_variance_ratio; // k
    double total_variance = 0.0;

    Eigen::Index k() const { return components.rows(); }
    double cumulative_ratio() const { return explained_variance_ratio.sum(); }
};

/// Top-k eigenvectors of the sample (n-1) covariance. Each component is signed
/// so its largest-magnitude entry is positive.
PcaModel fit_pca(const Eigen::MatrixXd &X_std, int k);
Eigen::MatrixXd project(const Eigen::MatrixXd &X_std, const PcaModel &model);

struct SweepRow {
    int k = 0;
    double cumulative_variance = 0.0;
    double accuracy = 0.0;
};

/// Trains on the projected train rows and returns predicted labels for the projected test rows.
using ClassifierFactory = std::function<std::vector<int>(const Eigen::MatrixXd &train, const std::vector<int> &train_labels,
                                                         const Eigen::MatrixXd &test)>;

/// Fits PCA on the (already standardized) train split for each k and scores the classifier.
std::vector<SweepRow> pca_sweep(const Eigen::MatrixXd &train_std, const std::vector<int> &train_labels,
                                const Eigen::MatrixXd &test_std, const std::vector<int> &test_labels,
                                const std::vector<int> &k_values, const ClassifierFactory &classifier);

} // namespace qradar::pca
