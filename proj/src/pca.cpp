// SPDX-License-Identifier: Apache-2.0
#include "qradar/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qradar::pca {

Standardizer fit_standardizer(const Eigen::MatrixXd &X)
{
    if (X.rows() < 2)
        throw Error(ErrorKind::InvalidArgument, "fit_standardizer: need at least 2 rows");
    Standardizer s;
    s.means = X.colwise().mean().transpose();
    s.stds.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.means(j)).square().mean();
        s.stds(j) = std::sqrt(var);
        if (!(s.stds(j) > 0.0) || s.stds(j) <= 1e-12 * std::max(1.0, std::abs(s.means(j))))
            throw Error(ErrorKind::DegenerateInput, "constant feature column " + std::to_string(j));
    }
    return s;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd &X, const Standardizer &s)
{
    if (X.cols() != s.means.size())
        throw Error(ErrorKind::DimensionMismatch, "standardize: column count differs from fitted statistics");
    return ((X.rowwise() - s.means.transpose()).array().rowwise() / s.stds.transpose().array()).matrix();
}

EigenDecomposition jacobi_eigen(const Eigen::MatrixXd &A_in, double tol, int max_sweeps)
{
    if (A_in.rows() != A_in.cols())
        throw Error(ErrorKind::DimensionMismatch, "jacobi_eigen: matrix must be square");
    const Eigen::Index n = A_in.rows();
    Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(A.norm(), std::numeric_limits<double>::min());

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                s += 2.0 * A(i, j) * A(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    for (; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return A(a, a) > A(b, b); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = A(order[i], order[i]);
        out.vectors.col(i) = V.col(order[i]);
    }
    out.sweeps = sweep;
    return out;
}

PcaModel fit_pca(const Eigen::MatrixXd &X_std, int k)
{
    const Eigen::Index d = X_std.cols();
    if (k < 1 || k > d)
        throw Error(ErrorKind::ParameterRange, "fit_pca: k must be in [1, " + std::to_string(d) + "]");
    if (X_std.rows() < 2)
        throw Error(ErrorKind::InvalidArgument, "fit_pca: need at least 2 rows");

    const Eigen::MatrixXd centered = X_std.rowwise() - X_std.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(X_std.rows() - 1);
    const auto eig = jacobi_eigen(cov);

    PcaModel model;
    model.total_variance = cov.trace();
    if (!(model.total_variance > 0.0))
        throw Error(ErrorKind::DegenerateInput, "fit_pca: zero total variance");
    model.components.resize(k, d);
    model.eigenvalues.resize(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd v = eig.vectors.col(i);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0)
            v = -v;
        model.components.row(i) = v.transpose();
        model.eigenvalues(i) = std::max(0.0, eig.values(i));
    }
    model.explained_variance_ratio = model.eigenvalues / model.total_variance;
    return model;
}

Eigen::MatrixXd project(const Eigen::MatrixXd &X_std, const PcaModel &model)
{
    if (X_std.cols() != model.components.cols())
        throw Error(ErrorKind::DimensionMismatch, "project: column count differs from model");
    return X_std * model.components.transpose();
}

std::vector<SweepRow> pca_sweep(const Eigen::MatrixXd &train_std, const std::vector<int> &train_labels,
                                const Eigen::MatrixXd &test_std, const std::vector<int> &test_labels,
                                const std::vector<int> &k_values, const ClassifierFactory &classifier)
{
    if (static_cast<std::size_t>(test_std.rows()) != test_labels.size())
        throw Error(ErrorKind::DimensionMismatch, "pca_sweep: test label count differs from rows");
    std::vector<SweepRow> rows;
    for (int k : k_values) {
        if (k < 2 || k > 12)
            throw Error(ErrorKind::ParameterRange, "pca_sweep: k must be in [2, 12]");
        const auto model = fit_pca(train_std, k);
        const auto pred = classifier(project(train_std, model), train_labels, project(test_std, model));
        if (pred.size() != test_labels.size())
            throw Error(ErrorKind::DimensionMismatch, "pca_sweep: classifier returned wrong prediction count");
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            correct += pred[i] == test_labels[i];
        rows.push_back({k, model.cumulative_ratio(), static_cast<double>(correct) / static_cast<double>(pred.size())});
    }
    return rows;
}

} // namespace qradar::pca
