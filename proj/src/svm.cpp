// SPDX-License-Identifier: Apache-2.0
#include "qradar/svm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qradar::svm {

namespace {

constexpr double kTau = 1e-12;

void check_square(const Eigen::MatrixXd &K, const char *what)
{
    if (K.rows() != K.cols())
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": kernel must be square");
}

} // namespace

void SvmConfig::validate() const
{
    if (!(C > 0.0))
        throw Error(ErrorKind::ParameterRange, "C must be positive");
    if (gamma && !(*gamma > 0.0))
        throw Error(ErrorKind::ParameterRange, "gamma must be positive");
    if (!(tol > 0.0))
        throw Error(ErrorKind::ParameterRange, "tol must be positive");
    if (max_iterations < 1)
        throw Error(ErrorKind::ParameterRange, "max_iterations must be >= 1");
}

double gamma_scale(const Eigen::MatrixXd &X)
{
    if (X.size() == 0)
        throw Error(ErrorKind::DegenerateInput, "gamma_scale: empty matrix");
    const double mean = X.mean();
    const double var = (X.array() - mean).square().mean();
    if (!(var > 0.0))
        throw Error(ErrorKind::DegenerateInput, "gamma_scale: zero variance input");
    return 1.0 / (static_cast<double>(X.cols()) * var);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma)
{
    if (x.size() != y.size())
        throw Error(ErrorKind::DimensionMismatch, "rbf_kernel: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        d2 += (x[i] - y[i]) * (x[i] - y[i]);
    return std::exp(-gamma * d2);
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y, double gamma)
{
    if (X.cols() != Y.cols())
        throw Error(ErrorKind::DimensionMismatch, "rbf_gram: column dimensions differ");
    Eigen::MatrixXd K(X.rows(), Y.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < Y.rows(); ++j)
            K(i, j) = std::exp(-gamma * (X.row(i) - Y.row(j)).squaredNorm());
    return K;
}

bool is_psd(const Eigen::MatrixXd &K, double tol)
{
    check_square(K, "is_psd");
    Eigen::MatrixXd shifted = 0.5 * (K + K.transpose());
    shifted.diagonal().array() += tol;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    return llt.info() == Eigen::Success;
}

Eigen::MatrixXd repair_psd(const Eigen::MatrixXd &K)
{
    check_square(K, "repair_psd");
    if (is_psd(K))
        return K;
    const Eigen::MatrixXd sym = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd R = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::VectorXd scale(R.rows());
    for (Eigen::Index i = 0; i < R.rows(); ++i)
        scale(i) = R(i, i) > 0.0 ? 1.0 / std::sqrt(R(i, i)) : 0.0;
    R = scale.asDiagonal() * R * scale.asDiagonal();
    for (Eigen::Index i = 0; i < R.rows(); ++i)
        R(i, i) = 1.0;
    return 0.5 * (R + R.transpose());
}

std::vector<std::size_t> BinaryModel::support() const
{
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0.0)
            s.push_back(i);
    return s;
}

double BinaryModel::decision(std::span<const double> kernel_row) const
{
    if (kernel_row.size() != alpha.size())
        throw Error(ErrorKind::DimensionMismatch, "decision: kernel row length differs from training size");
    double f = bias;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0.0)
            f += alpha[i] * labels[i] * kernel_row[i];
    return f;
}

double dual_objective(const Eigen::MatrixXd &K, std::span<const int> y, std::span<const double> alpha)
{
    const auto n = static_cast<Eigen::Index>(alpha.size());
    double lin = 0.0;
    double quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        lin += alpha[i];
        if (alpha[i] == 0.0)
            continue;
        for (Eigen::Index j = 0; j < n; ++j)
            quad += alpha[i] * alpha[j] * y[i] * y[j] * K(i, j);
    }
    return lin - 0.5 * quad;
}

BinaryModel train_binary(const Eigen::MatrixXd &K_in, std::span<const int> y, const SvmConfig &config,
                         std::vector<double> *objective_trace)
{
    config.validate();
    check_square(K_in, "train_binary");
    const auto n = static_cast<Eigen::Index>(y.size());
    if (K_in.rows() != n)
        throw Error(ErrorKind::DimensionMismatch, "train_binary: kernel size differs from label count");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v != 1 && v != -1)
            throw Error(ErrorKind::InvalidArgument, "train_binary: labels must be +1 or -1");
        (v == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw Error(ErrorKind::InvalidArgument, "train_binary: both classes must be present");

    const Eigen::MatrixXd K = repair_psd(K_in);
    Eigen::MatrixXd Q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            Q(i, j) = y[i] * y[j] * K(i, j);

    const double C = config.C;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> G(n, -1.0);

    auto in_up = [&](Eigen::Index t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](Eigen::Index t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };
    auto objective = [&] {
        double s = 0.0;
        for (Eigen::Index t = 0; t < n; ++t)
            s += alpha[t] * (G[t] - 1.0);
        return -0.5 * s;
    };

    BinaryModel model;
    model.labels.assign(y.begin(), y.end());
    if (objective_trace)
        objective_trace->push_back(0.0);

    for (model.iterations = 0; model.iterations < config.max_iterations; ++model.iterations) {
        Eigen::Index i = -1, j = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            const double v = -y[t] * G[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < config.tol) {
            model.converged = true;
            break;
        }

        const double ai_old = alpha[i];
        const double aj_old = alpha[j];
        if (y[i] != y[j]) {
            double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - ai_old;
        const double daj = alpha[j] - aj_old;
        for (Eigen::Index t = 0; t < n; ++t)
            G[t] += Q(t, i) * dai + Q(t, j) * daj;
        if (objective_trace)
            objective_trace->push_back(objective());
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y[t] * G[t];
        if (alpha[t] >= C) {
            if (y[t] == -1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
    model.bias = -rho;
    model.alpha = std::move(alpha);
    return model;
}

KktReport check_kkt(const Eigen::MatrixXd &K, const BinaryModel &model, double C, double tol)
{
    KktReport r;
    const auto n = static_cast<Eigen::Index>(model.alpha.size());
    std::vector<double> row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            row[j] = K(i, j);
        const double m = model.labels[i] * model.decision(row);
        double v = 0.0;
        if (model.alpha[i] <= 0.0)
            v = std::max(0.0, 1.0 - m);
        else if (model.alpha[i] >= C)
            v = std::max(0.0, m - 1.0);
        else
            v = std::abs(m - 1.0);
        r.max_violation = std::max(r.max_violation, v);
    }
    r.satisfied = r.max_violation <= tol;
    return r;
}

MulticlassModel train_multiclass(const Eigen::MatrixXd &K_train, std::span<const int> labels, const SvmConfig &config,
                                 unsigned threads)
{
    check_square(K_train, "train_multiclass");
    if (static_cast<std::size_t>(K_train.rows()) != labels.size())
        throw Error(ErrorKind::DimensionMismatch, "train_multiclass: kernel size differs from label count");
    MulticlassModel out;
    const std::set<int> distinct(labels.begin(), labels.end());
    out.classes.assign(distinct.begin(), distinct.end());
    if (out.classes.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "train_multiclass: need at least 2 classes");

    const Eigen::MatrixXd K = repair_psd(K_train);
    for (std::size_t a = 0; a < out.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < out.classes.size(); ++b) {
            PairModel pm;
            pm.positive_class = out.classes[a];
            pm.negative_class = out.classes[b];
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == pm.positive_class || labels[i] == pm.negative_class)
                    pm.rows.push_back(i);
            out.pairs.push_back(std::move(pm));
        }
    }
    parallel_for(out.pairs.size(), threads, [&](std::size_t p) {
        auto &pm = out.pairs[p];
        const auto m = static_cast<Eigen::Index>(pm.rows.size());
        Eigen::MatrixXd sub(m, m);
        std::vector<int> y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            y[i] = labels[pm.rows[i]] == pm.positive_class ? 1 : -1;
            for (Eigen::Index j = 0; j < m; ++j)
                sub(i, j) = K(static_cast<Eigen::Index>(pm.rows[i]), static_cast<Eigen::Index>(pm.rows[j]));
        }
        pm.model = train_binary(sub, y, config);
    });
    return out;
}

std::vector<int> predict(const MulticlassModel &model, const Eigen::MatrixXd &K_test)
{
    std::vector<int> pred(static_cast<std::size_t>(K_test.rows()));
    std::map<int, std::size_t> slot;
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        slot[model.classes[c]] = c;
    for (Eigen::Index r = 0; r < K_test.rows(); ++r) {
        std::vector<int> votes(model.classes.size(), 0);
        std::vector<double> score(model.classes.size(), 0.0);
        for (const auto &pm : model.pairs) {
            std::vector<double> row(pm.rows.size());
            for (std::size_t i = 0; i < pm.rows.size(); ++i) {
                if (static_cast<Eigen::Index>(pm.rows[i]) >= K_test.cols())
                    throw Error(ErrorKind::DimensionMismatch, "predict: test kernel has too few columns");
                row[i] = K_test(r, static_cast<Eigen::Index>(pm.rows[i]));
            }
            const double d = pm.model.decision(row);
            const auto pos = slot[pm.positive_class];
            const auto neg = slot[pm.negative_class];
            ++votes[d > 0.0 ? pos : neg];
            score[pos] += d;
            score[neg] -= d;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes.size(); ++c)
            if (votes[c] > votes[best] || (votes[c] == votes[best] && score[c] > score[best]))
                best = c;
        pred[static_cast<std::size_t>(r)] = model.classes[best];
    }
    return pred;
}

RbfClassifier train_rbf(const Eigen::MatrixXd &X, std::span<const int> labels, const SvmConfig &config,
                        unsigned threads)
{
    config.validate();
    RbfClassifier clf;
    clf.train_rows = X;
    clf.gamma = config.gamma ? *config.gamma : gamma_scale(X);
    clf.model = train_multiclass(rbf_gram(X, X, clf.gamma), labels, config, threads);
    return clf;
}

std::vector<int> predict(const RbfClassifier &clf, const Eigen::MatrixXd &X_test)
{
    return predict(clf.model, rbf_gram(X_test, clf.train_rows, clf.gamma));
}

Metrics evaluate(std::span<const int> pred, std::span<const int> truth, int n_classes)
{
    if (pred.size() != truth.size())
        throw Error(ErrorKind::DimensionMismatch, "evaluate: prediction and truth lengths differ");
    if (truth.empty())
        throw Error(ErrorKind::InvalidArgument, "evaluate: empty input");
    Metrics m;
    m.confusion.assign(n_classes, std::vector<long>(n_classes, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= n_classes || pred[i] < 0 || pred[i] >= n_classes)
            throw Error(ErrorKind::ParameterRange, "evaluate: label outside [0, n_classes)");
        ++m.confusion[truth[i]][pred[i]];
    }
    const double total = static_cast<double>(truth.size());
    long diag = 0;
    for (int c = 0; c < n_classes; ++c)
        diag += m.confusion[c][c];
    m.accuracy = diag / total;

    for (int c = 0; c < n_classes; ++c) {
        long support = 0, predicted = 0;
        for (int k = 0; k < n_classes; ++k) {
            support += m.confusion[c][k];
            predicted += m.confusion[k][c];
        }
        const double tp = static_cast<double>(m.confusion[c][c]);
        const double precision = predicted > 0 ? tp / predicted : 0.0;
        const double recall = support > 0 ? tp / support : 0.0;
        const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        const double w = support / total;
        m.precision += w * precision;
        m.recall += w * recall;
        m.f1 += w * f1;
        m.macro_precision += precision / n_classes;
        m.macro_recall += recall / n_classes;
        m.macro_f1 += f1 / n_classes;
    }
    return m;
}

EncodingScaler fit_encoding_scaler(const Eigen::MatrixXd &train, double upper)
{
    if (train.rows() < 1)
        throw Error(ErrorKind::InvalidArgument, "fit_encoding_scaler: empty train matrix");
    if (!(upper > 0.0) || !std::isfinite(upper))
        throw Error(ErrorKind::ParameterRange, "encoding range upper bound must be positive");
    EncodingScaler s{train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose(), upper};
    for (Eigen::Index j = 0; j < train.cols(); ++j)
        if (!(s.hi(j) > s.lo(j)))
            throw Error(ErrorKind::DegenerateInput, "constant train column " + std::to_string(j) + " cannot be encoded");
    return s;
}

Eigen::MatrixXd EncodingScaler::transform(const Eigen::MatrixXd &X) const
{
    if (X.cols() != lo.size())
        throw Error(ErrorKind::DimensionMismatch, "EncodingScaler: column count differs");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            out(i, j) = std::clamp(upper * (X(i, j) - lo(j)) / (hi(j) - lo(j)), 0.0, upper);
    return out;
}

Eigen::MatrixXd EncodingScaler::inverse(const Eigen::MatrixXd &scaled) const
{
    if (scaled.cols() != lo.size())
        throw Error(ErrorKind::DimensionMismatch, "EncodingScaler: column count differs");
    Eigen::MatrixXd out(scaled.rows(), scaled.cols());
    for (Eigen::Index j = 0; j < scaled.cols(); ++j)
        for (Eigen::Index i = 0; i < scaled.rows(); ++i)
            out(i, j) = lo(j) + scaled(i, j) / upper * (hi(j) - lo(j));
    return out;
}

EncodedPair scale_for_encoding(const Eigen::MatrixXd &train, const Eigen::MatrixXd &test, double upper)
{
    EncodedPair p;
    p.scaler = fit_encoding_scaler(train, upper);
    p.train = p.scaler.transform(train);
    p.test = p.scaler.transform(test);
    return p;
}

} // namespace qradar::svm
