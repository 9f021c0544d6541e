// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qp_oracle.hpp"
#include "qradar/svm.hpp"

using namespace qradar;
using namespace qradar::svm;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    Rng rng = make_rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = g(rng);
    return m;
}

struct Blobs {
    Eigen::MatrixXd X;
    std::vector<int> y;
};

Blobs blobs(int per_class, std::uint64_t seed, double spread = 0.4)
{
    const Eigen::MatrixXd noise = gaussian(3 * per_class, 2, seed) * spread;
    const double centres[3][2] = {{0.0, 0.0}, {4.0, 0.0}, {2.0, 3.5}};
    Blobs b{Eigen::MatrixXd(3 * per_class, 2), {}};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            const int r = c * per_class + i;
            b.X(r, 0) = centres[c][0] + noise(r, 0);
            b.X(r, 1) = centres[c][1] + noise(r, 1);
            b.y.push_back(c);
        }
    return b;
}

} // namespace

TEST_CASE("scale heuristic for gamma", "[gamma]")
{
    const auto X = gaussian(40, 6, 1);
    double mean = 0.0;
    for (Eigen::Index i = 0; i < X.size(); ++i)
        mean += X.data()[i];
    mean /= static_cast<double>(X.size());
    double var = 0.0;
    for (Eigen::Index i = 0; i < X.size(); ++i)
        var += (X.data()[i] - mean) * (X.data()[i] - mean);
    var /= static_cast<double>(X.size());
    CHECK_THAT(gamma_scale(X), WithinAbs(1.0 / (6.0 * var), 1e-12));
    CHECK_THAT(gamma_scale(2.0 * X), WithinAbs(gamma_scale(X) / 4.0, 1e-12));

    Eigen::MatrixXd Z = gaussian(200, 15, 2);
    for (Eigen::Index j = 0; j < 15; ++j) {
        Z.col(j).array() -= Z.col(j).mean();
        Z.col(j) /= std::sqrt(Z.col(j).squaredNorm() / 200.0);
    }
    CHECK_THAT(gamma_scale(Z), WithinAbs(1.0 / 15.0, 1e-12));
    CHECK_THROWS_AS(gamma_scale(Eigen::MatrixXd::Constant(4, 3, 2.0)), Error);
}

TEST_CASE("RBF kernel values and Gram matrix", "[rbf]")
{
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(rbf_kernel(a, a, 0.7) == 1.0);
    const std::vector<double> b{1.0, 2.0, 3.0 + 1.0 / std::sqrt(0.5)};
    CHECK_THAT(rbf_kernel(a, b, 0.5), WithinAbs(std::exp(-1.0), 1e-15));

    const auto X = gaussian(10, 3, 3);
    const auto G = rbf_gram(X, X, 0.3);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(((G.array() > 0.0) && (G.array() <= 1.0)).all());
    const auto R = rbf_gram(X.topRows(4), X, 0.3);
    CHECK((R - G.topRows(4)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("PSD repair", "[psd]")
{
    const auto X = gaussian(8, 2, 4);
    const auto G = rbf_gram(X, X, 1.0);
    CHECK(is_psd(G));
    CHECK(repair_psd(G) == G);

    Eigen::Matrix2d bad;
    bad << 1.0, 1.2, 1.2, 1.0;
    CHECK_FALSE(is_psd(bad));
    const Eigen::MatrixXd fixed = repair_psd(bad);
    // eigenpairs (2.2, [1,1]) and (-0.2, [1,-1]); clipping keeps 1.1 * ones, normalization gives ones
    CHECK((fixed - Eigen::Matrix2d::Ones()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fixed);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);

    Eigen::MatrixXd noisy = G;
    Rng rng = make_rng(5);
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = i + 1; j < 8; ++j)
            noisy(i, j) = noisy(j, i) = std::clamp(G(i, j) + uniform(rng, -0.3, 0.3), 0.0, 1.0);
    const auto once = repair_psd(noisy);
    CHECK(is_psd(once));
    CHECK((once.diagonal().array() - 1.0).abs().maxCoeff() < 1e-15);
    CHECK((repair_psd(once) - once).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("two-point SVM has the closed-form solution", "[binary]")
{
    Eigen::Matrix2d K;
    K << 1.0, -1.0, -1.0, 1.0; // linear kernel of (1,0) and (-1,0)
    const std::vector<int> y{1, -1};
    SvmConfig cfg;
    cfg.kernel = KernelType::Precomputed;
    cfg.tol = 1e-9;
    const auto m = train_binary(K, y, cfg);
    CHECK(m.support().size() == 2);
    CHECK_THAT(m.alpha[0], WithinAbs(0.5, 1e-6));
    CHECK_THAT(m.alpha[1], WithinAbs(0.5, 1e-6));
    const std::vector<double> r0{1.0, -1.0}, r1{-1.0, 1.0}, mid{0.0, 0.0};
    CHECK_THAT(m.decision(r0), WithinAbs(1.0, 1e-6));
    CHECK_THAT(m.decision(r1), WithinAbs(-1.0, 1e-6));
    CHECK_THAT(m.decision(mid), WithinAbs(0.0, 1e-6));
}

TEST_CASE("XOR is learned by the RBF kernel", "[binary]")
{
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 1, 1, 0, 1, 1, 0;
    const std::vector<int> y{1, 1, -1, -1};
    const auto K = rbf_gram(X, X, 1.0);
    const auto m = train_binary(K, y, SvmConfig{});
    for (Eigen::Index i = 0; i < 4; ++i) {
        const Eigen::VectorXd row = K.row(i);
        CHECK(m.decision(std::span<const double>(row.data(), 4)) * y[static_cast<std::size_t>(i)] > 0.0);
    }
    const auto oracle = qp_oracle::solve(K, y, 10.0);
    CHECK_THAT(dual_objective(K, y, m.alpha), WithinAbs(oracle.objective, 1e-4));
}

TEST_CASE("SMO matches the exhaustive QP oracle and satisfies KKT", "[binary][oracle]")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto X = gaussian(8, 2, 50 + seed);
        std::vector<int> y(8);
        Rng rng = make_rng(seed, {7});
        for (int i = 0; i < 8; ++i)
            y[static_cast<std::size_t>(i)] = (X(i, 0) + 0.8 * uniform(rng, -1.0, 1.0) > 0.0) ? 1 : -1;
        y[0] = 1;
        y[1] = -1;
        const double C = (seed % 2) ? 1.0 : 10.0;
        const auto K = rbf_gram(X, X, 0.5);

        SvmConfig cfg;
        cfg.C = C;
        std::vector<double> trace;
        const auto m = train_binary(K, y, cfg, &trace);
        const auto oracle = qp_oracle::solve(K, y, C);
        INFO("seed " << seed);
        CHECK(m.converged);
        CHECK_THAT(dual_objective(K, y, m.alpha), WithinAbs(oracle.objective, 1e-4));
        CHECK(check_kkt(K, m, C, 1e-3).satisfied);

        double balance = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK((m.alpha[i] >= 0.0 && m.alpha[i] <= C));
            balance += m.alpha[i] * y[i];
        }
        CHECK(std::abs(balance) <= 1e-8);
        for (std::size_t t = 1; t < trace.size(); ++t)
            REQUIRE(trace[t] >= trace[t - 1] - 1e-12);
    }
}

TEST_CASE("binary training rejects bad input", "[binary]")
{
    const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(train_binary(K, std::vector<int>{1, 1, 1}, SvmConfig{}), Error);
    CHECK_THROWS_AS(train_binary(K, std::vector<int>{1, 0, -1}, SvmConfig{}), Error);
    CHECK_THROWS_AS(train_binary(K, std::vector<int>{1, -1}, SvmConfig{}), Error);
    SvmConfig bad;
    bad.C = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.C = 1.0;
    bad.gamma = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("one-vs-one on separated blobs", "[multiclass]")
{
    const auto train = blobs(30, 10);
    const auto test = blobs(20, 11);
    const auto clf = train_rbf(train.X, train.y, SvmConfig{});
    CHECK(clf.model.pairs.size() == 3);
    CHECK(predict(clf, test.X) == test.y);
    CHECK(predict(clf, train.X) == train.y);
    for (const auto &p : clf.model.pairs) {
        const Eigen::MatrixXd full = rbf_gram(train.X, train.X, clf.gamma);
        Eigen::MatrixXd sub(p.rows.size(), p.rows.size());
        for (std::size_t i = 0; i < p.rows.size(); ++i)
            for (std::size_t j = 0; j < p.rows.size(); ++j)
                sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    full(static_cast<Eigen::Index>(p.rows[i]), static_cast<Eigen::Index>(p.rows[j]));
        CHECK(check_kkt(sub, p.model, 10.0, 1e-3).satisfied);
    }

    // shuffled training order gives the same predictions
    std::vector<std::size_t> perm(train.y.size());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = make_rng(12);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd Xp(train.X.rows(), 2);
    std::vector<int> yp;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        Xp.row(static_cast<Eigen::Index>(i)) = train.X.row(static_cast<Eigen::Index>(perm[i]));
        yp.push_back(train.y[perm[i]]);
    }
    const auto shuffled = train_rbf(Xp, yp, SvmConfig{});
    CHECK(predict(shuffled, test.X) == predict(clf, test.X));

    // thread count does not change the model
    const auto threaded = train_rbf(train.X, train.y, SvmConfig{}, 3);
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(threaded.model.pairs[p].model.alpha == clf.model.pairs[p].model.alpha);
}

TEST_CASE("predictions depend on the kernel only through its entries", "[multiclass]")
{
    const auto train = blobs(15, 20, 1.2);
    const auto test = blobs(10, 21, 1.2);
    const double g = gamma_scale(train.X);
    const auto Ktr = rbf_gram(train.X, train.X, g);
    const auto Kte = rbf_gram(test.X, train.X, g);
    SvmConfig cfg;
    cfg.kernel = KernelType::Precomputed;
    const auto model = train_multiclass(Ktr, train.y, cfg);
    SvmConfig rbf;
    rbf.gamma = g;
    const auto clf = train_rbf(train.X, train.y, rbf);
    CHECK(predict(model, Kte) == predict(clf, test.X));
    const Eigen::MatrixXd copy = Kte;
    CHECK(predict(train_multiclass(Ktr, train.y, cfg), copy) == predict(model, Kte));
}

TEST_CASE("evaluation metrics", "[metrics]")
{
    std::vector<int> truth, pred;
    const long conf[3][3] = {{50, 0, 0}, {0, 49, 1}, {0, 2, 48}};
    for (int t = 0; t < 3; ++t)
        for (int p = 0; p < 3; ++p)
            for (long k = 0; k < conf[t][p]; ++k) {
                truth.push_back(t);
                pred.push_back(p);
            }
    const auto m = evaluate(pred, truth);
    CHECK_THAT(m.accuracy, WithinAbs(147.0 / 150.0, 1e-15));
    for (int t = 0; t < 3; ++t)
        for (int p = 0; p < 3; ++p)
            CHECK(m.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] == conf[t][p]);
    const double prec[3] = {1.0, 49.0 / 51.0, 48.0 / 49.0};
    const double rec[3] = {1.0, 49.0 / 50.0, 48.0 / 50.0};
    double wp = 0.0, wr = 0.0, wf = 0.0;
    for (int c = 0; c < 3; ++c) {
        wp += prec[c] / 3.0;
        wr += rec[c] / 3.0;
        wf += 2.0 * prec[c] * rec[c] / (prec[c] + rec[c]) / 3.0;
    }
    CHECK_THAT(m.precision, WithinAbs(wp, 1e-15));
    CHECK_THAT(m.recall, WithinAbs(wr, 1e-15));
    CHECK_THAT(m.f1, WithinAbs(wf, 1e-15));
    CHECK_THAT(m.macro_precision, WithinAbs(wp, 1e-15)); // balanced support

    const auto same = evaluate(truth, truth);
    CHECK(same.accuracy == 1.0);
    CHECK(same.precision == 1.0);
    CHECK(same.f1 == 1.0);

    const std::vector<int> zeros(truth.size(), 0);
    const auto flat = evaluate(zeros, truth);
    CHECK_THAT(flat.accuracy, WithinAbs(1.0 / 3.0, 1e-15));
    for (double v : {flat.precision, flat.recall, flat.f1})
        CHECK((v >= 0.0 && v <= 1.0));
    CHECK_THROWS_AS(evaluate(std::vector<int>{0}, std::vector<int>{0, 1}), Error);
    CHECK_THROWS_AS(evaluate(std::vector<int>{3}, std::vector<int>{0}), Error);
}

TEST_CASE("encoding scaler", "[encoding]")
{
    constexpr double kPi = std::numbers::pi;
    Eigen::MatrixXd train(3, 1);
    train << 0.0, 5.0, 2.5;
    Eigen::MatrixXd test(3, 1);
    test << -1.0, 6.0, 1.25;
    const auto enc = scale_for_encoding(train, test);
    CHECK(enc.train(0, 0) == 0.0);
    CHECK_THAT(enc.train(1, 0), WithinAbs(kPi, 1e-15));
    CHECK_THAT(enc.train(2, 0), WithinAbs(kPi / 2.0, 1e-15));
    CHECK(enc.test(0, 0) == 0.0);
    CHECK(enc.test(1, 0) == kPi);
    CHECK_THAT(enc.test(2, 0), WithinAbs(kPi / 4.0, 1e-15));

    const auto unit = scale_for_encoding(train, test, 1.0);
    CHECK_THAT(unit.train(2, 0), WithinAbs(0.5, 1e-15));
    CHECK(unit.test(1, 0) == 1.0);

    const auto X = gaussian(20, 4, 30);
    const auto s = fit_encoding_scaler(X);
    CHECK((s.inverse(s.transform(X)) - X).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXd flat = X;
    flat.col(2).setConstant(1.0);
    CHECK_THROWS_AS(fit_encoding_scaler(flat), Error);
}
