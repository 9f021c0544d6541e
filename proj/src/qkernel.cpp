// SPDX-License-Identifier: Apache-2.0
#include "qradar/qkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qradar::qkernel {

namespace {

void check_same_dim(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw Error(ErrorKind::DimensionMismatch, "kernel inputs have different dimensions");
}

std::span<const double> row_span(const Eigen::MatrixXd &M, Eigen::Index i, std::vector<double> &buf)
{
    buf.resize(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        buf[j] = M(i, j);
    return buf;
}

std::vector<qsim::Statevector> encode_rows(const Eigen::MatrixXd &X, int reps, unsigned threads)
{
    std::vector<qsim::Statevector> states(static_cast<std::size_t>(X.rows()), qsim::Statevector(1));
    parallel_for(states.size(), threads, [&](std::size_t i) {
        std::vector<double> buf;
        states[i] = qsim::simulate(qsim::build_zz_feature_map(row_span(X, static_cast<Eigen::Index>(i), buf), reps));
    });
    return states;
}

double shot_entry(const Eigen::MatrixXd &X, Eigen::Index i, const Eigen::MatrixXd &Y, Eigen::Index j,
                  const KernelSpec &spec, std::uint64_t a, std::uint64_t b)
{
    std::vector<double> bx, by;
    Rng rng = make_rng(spec.seed, {a, b});
    const qsim::NoiseModel noise = spec.method == KernelMethod::NoisyEmulated ? spec.noise : qsim::NoiseModel{};
    return kernel_shot(row_span(X, i, bx), row_span(Y, j, by), spec.shots, noise, rng, spec.reps);
}

void check_spec(const KernelSpec &spec)
{
    if (spec.method != KernelMethod::ExactFidelity && spec.shots < 1)
        throw Error(ErrorKind::InvalidArgument, "shot-based kernel needs shots >= 1");
    spec.noise.validate();
}

} // namespace

std::string_view to_string(KernelMethod m)
{
    switch (m) {
    case KernelMethod::ExactFidelity: return "exact_fidelity";
    case KernelMethod::ShotEstimated: return "shot_estimated";
    case KernelMethod::NoisyEmulated: return "noisy_emulated";
    }
    return "unknown";
}

double kernel_exact(std::span<const double> x, std::span<const double> x_prime, int reps)
{
    check_same_dim(x, x_prime);
    const auto a = qsim::simulate(qsim::build_zz_feature_map(x, reps));
    const auto b = qsim::simulate(qsim::build_zz_feature_map(x_prime, reps));
    return std::min(1.0, std::norm(a.inner(b)));
}

qsim::Circuit compute_uncompute_circuit(std::span<const double> x, std::span<const double> x_prime, int reps)
{
    check_same_dim(x, x_prime);
    auto c = qsim::build_zz_feature_map(x, reps);
    c.append(qsim::build_zz_feature_map(x_prime, reps).inverse());
    c.measure_all();
    return c;
}

double kernel_shot(std::span<const double> x, std::span<const double> x_prime, std::uint64_t shots,
                   const qsim::NoiseModel &noise, Rng &rng, int reps)
{
    if (shots < 1)
        throw Error(ErrorKind::InvalidArgument, "kernel_shot: shots must be >= 1");
    noise.validate();
    const auto circuit = compute_uncompute_circuit(x, x_prime, reps);
    const auto dist = noise.gate_noise() ? qsim::measure_distribution(qsim::simulate_noisy(circuit, noise), noise)
                                         : qsim::measure_distribution(qsim::simulate(circuit), noise);
    // Only the all-zeros count matters; its multinomial marginal is binomial.
    const double p0 = std::clamp(dist.probabilities[0], 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> draw(shots, p0);
    return static_cast<double>(draw(rng)) / static_cast<double>(shots);
}

KernelMatrix kernel_matrix(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y, const KernelSpec &spec,
                           unsigned threads)
{
    if (X.cols() != Y.cols())
        throw Error(ErrorKind::DimensionMismatch, "kernel_matrix: column dimensions differ");
    check_spec(spec);
    KernelMatrix K{Eigen::MatrixXd(X.rows(), Y.rows()), spec};
    if (spec.method == KernelMethod::ExactFidelity) {
        const auto sx = encode_rows(X, spec.reps, threads);
        const auto sy = encode_rows(Y, spec.reps, threads);
        parallel_for(sx.size(), threads, [&](std::size_t i) {
            for (std::size_t j = 0; j < sy.size(); ++j)
                K.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::min(1.0, std::norm(sx[i].inner(sy[j])));
        });
        return K;
    }
    parallel_for(static_cast<std::size_t>(X.rows()), threads, [&](std::size_t i) {
        for (Eigen::Index j = 0; j < Y.rows(); ++j)
            K.entries(static_cast<Eigen::Index>(i), j) =
                shot_entry(X, static_cast<Eigen::Index>(i), Y, j, spec, i, static_cast<std::uint64_t>(j));
    });
    return K;
}

KernelMatrix kernel_matrix(const Eigen::MatrixXd &X, const KernelSpec &spec, unsigned threads)
{
    check_spec(spec);
    const Eigen::Index n = X.rows();
    KernelMatrix K{Eigen::MatrixXd::Identity(n, n), spec};
    if (spec.method == KernelMethod::ExactFidelity) {
        const auto s = encode_rows(X, spec.reps, threads);
        parallel_for(s.size(), threads, [&](std::size_t i) {
            K.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::min(1.0, std::norm(s[i].inner(s[i])));
            for (std::size_t j = i + 1; j < s.size(); ++j)
                K.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::min(1.0, std::norm(s[i].inner(s[j])));
        });
    } else {
        parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
            for (Eigen::Index j = static_cast<Eigen::Index>(i) + 1; j < n; ++j)
                K.entries(static_cast<Eigen::Index>(i), j) =
                    shot_entry(X, static_cast<Eigen::Index>(i), X, j, spec, i, static_cast<std::uint64_t>(j));
        });
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            K.entries(j, i) = K.entries(i, j);
    return K;
}

double shannon_entropy_bits(std::span<const double> p)
{
    double h = 0.0;
    for (double v : p)
        if (v > 0.0)
            h -= v * std::log2(v);
    return std::max(0.0, h);
}

double classical_fidelity(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw Error(ErrorKind::DimensionMismatch, "classical_fidelity: outcome spaces differ");
    double bc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        bc += std::sqrt(std::max(0.0, p[i]) * std::max(0.0, q[i]));
    return std::clamp(bc * bc, 0.0, 1.0);
}

double noise_floor(std::span<const double> p, double fraction)
{
    if (p.empty())
        return 0.0;
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(ErrorKind::ParameterRange, "noise_floor fraction must be in (0, 1]");
    std::vector<double> sorted(p.begin(), p.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(p.size()))));
    return std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m), 0.0) / static_cast<double>(m);
}

std::vector<std::size_t> top_k_indices(std::span<const double> p, std::size_t k)
{
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] > p[b]; });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

qsim::OutcomeDistribution to_distribution(const qsim::Counts &counts)
{
    qsim::OutcomeDistribution d{counts.n_qubits, std::vector<double>(counts.counts.size(), 0.0)};
    if (counts.shots == 0)
        throw Error(ErrorKind::DegenerateInput, "counts table has zero shots");
    for (std::size_t i = 0; i < counts.counts.size(); ++i)
        d.probabilities[i] = static_cast<double>(counts.counts[i]) / static_cast<double>(counts.shots);
    return d;
}

DistributionReport analyze_distribution(const qsim::OutcomeDistribution &measured,
                                        const qsim::OutcomeDistribution &ideal, const ReportOptions &opts)
{
    if (measured.size() != ideal.size() || measured.n_qubits != ideal.n_qubits)
        throw Error(ErrorKind::DimensionMismatch, "analyze_distribution: outcome spaces differ");
    DistributionReport r;
    r.shannon_entropy_bits = shannon_entropy_bits(measured.probabilities);
    r.classical_fidelity = classical_fidelity(measured.probabilities, ideal.probabilities);
    r.noise_floor = noise_floor(measured.probabilities, opts.noise_floor_fraction);
    for (auto i : top_k_indices(measured.probabilities, opts.top_k))
        r.top_k.emplace_back(qsim::bitstring(i, measured.n_qubits), measured.probabilities[i]);
    return r;
}

DistributionReport analyze_distribution(const qsim::Counts &measured, const qsim::OutcomeDistribution &ideal,
                                        const ReportOptions &opts)
{
    auto r = analyze_distribution(to_distribution(measured), ideal, opts);
    r.shots = measured.shots;
    if (!r.top_k.empty()) {
        const double p = r.top_k.front().second;
        r.top1_uncertainty = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(measured.shots));
    }
    return r;
}

qsim::NoiseModel preset_from_p2(double p2) { return {p2 / 10.0, p2, p2 / 2.0}; }

double emulated_fidelity(const qsim::Circuit &reference, const qsim::NoiseModel &noise)
{
    const auto ideal = qsim::measure_distribution(qsim::simulate(reference));
    const auto noisy = qsim::measure_distribution(qsim::simulate_noisy(reference, noise), noise);
    return classical_fidelity(noisy.probabilities, ideal.probabilities);
}

Calibration calibrate_preset(const qsim::Circuit &reference, double target_fidelity, double p2_max, double tol)
{
    if (!(target_fidelity > 0.0 && target_fidelity <= 1.0))
        throw Error(ErrorKind::ParameterRange, "target fidelity must be in (0, 1]");
    double lo = 0.0;
    double hi = p2_max;
    const double f_hi = emulated_fidelity(reference, preset_from_p2(hi));
    if (f_hi > target_fidelity)
        throw Error(ErrorKind::Calibration, "target fidelity " + std::to_string(target_fidelity) +
                                                " unreachable with p2 <= " + std::to_string(p2_max) +
                                                " (fidelity there " + std::to_string(f_hi) + ")");
    Calibration out;
    double mid = 0.5 * (lo + hi);
    double f = 1.0;
    for (out.iterations = 0; out.iterations < 200; ++out.iterations) {
        mid = 0.5 * (lo + hi);
        f = emulated_fidelity(reference, preset_from_p2(mid));
        if (std::abs(f - target_fidelity) <= tol)
            break;
        if (f > target_fidelity)
            lo = mid;
        else
            hi = mid;
    }
    out.noise = preset_from_p2(mid);
    out.fidelity = f;
    return out;
}

} // namespace qradar::qkernel
