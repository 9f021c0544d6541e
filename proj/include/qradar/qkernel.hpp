// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qradar/qsim.hpp"

namespace qradar::qkernel {

/// |<phi(x)|phi(x')>|^2 with phi the ZZ feature-map state.
double kernel_exact(std::span<const double> x, std::span<const double> x_prime, int reps = 2);

/// U(x) followed by the exact inverse of U(x'); its all-zeros probability is the kernel.
qsim::Circuit compute_uncompute_circuit(std::span<const double> x, std::span<const double> x_prime, int reps = 2);

/// Frequency of the all-zeros outcome over `shots` runs of the compute-uncompute
/// circuit, with gate and readout noise when the model is non-ideal.
double kernel_shot(std::span<const double> x, std::span<const double> x_prime, std::uint64_t shots,
                   const qsim::NoiseModel &noise, Rng &rng, int reps = 2);

enum class KernelMethod { ExactFidelity, ShotEstimated, NoisyEmulated };

std::string_view to_string(KernelMethod m);

struct KernelSpec {
    KernelMethod method = KernelMethod::ExactFidelity;
    int reps = 2;
    std::uint64_t shots = 0;  // shot-based methods only
    qsim::NoiseModel noise;   // NoisyEmulated only
    std::uint64_t seed = 0;   // per-entry streams derive from (seed, i, j)
};

struct KernelMatrix {
    Eigen::MatrixXd entries;
    KernelSpec spec;
};

/// Rectangular kernel between rows of X and rows of Y (e.g. test x train).
KernelMatrix kernel_matrix(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y, const KernelSpec &spec,
                           unsigned threads = 1);

/// Square train kernel. Each unordered pair is evaluated once and mirrored;
/// shot-based methods get a unit diagonal.
KernelMatrix kernel_matrix(const Eigen::MatrixXd &X, const KernelSpec &spec, unsigned threads = 1);

double shannon_entropy_bits(std::span<const double> p);
/// Bhattacharyya fidelity (sum_i sqrt(p_i q_i))^2.
double classical_fidelity(std::span<const double> p, std::span<const double> q);
/// Mean probability of the least probable `fraction` of outcomes.
double noise_floor(std::span<const double> p, double fraction = 0.5);
/// Indices of the k most probable outcomes; ties go to the lower index.
std::vector<std::size_t> top_k_indices(std::span<const double> p, std::size_t k);

struct DistributionReport {
    std::vector<std::pair<std::string, double>> top_k;
    double shannon_entropy_bits = 0.0;
    double classical_fidelity = 0.0;
    double noise_floor = 0.0;
    double top1_uncertainty = 0.0; // 95% half-width, only for counts
    std::uint64_t shots = 0;
};

struct ReportOptions {
    std::size_t top_k = 5;
    double noise_floor_fraction = 0.5;
};

DistributionReport analyze_distribution(const qsim::OutcomeDistribution &measured,
                                        const qsim::OutcomeDistribution &ideal, const ReportOptions &opts = {});
DistributionReport analyze_distribution(const qsim::Counts &measured, const qsim::OutcomeDistribution &ideal,
                                        const ReportOptions &opts = {});

/// Empirical distribution of a counts table.
qsim::OutcomeDistribution to_distribution(const qsim::Counts &counts);

/// Noise preset family used for hardware emulation: p1 = p2/10, readout = p2/2.
qsim::NoiseModel preset_from_p2(double p2);

/// Classical fidelity of the noisy measured distribution of `reference` against its ideal distribution.
double emulated_fidelity(const qsim::Circuit &reference, const qsim::NoiseModel &noise);

struct Calibration {
    qsim::NoiseModel noise;
    double fidelity = 0.0;
    int iterations = 0;
};

/// Bisection on p2 in [0, p2_max] until the emulated fidelity matches the target.
/// Throws Calibration when the target is unreachable inside the bracket.
Calibration calibrate_preset(const qsim::Circuit &reference, double target_fidelity, double p2_max = 0.2,
                             double tol = 1e-6);

} // namespace qradar::qkernel
