// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qradar/common.hpp"

namespace qradar::qsim {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 6;

enum class GateKind { H, P, RZ, CX };

/// Qubit q is bit q of a basis-state index. For CX, qubits[0] is the control.
struct Gate {
    GateKind kind = GateKind::H;
    std::array<int, 2> qubits{0, -1};
    double theta = 0.0;

    int arity() const { return kind == GateKind::CX ? 2 : 1; }
    bool operator==(const Gate &) const = default;
};

class Circuit {
  public:
    explicit Circuit(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const std::vector<Gate> &gates() const { return gates_; }
    bool measured() const { return measured_; }

    Circuit &h(int q);
    Circuit &p(int q, double theta);
    Circuit &rz(int q, double theta);
    Circuit &cx(int control, int target);
    Circuit &add(const Gate &g);
    /// Terminal computational-basis measurement of every qubit, preceded by one
    /// barrier across the register (counted as an instruction, like the usual toolchains do).
    Circuit &measure_all();

    /// Gates of `other` appended; `other` must act on the same register and be unmeasured.
    Circuit &append(const Circuit &other);
    /// Exact inverse (reversed order, negated angles). Measurement is dropped.
    Circuit inverse() const;

    /// One gate per line: `H q0`, `P 1.234 q2`, `RZ 0.5 q1`, `CX q0 q1`, and `M qN` per measured qubit.
    std::string to_text() const;
    static Circuit from_text(const std::string &text);

    bool operator==(const Circuit &) const = default;

  private:
    int n_qubits_;
    std::vector<Gate> gates_;
    bool measured_ = false;
};

struct CircuitStats {
    int h = 0;
    int p = 0;
    int rz = 0;
    int cx = 0;
    int measurements = 0;
    int barriers = 0;
    int unitary_gates = 0;
    int total = 0;      // unitary gates + barriers + measurements
    int depth = 0;      // greedy layering
    int asap_depth = 0; // each gate placed in the earliest layer its qubits allow
};

/// Counts by kind. `depth` uses greedy layering (a gate opens a new layer iff it
/// touches a qubit already used in the current layer); `asap_depth` lets gates
/// slide forward past unrelated qubits. Barriers add no depth; measurements form
/// one final layer in both.
CircuitStats circuit_stats(const Circuit &circuit);

/// Fully entangled ZZ feature map: per repetition H on all qubits, P(2 x_i),
/// then for every pair i < j: CX(i,j) P(2 (pi - x_i)(pi - x_j)) on j, CX(i,j).
Circuit build_zz_feature_map(std::span<const double> x, int reps = 2);

class Statevector {
  public:
    /// |0...0> on n qubits.
    explicit Statevector(int n_qubits);
    Statevector(int n_qubits, std::vector<Amplitude> amplitudes);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Amplitude> &amplitudes() const { return amps_; }
    Amplitude operator[](std::size_t i) const { return amps_[i]; }

    void apply(const Gate &g);
    double norm_squared() const;
    Amplitude inner(const Statevector &other) const; // <this|other>

  private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

/// Matrix-free application of every gate; measurement flags are ignored.
Statevector apply(const Circuit &circuit, Statevector state);
inline Statevector simulate(const Circuit &circuit) { return apply(circuit, Statevector(circuit.n_qubits())); }

class DensityMatrix {
  public:
    /// |0...0><0...0|
    explicit DensityMatrix(int n_qubits);
    static DensityMatrix from_statevector(const Statevector &psi);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return std::size_t{1} << n_qubits_; }
    Amplitude operator()(std::size_t r, std::size_t c) const { return rho_[r * dim() + c]; }

    void apply(const Gate &g);
    /// rho -> (1-p) rho + p (I_S / d_S (x) Tr_S rho) on the listed support qubits.
    void depolarize(std::span<const int> support, double p);

    Amplitude trace() const;
    /// <psi|rho|psi>
    double fidelity(const Statevector &psi) const;

  private:
    int n_qubits_;
    std::vector<Amplitude> rho_; // row-major; row bits sit above column bits
};

struct NoiseModel {
    double p1 = 0.0;           // depolarizing probability after 1-qubit gates
    double p2 = 0.0;           // after 2-qubit gates
    double readout_flip = 0.0; // symmetric per-qubit bit flip at measurement

    bool ideal() const { return p1 == 0.0 && p2 == 0.0 && readout_flip == 0.0; }
    bool gate_noise() const { return p1 != 0.0 || p2 != 0.0; }
    void validate() const;
};

DensityMatrix simulate_noisy(const Circuit &circuit, const NoiseModel &noise);

struct OutcomeDistribution {
    int n_qubits = 0;
    std::vector<double> probabilities; // index = basis state

    std::size_t size() const { return probabilities.size(); }
};

OutcomeDistribution measure_distribution(const Statevector &state, const NoiseModel &noise = {});
OutcomeDistribution measure_distribution(const DensityMatrix &state, const NoiseModel &noise = {});
/// Independent symmetric bit flips on each qubit applied as a linear map.
OutcomeDistribution apply_readout_error(OutcomeDistribution dist, double flip);

struct Counts {
    int n_qubits = 0;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> counts; // index = basis state
};

/// Multinomial draw of `shots` outcomes.
Counts sample_shots(const OutcomeDistribution &dist, std::uint64_t shots, Rng &rng);

/// Bitstring label with qubit 0 leftmost.
std::string bitstring(std::size_t index, int n_qubits);

} // namespace qradar::qsim
