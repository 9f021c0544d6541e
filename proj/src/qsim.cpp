// SPDX-License-Identifier: Apache-2.0
#include "qradar/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace qradar::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit(int q, int n)
{
    if (q < 0 || q >= n)
        throw Error(ErrorKind::InvalidArgument, "qubit index " + std::to_string(q) + " out of range for " +
                                                    std::to_string(n) + " qubits");
}

// Kernels over a raw register of `bits` qubits. `offset` shifts the qubit
// index (density-matrix rows), `conjugate` applies U* instead of U.
void kernel_h(std::span<Amplitude> v, int q)
{
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i & mask)
            continue;
        const Amplitude a = v[i];
        const Amplitude b = v[i | mask];
        v[i] = (a + b) * kInvSqrt2;
        v[i | mask] = (a - b) * kInvSqrt2;
    }
}

void kernel_diag(std::span<Amplitude> v, int q, Amplitude d0, Amplitude d1)
{
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] *= (i & mask) ? d1 : d0;
}

void kernel_cx(std::span<Amplitude> v, int control, int target)
{
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((i & cmask) && !(i & tmask))
            std::swap(v[i], v[i | tmask]);
}

void apply_gate(std::span<Amplitude> v, const Gate &g, int offset, bool conjugate)
{
    const int q = g.qubits[0] + offset;
    const double sign = conjugate ? -1.0 : 1.0;
    switch (g.kind) {
    case GateKind::H:
        kernel_h(v, q);
        break;
    case GateKind::P:
        kernel_diag(v, q, 1.0, std::polar(1.0, sign * g.theta));
        break;
    case GateKind::RZ:
        kernel_diag(v, q, std::polar(1.0, -sign * g.theta / 2.0), std::polar(1.0, sign * g.theta / 2.0));
        break;
    case GateKind::CX:
        kernel_cx(v, q, g.qubits[1] + offset);
        break;
    }
}

std::string_view gate_name(GateKind k)
{
    switch (k) {
    case GateKind::H: return "H";
    case GateKind::P: return "P";
    case GateKind::RZ: return "RZ";
    case GateKind::CX: return "CX";
    }
    return "?";
}

int parse_qubit(const std::string &tok)
{
    if (tok.size() < 2 || tok[0] != 'q')
        throw Error(ErrorKind::InvalidArgument, "expected qubit token like q0, got '" + tok + "'");
    return std::stoi(tok.substr(1));
}

} // namespace

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits)
{
    if (n_qubits < 1)
        throw Error(ErrorKind::InvalidArgument, "circuit needs at least one qubit");
}

Circuit &Circuit::add(const Gate &g)
{
    if (measured_)
        throw Error(ErrorKind::InvalidArgument, "cannot add gates after measurement");
    check_qubit(g.qubits[0], n_qubits_);
    if (g.arity() == 2) {
        check_qubit(g.qubits[1], n_qubits_);
        if (g.qubits[0] == g.qubits[1])
            throw Error(ErrorKind::InvalidArgument, "CX control and target must differ");
    }
    if (!std::isfinite(g.theta))
        throw Error(ErrorKind::InvalidArgument, "gate angle must be finite");
    Gate stored = g;
    if (stored.arity() == 1)
        stored.qubits[1] = -1;
    if (stored.kind == GateKind::H || stored.kind == GateKind::CX)
        stored.theta = 0.0;
    gates_.push_back(stored);
    return *this;
}

Circuit &Circuit::h(int q) { return add({GateKind::H, {q, -1}, 0.0}); }
Circuit &Circuit::p(int q, double theta) { return add({GateKind::P, {q, -1}, theta}); }
Circuit &Circuit::rz(int q, double theta) { return add({GateKind::RZ, {q, -1}, theta}); }
Circuit &Circuit::cx(int control, int target) { return add({GateKind::CX, {control, target}, 0.0}); }

Circuit &Circuit::measure_all()
{
    measured_ = true;
    return *this;
}

Circuit &Circuit::append(const Circuit &other)
{
    if (other.n_qubits_ != n_qubits_)
        throw Error(ErrorKind::DimensionMismatch, "append: qubit counts differ");
    if (other.measured_)
        throw Error(ErrorKind::InvalidArgument, "append: appended circuit must not be measured");
    for (const auto &g : other.gates_)
        add(g);
    return *this;
}

Circuit Circuit::inverse() const
{
    Circuit inv(n_qubits_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
        Gate g = *it;
        g.theta = -g.theta;
        if (g.kind == GateKind::H || g.kind == GateKind::CX)
            g.theta = 0.0;
        inv.add(g);
    }
    return inv;
}

std::string Circuit::to_text() const
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto &g : gates_) {
        os << gate_name(g.kind);
        if (g.kind == GateKind::P || g.kind == GateKind::RZ)
            os << ' ' << g.theta;
        os << " q" << g.qubits[0];
        if (g.arity() == 2)
            os << " q" << g.qubits[1];
        os << '\n';
    }
    if (measured_)
        for (int q = 0; q < n_qubits_; ++q)
            os << "M q" << q << '\n';
    return os.str();
}

Circuit Circuit::from_text(const std::string &text)
{
    struct Parsed {
        Gate gate;
        bool measure;
        int qubit;
    };
    std::vector<Parsed> parsed;
    int max_qubit = -1;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op))
            continue;
        Parsed p{};
        if (op == "M") {
            std::string q;
            ls >> q;
            p.measure = true;
            p.qubit = parse_qubit(q);
        } else if (op == "H" || op == "CX") {
            std::string a, b;
            ls >> a;
            p.gate.kind = op == "H" ? GateKind::H : GateKind::CX;
            p.gate.qubits[0] = parse_qubit(a);
            if (op == "CX") {
                ls >> b;
                p.gate.qubits[1] = parse_qubit(b);
            }
        } else if (op == "P" || op == "RZ") {
            std::string a;
            if (!(ls >> p.gate.theta))
                throw Error(ErrorKind::InvalidArgument, "missing angle in line: " + line);
            ls >> a;
            p.gate.kind = op == "P" ? GateKind::P : GateKind::RZ;
            p.gate.qubits[0] = parse_qubit(a);
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown gate '" + op + "'");
        }
        max_qubit = std::max({max_qubit, p.measure ? p.qubit : p.gate.qubits[0], p.gate.qubits[1]});
        parsed.push_back(p);
    }
    Circuit c(std::max(1, max_qubit + 1));
    bool measured = false;
    for (const auto &p : parsed) {
        if (p.measure)
            measured = true;
        else
            c.add(p.gate);
    }
    if (measured)
        c.measure_all();
    return c;
}

CircuitStats circuit_stats(const Circuit &circuit)
{
    CircuitStats s;
    std::vector<bool> busy(circuit.n_qubits(), false);
    std::vector<int> level(circuit.n_qubits(), 0);
    bool layer_open = false;
    for (const auto &g : circuit.gates()) {
        switch (g.kind) {
        case GateKind::H: ++s.h; break;
        case GateKind::P: ++s.p; break;
        case GateKind::RZ: ++s.rz; break;
        case GateKind::CX: ++s.cx; break;
        }
        bool conflict = busy[g.qubits[0]] || (g.arity() == 2 && busy[g.qubits[1]]);
        if (!layer_open || conflict) {
            std::fill(busy.begin(), busy.end(), false);
            ++s.depth;
            layer_open = true;
        }
        busy[g.qubits[0]] = true;
        if (g.arity() == 2)
            busy[g.qubits[1]] = true;

        int d = level[g.qubits[0]];
        if (g.arity() == 2)
            d = std::max(d, level[g.qubits[1]]);
        level[g.qubits[0]] = d + 1;
        if (g.arity() == 2)
            level[g.qubits[1]] = d + 1;
    }
    s.unitary_gates = static_cast<int>(circuit.gates().size());
    s.asap_depth = level.empty() ? 0 : *std::max_element(level.begin(), level.end());
    if (circuit.measured()) {
        s.barriers = 1;
        s.measurements = circuit.n_qubits();
        ++s.depth;
        ++s.asap_depth;
    }
    s.total = s.unitary_gates + s.barriers + s.measurements;
    return s;
}

Circuit build_zz_feature_map(std::span<const double> x, int reps)
{
    const int n = static_cast<int>(x.size());
    if (n < 2)
        throw Error(ErrorKind::InvalidArgument, "ZZ feature map needs at least 2 features");
    if (n > kMaxQubits)
        throw Error(ErrorKind::ParameterRange, "ZZ feature map limited to " + std::to_string(kMaxQubits) + " qubits");
    if (reps < 1)
        throw Error(ErrorKind::InvalidArgument, "reps must be >= 1");
    for (double v : x)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidArgument, "feature values must be finite");

    constexpr double pi = std::numbers::pi;
    Circuit c(n);
    for (int r = 0; r < reps; ++r) {
        for (int q = 0; q < n; ++q)
            c.h(q);
        for (int q = 0; q < n; ++q)
            c.p(q, 2.0 * x[q]);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                c.cx(i, j);
                c.p(j, 2.0 * (pi - x[i]) * (pi - x[j]));
                c.cx(i, j);
            }
        }
    }
    return c;
}

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits)
{
    if (n_qubits < 1 || n_qubits > 20)
        throw Error(ErrorKind::ParameterRange, "statevector qubit count out of range");
    amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes))
{
    if (amps_.size() != (std::size_t{1} << n_qubits))
        throw Error(ErrorKind::DimensionMismatch, "amplitude count must be 2^n");
}

void Statevector::apply(const Gate &g)
{
    check_qubit(g.qubits[0], n_qubits_);
    if (g.arity() == 2)
        check_qubit(g.qubits[1], n_qubits_);
    apply_gate(amps_, g, 0, false);
}

double Statevector::norm_squared() const
{
    double s = 0.0;
    for (const auto &a : amps_)
        s += std::norm(a);
    return s;
}

Amplitude Statevector::inner(const Statevector &other) const
{
    if (other.dim() != dim())
        throw Error(ErrorKind::DimensionMismatch, "inner product of states with different dimensions");
    Amplitude s{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i)
        s += std::conj(amps_[i]) * other.amps_[i];
    return s;
}

Statevector apply(const Circuit &circuit, Statevector state)
{
    if (state.n_qubits() != circuit.n_qubits())
        throw Error(ErrorKind::DimensionMismatch, "state has " + std::to_string(state.n_qubits()) +
                                                      " qubits, circuit has " + std::to_string(circuit.n_qubits()));
    for (const auto &g : circuit.gates())
        state.apply(g);
    return state;
}

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits)
{
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw Error(ErrorKind::ParameterRange,
                    "density-matrix simulation limited to " + std::to_string(kMaxQubits) + " qubits");
    rho_.assign(dim() * dim(), {0.0, 0.0});
    rho_[0] = 1.0;
}

DensityMatrix DensityMatrix::from_statevector(const Statevector &psi)
{
    DensityMatrix dm(psi.n_qubits());
    const std::size_t d = dm.dim();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            dm.rho_[r * d + c] = psi[r] * std::conj(psi[c]);
    return dm;
}

void DensityMatrix::apply(const Gate &g)
{
    check_qubit(g.qubits[0], n_qubits_);
    if (g.arity() == 2)
        check_qubit(g.qubits[1], n_qubits_);
    // rho -> U rho U^dagger: U on the row bits, U* on the column bits.
    apply_gate(rho_, g, n_qubits_, false);
    apply_gate(rho_, g, 0, true);
}

void DensityMatrix::depolarize(std::span<const int> support, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorKind::ParameterRange, "depolarizing probability must be in [0, 1]");
    if (p == 0.0)
        return;
    std::size_t mask = 0;
    for (int q : support) {
        check_qubit(q, n_qubits_);
        mask |= std::size_t{1} << q;
    }
    std::vector<std::size_t> subsets;
    for (std::size_t s = mask;; s = (s - 1) & mask) {
        subsets.push_back(s);
        if (s == 0)
            break;
    }
    const double inv_d = 1.0 / static_cast<double>(subsets.size());
    const std::size_t d = dim();
    std::vector<Amplitude> out(rho_.size());
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            Amplitude v = (1.0 - p) * rho_[r * d + c];
            if ((r & mask) == (c & mask)) {
                Amplitude reduced{0.0, 0.0};
                const std::size_t rb = r & ~mask;
                const std::size_t cb = c & ~mask;
                for (auto s : subsets)
                    reduced += rho_[(rb | s) * d + (cb | s)];
                v += p * inv_d * reduced;
            }
            out[r * d + c] = v;
        }
    }
    rho_ = std::move(out);
}

Amplitude DensityMatrix::trace() const
{
    Amplitude t{0.0, 0.0};
    for (std::size_t i = 0; i < dim(); ++i)
        t += rho_[i * dim() + i];
    return t;
}

double DensityMatrix::fidelity(const Statevector &psi) const
{
    if (psi.dim() != dim())
        throw Error(ErrorKind::DimensionMismatch, "fidelity: dimension mismatch");
    Amplitude acc{0.0, 0.0};
    const std::size_t d = dim();
    for (std::size_t r = 0; r < d; ++r) {
        Amplitude row{0.0, 0.0};
        for (std::size_t c = 0; c < d; ++c)
            row += rho_[r * d + c] * psi[c];
        acc += std::conj(psi[r]) * row;
    }
    return acc.real();
}

void NoiseModel::validate() const
{
    auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!ok(p1) || !ok(p2) || !ok(readout_flip))
        throw Error(ErrorKind::ParameterRange, "noise probabilities must be in [0, 1]");
}

DensityMatrix simulate_noisy(const Circuit &circuit, const NoiseModel &noise)
{
    noise.validate();
    DensityMatrix rho(circuit.n_qubits());
    for (const auto &g : circuit.gates()) {
        rho.apply(g);
        const double p = g.arity() == 2 ? noise.p2 : noise.p1;
        if (p > 0.0)
            rho.depolarize(std::span<const int>(g.qubits.data(), g.arity()), p);
    }
    return rho;
}

OutcomeDistribution apply_readout_error(OutcomeDistribution dist, double flip)
{
    if (!(flip >= 0.0 && flip <= 1.0))
        throw Error(ErrorKind::ParameterRange, "readout flip probability must be in [0, 1]");
    if (flip == 0.0)
        return dist;
    for (int q = 0; q < dist.n_qubits; ++q) {
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (i & mask)
                continue;
            const double a = dist.probabilities[i];
            const double b = dist.probabilities[i | mask];
            dist.probabilities[i] = (1.0 - flip) * a + flip * b;
            dist.probabilities[i | mask] = flip * a + (1.0 - flip) * b;
        }
    }
    return dist;
}

OutcomeDistribution measure_distribution(const Statevector &state, const NoiseModel &noise)
{
    OutcomeDistribution d{state.n_qubits(), std::vector<double>(state.dim())};
    for (std::size_t i = 0; i < state.dim(); ++i)
        d.probabilities[i] = std::norm(state[i]);
    return apply_readout_error(std::move(d), noise.readout_flip);
}

OutcomeDistribution measure_distribution(const DensityMatrix &state, const NoiseModel &noise)
{
    OutcomeDistribution d{state.n_qubits(), std::vector<double>(state.dim())};
    for (std::size_t i = 0; i < state.dim(); ++i)
        d.probabilities[i] = std::max(0.0, state(i, i).real());
    return apply_readout_error(std::move(d), noise.readout_flip);
}

Counts sample_shots(const OutcomeDistribution &dist, std::uint64_t shots, Rng &rng)
{
    if (shots < 1)
        throw Error(ErrorKind::InvalidArgument, "shots must be >= 1");
    if (dist.probabilities.empty())
        throw Error(ErrorKind::InvalidArgument, "empty outcome distribution");
    std::vector<double> cdf(dist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += std::max(0.0, dist.probabilities[i]);
        cdf[i] = acc;
    }
    if (!(acc > 0.0))
        throw Error(ErrorKind::DegenerateInput, "outcome distribution has zero mass");

    Counts out{dist.n_qubits, shots, std::vector<std::uint64_t>(dist.size(), 0)};
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        // Guard against landing past the end or on a zero-probability tail.
        idx = std::min(idx, dist.size() - 1);
        while (dist.probabilities[idx] <= 0.0 && idx > 0)
            --idx;
        ++out.counts[idx];
    }
    return out;
}

std::string bitstring(std::size_t index, int n_qubits)
{
    std::string s(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q)
        if (index & (std::size_t{1} << q))
            s[q] = '1';
    return s;
}

} // namespace qradar::qsim
