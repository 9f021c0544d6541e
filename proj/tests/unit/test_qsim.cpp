// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qradar/qsim.hpp"

using namespace qradar;
using namespace qradar::qsim;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_features(Rng &rng, int n)
{
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double &v : x)
        v = uniform(rng, 0.0, kPi);
    return x;
}

Circuit random_circuit(Rng &rng, int n, int gates)
{
    Circuit c(n);
    for (int g = 0; g < gates; ++g) {
        const int q = static_cast<int>(rng() % static_cast<unsigned>(n));
        switch (rng() % 4) {
        case 0: c.h(q); break;
        case 1: c.p(q, uniform(rng, -kPi, kPi)); break;
        case 2: c.rz(q, uniform(rng, -kPi, kPi)); break;
        default: c.cx(q, (q + 1 + static_cast<int>(rng() % static_cast<unsigned>(n - 1))) % n); break;
        }
    }
    return c;
}

/// Pauli (0=I,1=X,2=Y,3=Z) on qubit q, written directly on the amplitude vector.
void apply_pauli(std::vector<Amplitude> &a, int q, int pauli)
{
    const std::size_t bit = std::size_t{1} << q;
    if (pauli == 1 || pauli == 2)
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!(i & bit))
                std::swap(a[i], a[i | bit]);
    if (pauli == 2 || pauli == 3)
        for (std::size_t i = 0; i < a.size(); ++i)
            if (i & bit)
                a[i] = -a[i];
}

/// Fidelity of the noisy ZZ map estimated by sampling Pauli errors along pure-state trajectories.
double trajectory_fidelity(const Circuit &c, const NoiseModel &noise, int trajectories, std::uint64_t seed)
{
    const auto ideal = simulate(c);
    Rng rng = make_rng(seed);
    double acc = 0.0;
    for (int t = 0; t < trajectories; ++t) {
        Statevector psi(c.n_qubits());
        for (const Gate &g : c.gates()) {
            psi.apply(g);
            const double p = g.arity() == 2 ? noise.p2 : noise.p1;
            if (uniform01(rng) < p) {
                // uniform over all 4^k Pauli strings (identity included) gives full depolarization
                auto amps = psi.amplitudes();
                for (int k = 0; k < g.arity(); ++k)
                    apply_pauli(amps, g.qubits[static_cast<std::size_t>(k)], static_cast<int>(rng() % 4));
                psi = Statevector(c.n_qubits(), std::move(amps));
            }
        }
        acc += std::norm(ideal.inner(psi));
    }
    return acc / trajectories;
}

Eigen::MatrixXcd to_eigen(const DensityMatrix &rho)
{
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = rho(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return m;
}

} // namespace

TEST_CASE("ZZ feature map gate counts", "[zz]")
{
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
    auto c = build_zz_feature_map(x, 2);
    auto st = circuit_stats(c);
    CHECK(st.h == 8);
    CHECK(st.p == 20);
    CHECK(st.cx == 24);
    CHECK(st.unitary_gates == 52);
    c.measure_all();
    st = circuit_stats(c);
    CHECK(st.measurements == 4);
    CHECK(st.barriers == 1);
    CHECK(st.total == 57);

    const auto small = circuit_stats(build_zz_feature_map(std::vector<double>{0.5, 1.0}, 1));
    CHECK(small.h == 2);
    CHECK(small.p == 3);
    CHECK(small.cx == 2);
}

TEST_CASE("ZZ feature map gate order and angles", "[zz]")
{
    const std::vector<double> x{0.3, 1.1};
    const auto c = build_zz_feature_map(x, 1);
    const std::vector<Gate> want{
        {GateKind::H, {0, -1}, 0.0},
        {GateKind::H, {1, -1}, 0.0},
        {GateKind::P, {0, -1}, 0.6},
        {GateKind::P, {1, -1}, 2.2},
        {GateKind::CX, {0, 1}, 0.0},
        {GateKind::P, {1, -1}, 2.0 * (kPi - 0.3) * (kPi - 1.1)},
        {GateKind::CX, {0, 1}, 0.0},
    };
    REQUIRE(c.gates().size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(c.gates()[i].kind == want[i].kind);
        CHECK(c.gates()[i].qubits == want[i].qubits);
        CHECK_THAT(c.gates()[i].theta, WithinAbs(want[i].theta, 1e-15));
    }
    CHECK(build_zz_feature_map(x, 2) == build_zz_feature_map(x, 2));
    CHECK_THROWS_AS(build_zz_feature_map(std::vector<double>{0.1}, 2), Error);
    CHECK_THROWS_AS(build_zz_feature_map(std::vector<double>(7, 0.1), 2), Error);
    CHECK_THROWS_AS(build_zz_feature_map(std::vector<double>{0.1, NAN}, 2), Error);
}

TEST_CASE("ZZ map state matches the closed form after one repetition", "[zz]")
{
    // After H on all qubits and the diagonal phases, amplitude of basis z is
    // 2^{-n/2} exp(i * sum over the phase terms active in z).
    Rng rng = make_rng(7);
    const auto x = random_features(rng, 3);
    const auto psi = simulate(build_zz_feature_map(x, 1));
    for (std::size_t z = 0; z < 8; ++z) {
        double phase = 0.0;
        for (int i = 0; i < 3; ++i)
            if ((z >> i) & 1)
                phase += 2.0 * x[static_cast<std::size_t>(i)];
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if ((((z >> i) ^ (z >> j)) & 1) != 0)
                    phase += 2.0 * (kPi - x[static_cast<std::size_t>(i)]) * (kPi - x[static_cast<std::size_t>(j)]);
        const Amplitude want = std::polar(1.0 / std::sqrt(8.0), phase);
        CHECK(std::abs(psi[z] - want) < 1e-12);
    }
}

TEST_CASE("elementary gate actions", "[statevector]")
{
    const auto plus = simulate(Circuit(1).h(0));
    CHECK_THAT(plus[0].real(), WithinAbs(0.70710678118654752, 1e-15));
    CHECK_THAT(plus[1].real(), WithinAbs(0.70710678118654752, 1e-15));

    // |10> with qubit 0 as the control; index has bit 0 set
    Statevector s(2, {0.0, 1.0, 0.0, 0.0});
    s.apply({GateKind::CX, {0, 1}, 0.0});
    CHECK(std::abs(s[3] - Amplitude(1.0, 0.0)) < 1e-15);

    Statevector one(1, {0.0, 1.0});
    one.apply({GateKind::P, {0, -1}, 0.7});
    CHECK(std::abs(one[1] - std::polar(1.0, 0.7)) < 1e-15);
    CHECK_THAT(std::norm(one[1]), WithinAbs(1.0, 1e-15));

    Statevector r(1, {std::sqrt(0.5), std::sqrt(0.5)});
    r.apply({GateKind::RZ, {0, -1}, 0.4});
    CHECK(std::abs(r[0] - std::sqrt(0.5) * std::polar(1.0, -0.2)) < 1e-15);
    CHECK(std::abs(r[1] - std::sqrt(0.5) * std::polar(1.0, 0.2)) < 1e-15);

    CHECK_THROWS_AS(Statevector(2, {1.0, 0.0}), Error);
    CHECK_THROWS_AS(apply(Circuit(3).h(0), Statevector(2)), Error);
    CHECK_THROWS_AS(Circuit(2).cx(1, 1), Error);
    CHECK_THROWS_AS(Circuit(2).h(2), Error);
    CHECK_THROWS_AS(Circuit(2).p(0, INFINITY), Error);
}

TEST_CASE("gate inverses and unitarity on random circuits", "[statevector]")
{
    Rng rng = make_rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 5;
        const auto c = random_circuit(rng, n, 40);
        Statevector psi(n);
        for (const Gate &g : c.gates()) {
            psi.apply(g);
            REQUIRE_THAT(psi.norm_squared(), WithinAbs(1.0, 1e-12));
        }
        const auto back = apply(c.inverse(), psi);
        REQUIRE_THAT(std::norm(back[0]), WithinAbs(1.0, 1e-10));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const auto x = random_features(rng, n);
        auto c = build_zz_feature_map(x, 2);
        c.append(c.inverse());
        REQUIRE_THAT(std::norm(simulate(c)[0]), WithinAbs(1.0, 1e-10));
    }
    Statevector s(2, {0.5, Amplitude(0.0, 0.5), -0.5, std::polar(0.5, 1.3)});
    const auto before = s.amplitudes();
    for (const Gate &g : {Gate{GateKind::H, {1, -1}, 0.0}, Gate{GateKind::CX, {1, 0}, 0.0}}) {
        s.apply(g);
        s.apply(g);
    }
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(s[i] - before[i]) < 1e-14);
}

TEST_CASE("circuit statistics", "[stats]")
{
    const auto empty = circuit_stats(Circuit(3));
    CHECK(empty.total == 0);
    CHECK(empty.depth == 0);
    CHECK(empty.unitary_gates == 0);

    Circuit chain(2);
    for (int i = 0; i < 7; ++i)
        chain.h(0);
    CHECK(circuit_stats(chain).depth == 7);

    Circuit par(3);
    par.h(0).h(1).h(2);
    CHECK(circuit_stats(par).depth == 1);
    par.measure_all();
    CHECK(circuit_stats(par).depth == 2);

    auto zz = build_zz_feature_map(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 2);
    zz.measure_all();
    const auto st = circuit_stats(zz);
    CHECK(st.asap_depth == 32);
    CHECK(st.depth == 38); // greedy layering cannot slide gates past an open layer
    CHECK(st.asap_depth <= st.depth);

    Circuit slide(3);
    slide.h(0).h(0).h(1).cx(1, 2);
    CHECK(circuit_stats(slide).depth == 3);
    CHECK(circuit_stats(slide).asap_depth == 2);
}

TEST_CASE("text form round-trips", "[circuit]")
{
    Rng rng = make_rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_circuit(rng, 4, 30);
        if (trial % 2)
            c.measure_all();
        const auto text = c.to_text();
        CHECK(Circuit::from_text(text) == c);
    }
    const auto zz = build_zz_feature_map(std::vector<double>{0.25, 0.5}, 1).to_text();
    CHECK(zz.rfind("H q0\nH q1\nP 0.5 q0\nP 1 q1\nCX q0 q1\n", 0) == 0);
    CHECK_THROWS_AS(Circuit::from_text("FOO q0\n"), Error);
    CHECK_THROWS_AS(Circuit::from_text("H x0\n"), Error);
}

TEST_CASE("noiseless density matrix equals the pure state projector", "[density]")
{
    Rng rng = make_rng(10);
    const auto c = build_zz_feature_map(random_features(rng, 4), 2);
    const auto psi = simulate(c);
    const auto rho = simulate_noisy(c, {});
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t k = 0; k < 16; ++k)
            REQUIRE(std::abs(rho(r, k) - psi[r] * std::conj(psi[k])) < 1e-12);
    CHECK_THAT(rho.fidelity(psi), WithinAbs(1.0, 1e-12));
}

TEST_CASE("full single-qubit depolarization gives the maximally mixed state", "[density]")
{
    const auto rho = simulate_noisy(Circuit(1).h(0), {1.0, 0.0, 0.0});
    CHECK(std::abs(rho(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(rho(1, 1) - 0.5) < 1e-15);
    CHECK(std::abs(rho(0, 1)) < 1e-15);

    // depolarizing one qubit of a Bell pair leaves the other one's marginal intact
    auto bell = DensityMatrix::from_statevector(simulate(Circuit(2).h(0).cx(0, 1)));
    const std::array<int, 1> q0{0};
    bell.depolarize(q0, 1.0);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(bell(i, i) - 0.25) < 1e-15);
}

TEST_CASE("depolarizing channel keeps states physical", "[density]")
{
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_circuit(rng, 3, 25);
        const NoiseModel nm{uniform(rng, 0.0, 0.3), uniform(rng, 0.0, 0.5), 0.0};
        const auto rho = simulate_noisy(c, nm);
        const auto m = to_eigen(rho);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("noisy fidelity agrees with a Pauli trajectory sampler", "[density]")
{
    const auto c = build_zz_feature_map(std::vector<double>{0.4, 1.3, 2.2, 2.9}, 2);
    const auto psi = simulate(c);
    for (const NoiseModel nm : {NoiseModel{0.0, 0.005, 0.0}, NoiseModel{0.004, 0.02, 0.0}}) {
        const double exact = simulate_noisy(c, nm).fidelity(psi);
        const double sampled = trajectory_fidelity(c, nm, 100000, 12);
        CHECK_THAT(exact, WithinAbs(sampled, 0.005));
        CHECK(exact < 1.0);
    }
}

TEST_CASE("measurement distributions", "[measure]")
{
    const auto zero = measure_distribution(Statevector(2));
    CHECK(zero.probabilities == std::vector<double>{1.0, 0.0, 0.0, 0.0});

    const auto uni = measure_distribution(simulate(Circuit(2).h(0).h(1)));
    for (double p : uni.probabilities)
        CHECK_THAT(p, WithinAbs(0.25, 1e-12));

    const auto ro = measure_distribution(Statevector(2), {0.0, 0.0, 0.1});
    CHECK_THAT(ro.probabilities[0], WithinAbs(0.81, 1e-12));
    CHECK_THAT(ro.probabilities[1], WithinAbs(0.09, 1e-12));
    CHECK_THAT(ro.probabilities[2], WithinAbs(0.09, 1e-12));
    CHECK_THAT(ro.probabilities[3], WithinAbs(0.01, 1e-12));

    Rng rng = make_rng(13);
    const auto psi = simulate(build_zz_feature_map(random_features(rng, 3), 2));
    const auto a = measure_distribution(psi, {0.0, 0.0, 0.07});
    const auto b = measure_distribution(DensityMatrix::from_statevector(psi), {0.0, 0.0, 0.07});
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_THAT(a.probabilities[i], WithinAbs(b.probabilities[i], 1e-12));
        total += a.probabilities[i];
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
    CHECK(bitstring(1, 3) == "100");
    CHECK(bitstring(6, 3) == "011");
}

TEST_CASE("shot sampling", "[shots]")
{
    OutcomeDistribution det{2, {0.0, 0.0, 1.0, 0.0}};
    Rng rng = make_rng(14);
    const auto c = sample_shots(det, 500, rng);
    CHECK(c.counts == std::vector<std::uint64_t>{0, 0, 500, 0});

    OutcomeDistribution uni{4, std::vector<double>(16, 1.0 / 16.0)};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng r = make_rng(seed, {1});
        const auto cnt = sample_shots(uni, 8192, r);
        std::uint64_t sum = 0;
        for (auto v : cnt.counts) {
            CHECK((v >= 412 && v <= 612));
            sum += v;
        }
        CHECK(sum == 8192);
    }

    Rng r1 = make_rng(3), r2 = make_rng(3);
    CHECK(sample_shots(uni, 1000, r1).counts == sample_shots(uni, 1000, r2).counts);
    CHECK_THROWS_AS(sample_shots(uni, 0, r1), Error);
    CHECK_THROWS_AS(sample_shots(OutcomeDistribution{1, {0.0, 0.0}}, 10, r1), Error);
}

TEST_CASE("top-outcome standard error halves when shots quadruple", "[shots]")
{
    OutcomeDistribution d{2, {0.4, 0.3, 0.2, 0.1}};
    auto sd_of = [&](std::uint64_t shots) {
        std::vector<double> f;
        for (std::uint64_t s = 0; s < 400; ++s) {
            Rng rng = make_rng(s, {shots});
            f.push_back(static_cast<double>(sample_shots(d, shots, rng).counts[0]) / static_cast<double>(shots));
        }
        double m = 0.0, v = 0.0;
        for (double x : f)
            m += x;
        m /= static_cast<double>(f.size());
        for (double x : f)
            v += (x - m) * (x - m);
        return std::sqrt(v / static_cast<double>(f.size() - 1));
    };
    const double ratio = sd_of(1000) / sd_of(4000);
    CHECK_THAT(ratio, WithinAbs(2.0, 0.3));
    CHECK_THAT(sd_of(1000), WithinAbs(std::sqrt(0.4 * 0.6 / 1000.0), 0.003));
}
