#include "oracles.hpp"
#include "rqd/circuit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace rqd;

namespace {

// Random bound circuit over the fixed gate set (no Oracle).
Circuit random_circuit(int n, int gates, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 7);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    Circuit c(n);
    for (int i = 0; i < gates; ++i) {
        const auto k = static_cast<GateKind>(kind(rng));
        std::vector<int> t{qubit(rng)};
        if (gate_arity(k) == 2) {
            int b = qubit(rng);
            while (b == t[0]) b = qubit(rng);
            t.push_back(b);
        }
        c.add(make_gate(k, t, {angle(rng), angle(rng)}));
    }
    return c;
}

// Distance between unitaries modulo a global phase.
double phase_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    Eigen::Index r = 0, col = 0;
    b.cwiseAbs().maxCoeff(&r, &col);
    const Complex phase = a(r, col) / b(r, col);
    return max_abs(a - (phase / std::abs(phase)) * b);
}

}  // namespace

TEST(GateMatrix, TextbookDefinitions) {
    const double t = 0.731;
    EXPECT_LT(max_abs(gate_matrix(make_gate(GateKind::RX, {0}, {t})) - oracle::rx(t)), 1e-15);
    EXPECT_LT(max_abs(gate_matrix(make_gate(GateKind::RY, {0}, {t})) - oracle::ry(t)), 1e-15);
    EXPECT_LT(max_abs(gate_matrix(make_gate(GateKind::RZ, {0}, {t})) - oracle::rz(t)), 1e-15);
    EXPECT_LT(max_abs(gate_matrix(make_gate(GateKind::CNOT, {0, 1})) - oracle::cnot()), 1e-15);
    ComplexMatrix zz = ComplexMatrix::Zero(4, 4);
    zz.diagonal() << 1, -1, -1, 1;
    EXPECT_LT(max_abs(gate_matrix(make_gate(GateKind::RZZ, {0, 1}, {t})) - oracle::taylor_expm(zz, t / 2)), 1e-13);
}

TEST(GateMatrix, AGateBlocks) {
    const ComplexMatrix a0 = a_gate_matrix(0.0, 1.1);
    EXPECT_NEAR(a0(1, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(a0(2, 2).real(), -1.0, 1e-15);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-4, 4);
    ComplexMatrix n01 = ComplexMatrix::Zero(4, 4);
    n01.diagonal() << 0, 1, 1, 2;
    for (int i = 0; i < 50; ++i) {
        const ComplexMatrix a = a_gate_matrix(u(rng), u(rng));
        EXPECT_NEAR(std::abs(a(0, 0)), 1.0, 1e-15);
        EXPECT_NEAR(std::abs(a(3, 3)), 1.0, 1e-15);
        EXPECT_LT(max_abs(a.adjoint() * a - ComplexMatrix::Identity(4, 4)), 1e-12);
        EXPECT_LT(max_abs(a * n01 - n01 * a), 1e-12);
    }
}

TEST(GateMatrix, UnboundParameterThrows) {
    Gate g = make_gate(GateKind::RZ, {0}, {0.1});
    g.slots[0] = 0;
    EXPECT_THROW(gate_matrix(g), UnboundParameter);
}

TEST(CircuitBuild, RejectsBadTargets) {
    Circuit c(2);
    EXPECT_THROW(c.add(make_gate(GateKind::X, {2})), TargetOutOfRange);
    EXPECT_THROW(c.add(make_gate(GateKind::CNOT, {1, 1})), TargetOutOfRange);
}

TEST(CircuitUnitary, MatchesStateSimulation) {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const Circuit c = random_circuit(3, 30, rng);
        const auto psi = oracle::random_state(8, rng);
        const StateVector viaU = circuit_to_unitary(c) * psi;
        EXPECT_LT(max_abs(apply_circuit(c, psi) - viaU), 1e-12);
    }
}

TEST(CircuitUnitary, MatchesKronEmbeddedProduct) {
    std::mt19937_64 rng(9);
    const Circuit c = random_circuit(4, 25, rng);
    ComplexMatrix u = ComplexMatrix::Identity(16, 16);
    for (const auto& g : c.gates()) u = oracle::kron_embed(gate_matrix(g), g.targets, 4) * u;
    EXPECT_LT(max_abs(circuit_to_unitary(c) - u), 1e-12);
}

TEST(Invert, InverseComposesToIdentity) {
    std::mt19937_64 rng(10);
    for (int gates : {1, 20, 200}) {
        const Circuit c = random_circuit(4, gates, rng);
        const ComplexMatrix u = circuit_to_unitary(c);
        const ComplexMatrix v = circuit_to_unitary(invert(c));
        EXPECT_LT(max_abs(u * v - ComplexMatrix::Identity(16, 16)), 1e-10);
        EXPECT_LT(max_abs(circuit_to_unitary(invert(invert(c))) - u), 1e-12);
    }
}

TEST(Invert, AGateIsItsOwnInverse) {
    const ComplexMatrix a = a_gate_matrix(0.4, -1.3);
    EXPECT_LT(max_abs(a * a - ComplexMatrix::Identity(4, 4)), 1e-15);
}

TEST(LowerToBasis, PreservesUnitaryExactly) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const Circuit c = random_circuit(4, 40, rng);
        const Circuit low = lower_to_basis(c);
        for (const auto& g : low.gates()) {
            EXPECT_NE(g.kind, GateKind::A);
            EXPECT_NE(g.kind, GateKind::RZZ);
        }
        EXPECT_LT(max_abs(circuit_to_unitary(low) - circuit_to_unitary(c)), 1e-12);
    }
}

TEST(LowerToBasis, AGateDecompositionMatchesMatrix) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int i = 0; i < 20; ++i) {
        Circuit c(2);
        const double th = u(rng), ph = u(rng);
        c.add(make_gate(GateKind::A, {0, 1}, {th, ph}));
        const Circuit low = lower_to_basis(c);
        EXPECT_EQ(low.size(), 7u);
        EXPECT_LT(max_abs(circuit_to_unitary(low) - a_gate_matrix(th, ph)), 1e-12);
    }
}

TEST(Simplify, KeepsUnitaryAndCancelsPairs) {
    Circuit c(3);
    c.add(make_gate(GateKind::CNOT, {0, 1}));
    c.add(make_gate(GateKind::RZ, {2}, {0.3}));
    c.add(make_gate(GateKind::CNOT, {0, 1}));
    c.add(make_gate(GateKind::H, {2}));
    c.add(make_gate(GateKind::H, {2}));
    c.add(make_gate(GateKind::RZ, {2}, {0.2}));
    const Circuit s = simplify(c);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s.gates()[0].angles[0], 0.5, 1e-15);
    EXPECT_LT(max_abs(circuit_to_unitary(s) - circuit_to_unitary(c)), 1e-12);

    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        const Circuit r = lower_to_basis(random_circuit(4, 60, rng));
        const Circuit rs = simplify(r);
        EXPECT_LE(rs.size(), r.size());
        EXPECT_LT(phase_distance(circuit_to_unitary(rs), circuit_to_unitary(r)), 1e-10);
    }
}

TEST(Bind, SlotsAreFilledInOrder) {
    Circuit c(2);
    Gate g = make_gate(GateKind::A, {0, 1});
    g.slots = {1, 0};
    c.add(g);
    EXPECT_FALSE(c.is_bound());
    EXPECT_EQ(c.num_parameters(), 2);
    const double p[] = {0.25, 0.5};
    const Circuit b = c.bind(p);
    EXPECT_TRUE(b.is_bound());
    EXPECT_DOUBLE_EQ(b.gates()[0].angles[0], 0.5);
    EXPECT_DOUBLE_EQ(b.gates()[0].angles[1], 0.25);
}

TEST(Text, RoundTripPreservesUnitary) {
    std::mt19937_64 rng(15);
    const Circuit c = random_circuit(4, 50, rng);
    const Circuit back = parse_circuit(to_text(c), 4);
    EXPECT_EQ(to_text(back), to_text(c));
    EXPECT_LT(max_abs(circuit_to_unitary(back) - circuit_to_unitary(c)), 1e-15);
}

TEST(Text, Golden) {
    Circuit c(3);
    c.add(make_gate(GateKind::X, {0}));
    c.add(make_gate(GateKind::CNOT, {0, 2}));
    c.add(make_gate(GateKind::RZ, {1}, {0.5}));
    Gate a = make_gate(GateKind::A, {1, 2});
    a.slots = {0, 1};
    c.add(a);
    EXPECT_EQ(to_text(c), "X 0\nCNOT 0,2\nRZ 1 0.5\nA 1,2 $0 $1\n");
}

TEST(Text, ParseErrors) {
    EXPECT_THROW(parse_circuit("FOO 0\n", 2), ParseError);
    EXPECT_THROW(parse_circuit("RZ 0\n", 2), ParseError);
    EXPECT_THROW(parse_circuit("X 0 1\n", 2), ParseError);
    EXPECT_THROW(parse_circuit("X a\n", 2), ParseError);
    EXPECT_THROW(parse_circuit("ORACLE 0 0.1\n", 2), ParseError);
    EXPECT_NO_THROW(parse_circuit("# comment\n\nH 1\n", 2));
}

TEST(Timings, GateDurations) {
    const GateTimings t;
    EXPECT_EQ(make_gate(GateKind::RX, {0}).duration_ns, t.single_qubit_ns);
    EXPECT_EQ(make_gate(GateKind::CNOT, {0, 1}).duration_ns, t.two_qubit_ns);
    EXPECT_EQ(make_gate(GateKind::A, {0, 1}).duration_ns, t.a_gate_ns);
    EXPECT_DOUBLE_EQ(t.oracle_ns, 26000.0);
    EXPECT_DOUBLE_EQ(t.decomposed_a_gate_ns(), 3 * t.two_qubit_ns + 4 * t.single_qubit_ns);
}
