#pragma once

#include "rqd/linalg.hpp"

#include <array>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rqd {

class UnboundParameter : public Error {
public:
    explicit UnboundParameter(const std::string& what) : Error("UnboundParameter", what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

enum class GateKind { X, H, RX, RY, RZ, CNOT, RZZ, A, Oracle };

std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);
int gate_arity(GateKind kind);  // -1 for whole-register gates
int gate_num_angles(GateKind kind);

/// Wall-clock gate durations of the simulated device. Defaults put the
/// compiled six-site Trotter step near 0.16 ms and the six-qubit
/// number-conserving ansatz (one X layer plus seven A-gate layers) at the
/// 0.026 ms of the oracle gate.
struct GateTimings {
    double single_qubit_ns = 100.0;
    double two_qubit_ns = 3000.0;
    double a_gate_ns = 3700.0;
    double oracle_ns = 26000.0;

    /// Critical path of the CNOT/rotation decomposition of an A gate: three
    /// CNOTs and four single-qubit rotations.
    double decomposed_a_gate_ns() const { return 3.0 * two_qubit_ns + 4.0 * single_qubit_ns; }
    double duration_ns(GateKind kind) const;
};

struct Gate {
    GateKind kind = GateKind::X;
    std::vector<int> targets;
    std::array<double, 2> angles{0.0, 0.0};
    // Parameter-vector index feeding each angle, or -1 when the angle is bound.
    std::array<int, 2> slots{-1, -1};
    double duration_ns = 0.0;
    // Generator H of an Oracle gate, exp(-i angles[0] H).
    std::shared_ptr<const HermitianPropagator> generator;

    bool is_bound() const { return slots[0] < 0 && slots[1] < 0; }
};

Gate make_gate(GateKind kind, std::vector<int> targets, std::array<double, 2> angles = {},
               const GateTimings& timings = {});
Gate make_oracle_gate(int num_qubits, double theta,
                      std::shared_ptr<const HermitianPropagator> generator,
                      const GateTimings& timings = {});

struct ParameterSlot {
    std::size_t gate_index = 0;
    std::string name;  // "theta" or "phi"
    int parameter = 0;
};

/// Ordered gate list over a fixed register.
class Circuit {
public:
    Circuit() = default;
    explicit Circuit(int num_qubits) : num_qubits_(num_qubits) {}

    int num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& add(Gate g);
    Circuit& append(const Circuit& other);

    std::vector<ParameterSlot> parameter_slots() const;
    int num_parameters() const;
    bool is_bound() const;
    Circuit bind(std::span<const double> params) const;

    double total_gate_time_ns() const;

private:
    int num_qubits_ = 0;
    std::vector<Gate> gates_;
};

/// Unitary of a bound gate, dimension 2^arity (2^n for Oracle gates).
ComplexMatrix gate_matrix(const Gate& g);

ComplexMatrix a_gate_matrix(double theta, double phi);

/// Reversed circuit of inverse gates.
Circuit invert(const Circuit& c);

/// Dense product of embedded gate unitaries; limited to 8 qubits.
ComplexMatrix circuit_to_unitary(const Circuit& c);

void apply_circuit_inplace(const Circuit& c, StateVector& state);
StateVector apply_circuit(const Circuit& c, const StateVector& state);

/// Rewrites RZZ as CNOT-RZ-CNOT and A gates as their CNOT/rotation
/// decomposition; other gates pass through. The dense unitary is unchanged.
Circuit lower_to_basis(const Circuit& c, const GateTimings& timings = {});

/// Peephole pass: cancels adjacent mutually inverse gates and fuses adjacent
/// same-axis rotations on identical targets. Gates are adjacent when no other
/// gate touches any of their qubits in between.
Circuit simplify(const Circuit& c);

/// One gate per line: `KIND q0[,q1] [param...]`.
std::string to_text(const Circuit& c);
Circuit parse_circuit(std::string_view text, int num_qubits, const GateTimings& timings = {});

}  // namespace rqd
