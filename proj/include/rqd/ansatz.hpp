#pragma once

#include "rqd/circuit.hpp"
#include "rqd/model.hpp"

#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rqd {

class ParameterCountMismatch : public Error {
public:
    explicit ParameterCountMismatch(const std::string& what)
        : Error("ParameterCountMismatch", what) {}
};

enum class AnsatzKind { NumberConserving, Oracle };

std::string_view ansatz_kind_name(AnsatzKind kind);

/// Wiring of the A gates in the number-conserving ansatz.
struct AGateLayout {
    std::string_view name;
    std::vector<std::pair<int, int>> pairs;
};

/// Alternating brick wall on a ring: (0,1),(2,3),... then (1,2),(3,4),...,(n-1,0),
/// repeated and truncated to `num_gates`.
AGateLayout brick_wall_layout(int num_qubits, int num_gates);

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::NumberConserving;
    int num_qubits = 0;
    int num_particles = 0;
    int num_parameters = 0;
    GateTimings timings{};
    // Number-conserving only.
    AGateLayout layout;
    // Oracle only: the model Hamiltonian as a cached propagator.
    std::shared_ptr<const HermitianPropagator> hamiltonian;

    /// Qubits set to |1> before the variational gates: every other qubit
    /// starting at 0, num_particles of them.
    std::vector<int> occupied_qubits() const;
};

/// C(n, k) - 1 A gates, i.e. one fewer than the dimension of the
/// fixed-particle-number sector; two parameters per gate.
AnsatzSpec number_conserving_spec(int num_qubits, int num_particles, const GateTimings& timings = {});

AnsatzSpec oracle_spec(const ComplexMatrix& hamiltonian, int num_particles,
                       const GateTimings& timings = {});

/// X preparation of the charge-density-wave reference followed by the
/// variational gates. Parameters for the A gates are interleaved (theta, phi).
Circuit build_ansatz_circuit(const AnsatzSpec& spec, std::span<const double> params);

/// Same circuit with parameters left as slots $0..$(k-1).
Circuit build_ansatz_template(const AnsatzSpec& spec);

/// C(theta)|0...0> by direct state-vector simulation.
StateVector ansatz_state(const AnsatzSpec& spec, std::span<const double> params);

std::uint64_t binomial(int n, int k);

}  // namespace rqd
