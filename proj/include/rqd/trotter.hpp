#pragma once

#include "rqd/circuit.hpp"
#include "rqd/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace rqd {

class EmptyHamiltonian : public Error {
public:
    explicit EmptyHamiltonian(const std::string& what) : Error("EmptyHamiltonian", what) {}
};

enum class TermOrder {
    AsConstructed,    // order emitted by the model builder
    SortedBySupport,  // by support size, then lexicographic support
    Shuffled,         // seeded permutation of the constructed order
};

std::string_view term_order_name(TermOrder order);
std::optional<TermOrder> term_order_from_name(std::string_view name);

struct TrotterConfig {
    double dt = 0.04;
    TermOrder order = TermOrder::AsConstructed;
    std::uint64_t shuffle_seed = 0;  // used by TermOrder::Shuffled
    GateTimings timings{};

    void validate() const;
};

/// Pauli strings of `ph` in the order selected by `cfg`.
std::vector<PauliString> ordered_terms(const PauliHamiltonian& ph, const TrotterConfig& cfg);

/// Circuit for exp(-i dt c P): basis change, CNOT ladder, RZ(2 c dt), undo.
Circuit pauli_exponential(const PauliString& ps, double dt, int num_qubits,
                          const GateTimings& timings = {});

/// First-order product prod_j exp(-i dt c_j P_j); the identity/offset phase is
/// dropped.
Circuit trotter_step(const PauliHamiltonian& ph, const TrotterConfig& cfg);

/// Seed derived from the disorder phase so that TermOrder::Shuffled is a pure
/// function of the model.
std::uint64_t seed_from_phase(double phi);

}  // namespace rqd
