#pragma once

#include "rqd/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace rqd {

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& what) : Error("IndexOutOfRange", what) {}
};

class InvalidModel : public Error {
public:
    explicit InvalidModel(const std::string& what) : Error("InvalidModel", what) {}
};

/// Interacting Aubry-Andre chain with periodic boundaries.
struct ModelParams {
    int num_sites = 6;
    double hopping = 1.0;       // J
    double disorder = 4.0;      // h
    double interaction = 4.0;   // U
    double beta = std::numbers::sqrt2;
    double phi = 0.0;
    // Site index used inside the disorder cosine: 1-based as printed in the
    // model definition; 0-based only for sensitivity checks.
    bool one_indexed_disorder = true;

    void validate() const;
};

struct LadderOp {
    int site = 1;  // 1-indexed lattice site
    bool creation = false;

    friend bool operator==(const LadderOp&, const LadderOp&) = default;
};

/// coefficient * ops[0] ops[1] ... (leftmost operator applied last).
struct FermionTerm {
    double coefficient = 0.0;
    std::vector<LadderOp> ops;
};

struct FermionHamiltonian {
    int num_sites = 0;
    std::vector<FermionTerm> terms;
};

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

struct PauliString {
    double coefficient = 0.0;
    std::map<int, Pauli> factors;  // qubit -> non-identity factor

    std::vector<int> support() const;
};

struct PauliHamiltonian {
    int num_qubits = 0;
    std::vector<PauliString> strings;
    double constant_offset = 0.0;
};

/// Terms in construction order: hoppings (both orderings, k = 1..N with
/// periodic wrap), on-site disorder, then density-density interactions.
/// Zero-coefficient families are pruned.
FermionHamiltonian build_aubry_andre(const ModelParams& params);

PauliHamiltonian jordan_wigner(const FermionHamiltonian& fh, int num_sites);

ComplexMatrix pauli_to_dense(const PauliHamiltonian& ph);

/// Single-string helpers (used by the Trotterizer and tests).
ComplexMatrix pauli_string_dense(const PauliString& ps, int num_qubits);
ComplexMatrix pauli_matrix(Pauli p);

/// Sum_k (I - Z_k)/2 over the given qubits (all qubits when empty).
ComplexMatrix number_operator(int num_qubits);

nlohmann::json to_json(const PauliHamiltonian& ph);
PauliHamiltonian pauli_hamiltonian_from_json(const nlohmann::json& doc);

/// The sixteen disorder phases of the reference experiment.
const std::vector<double>& reference_phis();

}  // namespace rqd
