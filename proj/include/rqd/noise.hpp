#pragma once

#include "rqd/linalg.hpp"
#include "rqd/scheduler.hpp"

#include <span>
#include <vector>

namespace rqd {

class InvalidNoiseParams : public Error {
public:
    explicit InvalidNoiseParams(const std::string& what) : Error("InvalidNoiseParams", what) {}
};

/// Per-qubit amplitude damping (T1) and pure dephasing (T2*).
struct NoiseParams {
    double t1_ms = 25.0;
    double t2s_ms = 25.0;
    bool enabled = true;
    // Coherences decay as exp(-tau (1/(2 T1) + dephasing_prefactor / T2*)).
    double dephasing_prefactor = 1.0;
    // Qubits without a gate in a layer still decohere for the layer duration.
    bool idle_decoherence = true;

    void validate() const;

    static NoiseParams disabled() {
        NoiseParams np;
        np.enabled = false;
        return np;
    }
    static NoiseParams coherence(double t_ms) {
        NoiseParams np;
        np.t1_ms = t_ms;
        np.t2s_ms = t_ms;
        return np;
    }
};

/// Hermitian, unit-trace 2^n x 2^n state. Storage is column-major.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix basis(int num_qubits, std::uint64_t index);
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    ComplexMatrix& matrix() { return m_; }

    double trace() const { return m_.trace().real(); }
    double population(std::uint64_t index) const {
        return m_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)).real();
    }
    /// <psi| rho |psi>
    double expectation(const StateVector& psi) const;
    double min_eigenvalue() const;

    /// Divides by the trace when it has drifted by more than the tolerance;
    /// returns true (and logs) if that happened.
    bool renormalize_if_drifted();

private:
    int num_qubits_ = 0;
    ComplexMatrix m_;
};

/// rho -> U rho U^dag for a gate on `targets` (targets[0] most significant).
void apply_unitary(DensityMatrix& rho, const ComplexMatrix& gate, std::span<const int> targets);

/// rho -> U rho U^dag for a full-register unitary.
void apply_full_unitary(DensityMatrix& rho, const ComplexMatrix& u);

/// Closed-form solution of the T1/T2* Lindblad dissipator (no Hamiltonian)
/// over `tau_ms`, applied independently to each listed qubit (all qubits if
/// `qubits` is empty).
void decohere_inplace(DensityMatrix& rho, double tau_ms, const NoiseParams& np,
                      std::span<const int> qubits = {});
DensityMatrix decohere(const DensityMatrix& rho, double tau_ms, const NoiseParams& np);

/// Applies each layer's gates as perfect unitaries, then lets the register
/// decohere for the layer duration.
void run_noisy_circuit_inplace(DensityMatrix& rho, const LayeredCircuit& lc, const NoiseParams& np);
DensityMatrix run_noisy_circuit(const DensityMatrix& rho0, const LayeredCircuit& lc,
                                const NoiseParams& np);

/// Sum over `qubits` of Tr[rho (I - Z_q)/2].
double expectation_diagonal(const DensityMatrix& rho, std::span<const int> qubits);

}  // namespace rqd
