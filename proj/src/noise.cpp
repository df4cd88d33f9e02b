#include "rqd/noise.hpp"

#include "rqd/circuit.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>

namespace rqd {

void NoiseParams::validate() const {
    if (!enabled) return;
    if (!(t1_ms > 0.0) || !(t2s_ms > 0.0) || !std::isfinite(t1_ms) || !std::isfinite(t2s_ms)) {
        throw InvalidNoiseParams("T1 and T2* must be positive and finite");
    }
    if (!(dephasing_prefactor >= 0.0)) {
        throw InvalidNoiseParams("dephasing prefactor must be non-negative");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionMismatch("density matrix must be square");
    }
    num_qubits_ = num_qubits_for_dim(m_.rows());
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis(int num_qubits, std::uint64_t index) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::expectation(const StateVector& psi) const {
    if (psi.size() != m_.rows()) {
        throw DimensionMismatch("state and density matrix dimensions differ");
    }
    return psi.dot(m_ * psi).real();
}

double DensityMatrix::min_eigenvalue() const {
    const ComplexMatrix sym = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::renormalize_if_drifted() {
    const double tr = trace();
    if (std::abs(tr - 1.0) <= tolerances().trace_drift) {
        return false;
    }
    std::clog << "rqd: density matrix trace drifted to " << tr << ", renormalizing\n";
    m_ /= tr;
    return true;
}

namespace {

// m <- m * U^dag restricted to the target columns: every column group
// {base | offsets[k]} is replaced by sum_k conj(U(j, k)) column_k. Rows of U
// that are unit vectors e_j leave their column untouched and are skipped.
void right_multiply_adjoint(ComplexMatrix& m, const ComplexMatrix& gate,
                            const detail::LocalIndexing& ix) {
    const int local = static_cast<int>(gate.rows());
    struct Term {
        int k;
        Complex c;
    };
    std::vector<int> active;
    std::vector<std::vector<Term>> rows_terms;
    for (int j = 0; j < local; ++j) {
        std::vector<Term> terms;
        for (int k = 0; k < local; ++k) {
            const Complex c = std::conj(gate(j, k));
            if (c != Complex(0.0, 0.0)) terms.push_back({k, c});
        }
        if (terms.size() == 1 && terms[0].k == j && terms[0].c == Complex(1.0, 0.0)) continue;
        active.push_back(j);
        rows_terms.push_back(std::move(terms));
    }
    if (active.empty()) return;
    ComplexMatrix buffer(m.rows(), static_cast<Eigen::Index>(active.size()));
    for (const std::uint64_t base : ix.bases) {
        auto col = [&](int k) { return m.col(static_cast<Eigen::Index>(base | ix.offsets[k])); };
        for (std::size_t a = 0; a < active.size(); ++a) {
            const auto& terms = rows_terms[a];
            auto out = buffer.col(static_cast<Eigen::Index>(a));
            out.noalias() = terms[0].c * col(terms[0].k);
            for (std::size_t t = 1; t < terms.size(); ++t) out.noalias() += terms[t].c * col(terms[t].k);
        }
        for (std::size_t a = 0; a < active.size(); ++a) col(active[a]) = buffer.col(static_cast<Eigen::Index>(a));
    }
}

}  // namespace

void apply_unitary(DensityMatrix& rho, const ComplexMatrix& gate, std::span<const int> targets) {
    const auto n = rho.num_qubits();
    for (const int t : targets) {
        if (t < 0 || t >= n) {
            throw TargetOutOfRange("qubit " + std::to_string(t) + " outside register");
        }
    }
    if (gate.rows() != (Eigen::Index{1} << targets.size()) || gate.cols() != gate.rows()) {
        throw DimensionMismatch("gate size does not match target count");
    }
    const auto ix = detail::make_local_indexing(n, targets);
    ComplexMatrix& m = rho.matrix();
    // U rho U^dag = (rho U^dag)^dag U^dag, using Hermiticity of the result.
    right_multiply_adjoint(m, gate, ix);
    m.adjointInPlace();
    right_multiply_adjoint(m, gate, ix);
}

void apply_full_unitary(DensityMatrix& rho, const ComplexMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw DimensionMismatch("unitary does not match density matrix");
    }
    ComplexMatrix tmp = u * rho.matrix();
    rho.matrix().noalias() = tmp * u.adjoint();
}

void decohere_inplace(DensityMatrix& rho, double tau_ms, const NoiseParams& np,
                      std::span<const int> qubits) {
    if (tau_ms < 0.0) {
        throw std::invalid_argument("decoherence interval must be non-negative");
    }
    np.validate();
    if (!np.enabled || tau_ms == 0.0) return;

    const double gamma = -std::expm1(-tau_ms / np.t1_ms);
    const double keep = 1.0 - gamma;
    const double coherence =
        std::exp(-tau_ms * (0.5 / np.t1_ms + np.dephasing_prefactor / np.t2s_ms));

    const int n = rho.num_qubits();
    const auto dim = static_cast<std::uint64_t>(rho.dim());
    ComplexMatrix& m = rho.matrix();
    Complex* data = m.data();  // column-major: (i, j) at data[i + j * dim]

    auto one_qubit = [&](int q) {
        const std::uint64_t b = qubit_mask(n, q);
        for (std::uint64_t j0 = 0; j0 < dim; ++j0) {
            if (j0 & b) continue;
            const std::uint64_t j1 = j0 | b;
            Complex* c0 = data + j0 * dim;
            Complex* c1 = data + j1 * dim;
            for (std::uint64_t i0 = 0; i0 < dim; ++i0) {
                if (i0 & b) continue;
                const std::uint64_t i1 = i0 | b;
                const Complex excited = c1[i1];
                c0[i0] += gamma * excited;
                c1[i1] = keep * excited;
                c1[i0] *= coherence;
                c0[i1] *= coherence;
            }
        }
    };

    if (qubits.empty()) {
        for (int q = 0; q < n; ++q) one_qubit(q);
    } else {
        for (const int q : qubits) {
            if (q < 0 || q >= n) {
                throw TargetOutOfRange("qubit " + std::to_string(q) + " outside register");
            }
            one_qubit(q);
        }
    }
}

DensityMatrix decohere(const DensityMatrix& rho, double tau_ms, const NoiseParams& np) {
    DensityMatrix out = rho;
    decohere_inplace(out, tau_ms, np);
    return out;
}

void run_noisy_circuit_inplace(DensityMatrix& rho, const LayeredCircuit& lc, const NoiseParams& np) {
    if (rho.num_qubits() != lc.num_qubits) {
        throw DimensionMismatch("circuit and density matrix registers differ");
    }
    np.validate();
    std::vector<int> active;
    for (std::size_t l = 0; l < lc.layers.size(); ++l) {
        active.clear();
        for (const auto& g : lc.layers[l]) {
            if (g.kind == GateKind::Oracle) {
                apply_full_unitary(rho, gate_matrix(g));
            } else {
                apply_unitary(rho, gate_matrix(g), g.targets);
            }
            active.insert(active.end(), g.targets.begin(), g.targets.end());
        }
        const double tau_ms = lc.layer_durations_ns[l] * 1e-6;
        if (np.idle_decoherence) {
            decohere_inplace(rho, tau_ms, np);
        } else if (!active.empty()) {
            decohere_inplace(rho, tau_ms, np, active);
        }
    }
    rho.renormalize_if_drifted();
}

DensityMatrix run_noisy_circuit(const DensityMatrix& rho0, const LayeredCircuit& lc,
                                const NoiseParams& np) {
    DensityMatrix rho = rho0;
    run_noisy_circuit_inplace(rho, lc, np);
    return rho;
}

double expectation_diagonal(const DensityMatrix& rho, std::span<const int> qubits) {
    const int n = rho.num_qubits();
    for (const int q : qubits) {
        if (q < 0 || q >= n) {
            throw TargetOutOfRange("qubit " + std::to_string(q) + " outside register");
        }
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        const double p = rho.matrix()(i, i).real();
        for (const int q : qubits) {
            if (static_cast<std::uint64_t>(i) & qubit_mask(n, q)) total += p;
        }
    }
    return total;
}

}  // namespace rqd
