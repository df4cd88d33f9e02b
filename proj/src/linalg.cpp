#include "rqd/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rqd {

Tolerances& tolerances() {
    static Tolerances tol;
    return tol;
}

namespace {

void check_targets(int num_qubits, std::span<const int> targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= num_qubits) {
            throw TargetOutOfRange("qubit " + std::to_string(targets[i]) + " not in [0, " +
                                   std::to_string(num_qubits) + ")");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw TargetOutOfRange("duplicate target qubit " + std::to_string(targets[i]));
            }
        }
    }
}

}  // namespace

ComplexMatrix herm_expm(const ComplexMatrix& h, double scale) {
    if (!is_hermitian(h, tolerances().hermitian_check)) {
        throw NotHermitian("herm_expm requires a Hermitian matrix");
    }
    return HermitianPropagator(h).unitary(scale);
}

HermitianPropagator::HermitianPropagator(const ComplexMatrix& h) {
    if (!is_hermitian(h, tolerances().hermitian_check)) {
        throw NotHermitian("propagator requires a Hermitian matrix");
    }
    // Symmetrize so rounding in the input does not leak into the solver.
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

ComplexMatrix HermitianPropagator::unitary(double t) const {
    const Eigen::VectorXcd phases =
        (eigenvalues_.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

StateVector HermitianPropagator::evolve(const StateVector& psi0, double t) const {
    if (psi0.size() != dim()) {
        throw DimensionMismatch("state and propagator dimensions differ");
    }
    StateVector coeffs = eigenvectors_.adjoint() * psi0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        coeffs(k) *= std::exp(Complex(0.0, -t * eigenvalues_(k)));
    }
    return eigenvectors_ * coeffs;
}

StateVector basis_state(int num_qubits, std::uint64_t index) {
    StateVector s = StateVector::Zero(Eigen::Index{1} << num_qubits);
    s(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
}

namespace detail {

LocalIndexing make_local_indexing(int num_qubits, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    LocalIndexing ix;
    ix.offsets.resize(std::size_t{1} << k);
    std::uint64_t target_bits = 0;
    for (int t = 0; t < k; ++t) {
        target_bits |= qubit_mask(num_qubits, targets[t]);
    }
    for (std::uint64_t s = 0; s < ix.offsets.size(); ++s) {
        std::uint64_t off = 0;
        for (int t = 0; t < k; ++t) {
            if (s & (std::uint64_t{1} << (k - 1 - t))) {
                off |= qubit_mask(num_qubits, targets[t]);
            }
        }
        ix.offsets[s] = off;
    }
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    ix.bases.reserve(dim >> k);
    for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & target_bits) == 0) {
            ix.bases.push_back(i);
        }
    }
    return ix;
}

}  // namespace detail

void apply_gate_inplace(StateVector& state, const ComplexMatrix& gate,
                        std::span<const int> targets) {
    const int n = num_qubits_for_dim(state.size());
    check_targets(n, targets);
    const Eigen::Index local = Eigen::Index{1} << targets.size();
    if (gate.rows() != local || gate.cols() != local) {
        throw DimensionMismatch("gate is " + std::to_string(gate.rows()) + "x" +
                                std::to_string(gate.cols()) + " but acts on " +
                                std::to_string(targets.size()) + " qubits");
    }
    const auto ix = detail::make_local_indexing(n, targets);
    Eigen::VectorXcd in(local);
    for (const std::uint64_t base : ix.bases) {
        for (Eigen::Index s = 0; s < local; ++s) {
            in(s) = state(static_cast<Eigen::Index>(base | ix.offsets[s]));
        }
        for (Eigen::Index r = 0; r < local; ++r) {
            Complex acc = 0.0;
            for (Eigen::Index s = 0; s < local; ++s) {
                acc += gate(r, s) * in(s);
            }
            state(static_cast<Eigen::Index>(base | ix.offsets[r])) = acc;
        }
    }
}

StateVector apply_gate_to_state(const StateVector& state, const ComplexMatrix& gate,
                                std::span<const int> targets) {
    StateVector out = state;
    apply_gate_inplace(out, gate, targets);
    return out;
}

ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> targets,
                         int num_qubits) {
    check_targets(num_qubits, targets);
    const int k = static_cast<int>(targets.size());
    if (gate.rows() != (Eigen::Index{1} << k) || gate.cols() != gate.rows()) {
        throw DimensionMismatch("gate size does not match target count");
    }
    std::uint64_t target_bits = 0;
    for (const int t : targets) {
        target_bits |= qubit_mask(num_qubits, t);
    }
    auto local_index = [&](std::uint64_t global) {
        Eigen::Index s = 0;
        for (int t = 0; t < k; ++t) {
            s = (s << 1) | ((global & qubit_mask(num_qubits, targets[t])) ? 1 : 0);
        }
        return s;
    };
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto ui = static_cast<std::uint64_t>(i);
            const auto uj = static_cast<std::uint64_t>(j);
            if ((ui & ~target_bits) == (uj & ~target_bits)) {
                full(i, j) = gate(local_index(ui), local_index(uj));
            }
        }
    }
    return full;
}

double pure_state_overlap_sq(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("overlap of states with different dimensions");
    }
    return std::norm(a.dot(b));
}

}  // namespace rqd
