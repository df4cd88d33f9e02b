#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Errors shared across the library. Each carries a stable name so callers
// (and the CLI) can map them to diagnostics without string matching.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define RQD_DEFINE_ERROR(Name)                                           \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name, what) {}   \
    }

RQD_DEFINE_ERROR(NotHermitian);
RQD_DEFINE_ERROR(DimensionMismatch);
RQD_DEFINE_ERROR(TargetOutOfRange);
RQD_DEFINE_ERROR(TooLarge);

#undef RQD_DEFINE_ERROR

// Numerical tolerances used by the checks in this library.
struct Tolerances {
    double hermitian_check = 1e-10;
    double hermitian_flag = 1e-12;
    double unitary_norm = 1e-10;
    double trace_drift = 1e-9;
    double pauli_drop = 1e-14;
};

// Process-wide tolerance record. Defaults are what the test-suite asserts.
Tolerances& tolerances();

/// Kronecker product, (ra*rb) x (ca*cb). Qubit ordering follows the operand
/// order: `a` acts on the more significant bits.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    const Eigen::Index rb = b.rows();
    const Eigen::Index cb = b.cols();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * rb, a.cols() * cb);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) < tol;
}

/// exp(-i * scale * h) for Hermitian `h` via eigendecomposition.
/// Throws NotHermitian when the symmetry check fails.
ComplexMatrix herm_expm(const ComplexMatrix& h, double scale);

/// Caches the eigendecomposition of a Hermitian operator so that
/// exp(-i t H) can be formed repeatedly for many t.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const ComplexMatrix& h);

    ComplexMatrix unitary(double t) const;
    StateVector evolve(const StateVector& psi0, double t) const;

    const RealVector& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }
    Eigen::Index dim() const { return eigenvalues_.size(); }

private:
    RealVector eigenvalues_;
    ComplexMatrix eigenvectors_;
};

StateVector basis_state(int num_qubits, std::uint64_t index);

inline int num_qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    if ((Eigen::Index{1} << n) != dim) {
        throw DimensionMismatch("dimension " + std::to_string(dim) + " is not a power of two");
    }
    return n;
}

// Bit of `index` that encodes qubit `q` in an n-qubit register; qubit 0 is
// the most significant bit.
inline std::uint64_t qubit_mask(int num_qubits, int q) {
    return std::uint64_t{1} << (num_qubits - 1 - q);
}

/// Applies a 2^k x 2^k gate to `targets` of `state` in place, without forming
/// the full operator. targets[0] is the most significant bit of the gate's
/// local index.
void apply_gate_inplace(StateVector& state, const ComplexMatrix& gate,
                        std::span<const int> targets);

StateVector apply_gate_to_state(const StateVector& state, const ComplexMatrix& gate,
                                std::span<const int> targets);

/// Full 2^n x 2^n operator for `gate` acting on `targets`, built entry by entry.
ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> targets,
                         int num_qubits);

/// |<a|b>|^2 for normalized states.
double pure_state_overlap_sq(const StateVector& a, const StateVector& b);

// Local-operator index tables shared by the state and density kernels.
namespace detail {

struct LocalIndexing {
    // offsets[s] = global bit pattern for local index s
    std::vector<std::uint64_t> offsets;
    // all global indices whose target bits are zero
    std::vector<std::uint64_t> bases;
};

LocalIndexing make_local_indexing(int num_qubits, std::span<const int> targets);

}  // namespace detail

}  // namespace rqd
