#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

namespace {

using Index = Eigen::Index;

std::uint64_t site_bit(int n, int site) { return std::uint64_t{1} << (n - site); }

int popcount_left(std::uint64_t state, int n, int site) {
    int count = 0;
    for (int s = 1; s < site; ++s) count += (state & site_bit(n, s)) ? 1 : 0;
    return count;
}

// Applies one ladder operator; returns false when the result vanishes.
bool apply_ladder(std::uint64_t& state, double& sign, int n, int site, bool creation) {
    const std::uint64_t bit = site_bit(n, site);
    const bool occupied = state & bit;
    if (creation == occupied) return false;
    if (popcount_left(state, n, site) % 2) sign = -sign;
    state ^= bit;
    return true;
}

}  // namespace

ComplexMatrix fermion_matrix(const rqd::FermionHamiltonian& fh) {
    const int n = fh.num_sites;
    const Index dim = Index{1} << n;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& term : fh.terms) {
        for (Index col = 0; col < dim; ++col) {
            std::uint64_t state = static_cast<std::uint64_t>(col);
            double sign = 1.0;
            bool alive = true;
            for (auto it = term.ops.rbegin(); it != term.ops.rend() && alive; ++it) {
                alive = apply_ladder(state, sign, n, it->site, it->creation);
            }
            if (alive) h(static_cast<Index>(state), col) += sign * term.coefficient;
        }
    }
    return h;
}

ComplexMatrix aubry_andre_occupation(const rqd::ModelParams& p) {
    const int n = p.num_sites;
    const Index dim = Index{1} << n;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    auto wrap = [n](int k) { return (k - 1) % n + 1; };
    for (Index col = 0; col < dim; ++col) {
        const auto s = static_cast<std::uint64_t>(col);
        auto occ = [&](int site) { return (s & site_bit(n, site)) ? 1.0 : 0.0; };
        for (int k = 1; k <= n; ++k) {
            const int kk = p.one_indexed_disorder ? k : k - 1;
            h(col, col) += p.disorder * std::cos(2.0 * std::numbers::pi * p.beta * kk + p.phi) * occ(k);
            h(col, col) += p.interaction * occ(k) * occ(wrap(k + 1));
            // -J (a_k^dag a_{k+1} + a_{k+1}^dag a_k)
            const int a = k;
            const int b = wrap(k + 1);
            for (const auto& [to, from] : {std::pair{a, b}, std::pair{b, a}}) {
                std::uint64_t st = s;
                double sign = 1.0;
                if (!apply_ladder(st, sign, n, from, false)) continue;
                if (!apply_ladder(st, sign, n, to, true)) continue;
                h(static_cast<Index>(st), col) += -p.hopping * sign;
            }
        }
    }
    return h;
}

ComplexMatrix taylor_expm(const ComplexMatrix& h, double t) {
    const ComplexMatrix a = Complex(0.0, -t) * h;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
    const ComplexMatrix b = a / std::ldexp(1.0, squarings);
    ComplexMatrix result = ComplexMatrix::Identity(h.rows(), h.cols());
    ComplexMatrix term = result;
    for (int k = 1; k <= 30; ++k) {
        term = term * b / static_cast<double>(k);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

ComplexMatrix kron_embed(const ComplexMatrix& gate, const std::vector<int>& targets, int num_qubits) {
    // gate (x) identity on the remaining qubits, then permute qubits so that
    // targets[j] sits at position j.
    const int k = static_cast<int>(targets.size());
    const ComplexMatrix rest = ComplexMatrix::Identity(Index{1} << (num_qubits - k), Index{1} << (num_qubits - k));
    const ComplexMatrix big = rqd::kron(gate, rest);
    std::vector<int> order = targets;  // position -> physical qubit
    for (int q = 0; q < num_qubits; ++q) {
        if (std::find(targets.begin(), targets.end(), q) == targets.end()) order.push_back(q);
    }
    const Index dim = Index{1} << num_qubits;
    // P maps a physical basis index to the permuted one.
    auto permute = [&](Index phys) {
        Index out = 0;
        for (int pos = 0; pos < num_qubits; ++pos) {
            const int bit = (phys >> (num_qubits - 1 - order[pos])) & 1;
            out |= static_cast<Index>(bit) << (num_qubits - 1 - pos);
        }
        return out;
    };
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) p(permute(i), i) = 1.0;
    return p.transpose() * big * p;
}

ComplexMatrix lindblad_rk4(const ComplexMatrix& rho, double tau, double t1, double t2s, double h) {
    const int n = rqd::num_qubits_for_dim(rho.rows());
    ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
    lower(0, 1) = 1.0;  // |0><1|
    std::vector<ComplexMatrix> sig, num;
    for (int q = 0; q < n; ++q) {
        const ComplexMatrix s = kron_embed(lower, {q}, n);
        sig.push_back(s);
        num.push_back(s.adjoint() * s);
    }
    auto deriv = [&](const ComplexMatrix& r) {
        ComplexMatrix d = ComplexMatrix::Zero(r.rows(), r.cols());
        for (int q = 0; q < n; ++q) {
            const ComplexMatrix& s = sig[q];
            const ComplexMatrix& nq = num[q];
            d -= (nq * r + r * nq - 2.0 * s * r * s.adjoint()) / (2.0 * t1);
            d -= (nq * r + r * nq - 2.0 * nq * r * nq) / t2s;
        }
        return d;
    };
    ComplexMatrix r = rho;
    const int steps = static_cast<int>(std::ceil(tau / h - 1e-9));
    const double dt = steps ? tau / steps : 0.0;
    for (int i = 0; i < steps; ++i) {
        const ComplexMatrix k1 = deriv(r);
        const ComplexMatrix k2 = deriv(r + 0.5 * dt * k1);
        const ComplexMatrix k3 = deriv(r + 0.5 * dt * k2);
        const ComplexMatrix k4 = deriv(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

std::vector<int> brute_force_layers(const rqd::Circuit& c) {
    const auto& gates = c.gates();
    std::vector<int> layer(gates.size(), 0);
    for (std::size_t i = 0; i < gates.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            bool shares = false;
            for (int a : gates[i].targets) {
                for (int b : gates[j].targets) shares = shares || a == b;
            }
            if (shares) layer[i] = std::max(layer[i], layer[j] + 1);
        }
    }
    return layer;
}

std::vector<double> richardson_gradient(const std::function<double(const std::vector<double>&)>& f,
                                        const std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    auto central = [&](std::size_t i, double step) {
        std::vector<double> up = x, down = x;
        up[i] += step;
        down[i] -= step;
        return (f(up) - f(down)) / (2.0 * step);
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d1 = central(i, h);
        const double d2 = central(i, h / 2.0);
        g[i] = (4.0 * d2 - d1) / 3.0;
    }
    return g;
}

ComplexMatrix random_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(dim, dim);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    return qr.householderQ();
}

StateVector random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    StateVector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}

ComplexMatrix random_density(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(dim, dim);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
    ComplexMatrix r = a * a.adjoint();
    return r / r.trace().real();
}

ComplexMatrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(dim, dim);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
    return (a + a.adjoint()) / 2.0;
}

double overlap_sq(const StateVector& a, const StateVector& b) {
    Complex s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += std::conj(a(i)) * b(i);
    return std::norm(s);
}

ComplexMatrix rx(double t) {
    ComplexMatrix m(2, 2);
    m << std::cos(t / 2), Complex(0, -std::sin(t / 2)), Complex(0, -std::sin(t / 2)), std::cos(t / 2);
    return m;
}

ComplexMatrix ry(double t) {
    ComplexMatrix m(2, 2);
    m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
    return m;
}

ComplexMatrix rz(double t) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = std::exp(Complex(0, -t / 2));
    m(1, 1) = std::exp(Complex(0, t / 2));
    return m;
}

ComplexMatrix cnot() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

}  // namespace oracle
