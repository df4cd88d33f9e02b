#include "rqd/trotter.hpp"

#include <algorithm>
#include <bit>
#include <numbers>
#include <random>

namespace rqd {

std::string_view term_order_name(TermOrder order) {
    switch (order) {
        case TermOrder::AsConstructed:
            return "as-constructed";
        case TermOrder::SortedBySupport:
            return "sorted-by-support";
        case TermOrder::Shuffled:
            return "shuffled";
    }
    return "?";
}

std::optional<TermOrder> term_order_from_name(std::string_view name) {
    for (const auto o : {TermOrder::AsConstructed, TermOrder::SortedBySupport, TermOrder::Shuffled}) {
        if (term_order_name(o) == name) return o;
    }
    return std::nullopt;
}

void TrotterConfig::validate() const {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("Trotter dt must be positive");
    }
}

std::uint64_t seed_from_phase(double phi) {
    // splitmix64 finalizer over the IEEE bits
    std::uint64_t z = std::bit_cast<std::uint64_t>(phi) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<PauliString> ordered_terms(const PauliHamiltonian& ph, const TrotterConfig& cfg) {
    std::vector<PauliString> terms = ph.strings;
    switch (cfg.order) {
        case TermOrder::AsConstructed:
            break;
        case TermOrder::SortedBySupport:
            std::stable_sort(terms.begin(), terms.end(), [](const PauliString& a, const PauliString& b) {
                const auto sa = a.support();
                const auto sb = b.support();
                if (sa.size() != sb.size()) return sa.size() < sb.size();
                return sa < sb;
            });
            break;
        case TermOrder::Shuffled: {
            // Fisher-Yates over mt19937_64, whose output sequence is fixed by
            // the standard, so the permutation is portable.
            std::mt19937_64 rng(cfg.shuffle_seed);
            for (std::size_t i = terms.size(); i > 1; --i) {
                const std::size_t j = rng() % i;
                std::swap(terms[i - 1], terms[j]);
            }
            break;
        }
    }
    return terms;
}

Circuit pauli_exponential(const PauliString& ps, double dt, int num_qubits,
                          const GateTimings& timings) {
    Circuit c(num_qubits);
    if (ps.factors.empty()) {
        return c;  // global phase
    }
    constexpr double half_pi = std::numbers::pi / 2;
    const auto support = ps.support();

    auto basis_change = [&](bool undo) {
        for (const auto& [q, p] : ps.factors) {
            if (p == Pauli::X) {
                c.add(make_gate(GateKind::H, {q}, {}, timings));
            } else if (p == Pauli::Y) {
                c.add(make_gate(GateKind::RX, {q}, {undo ? -half_pi : half_pi, 0.0}, timings));
            }
        }
    };

    basis_change(false);
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
        c.add(make_gate(GateKind::CNOT, {support[i], support[i + 1]}, {}, timings));
    }
    c.add(make_gate(GateKind::RZ, {support.back()}, {2.0 * ps.coefficient * dt, 0.0}, timings));
    for (std::size_t i = support.size() - 1; i > 0; --i) {
        c.add(make_gate(GateKind::CNOT, {support[i - 1], support[i]}, {}, timings));
    }
    basis_change(true);
    return c;
}

Circuit trotter_step(const PauliHamiltonian& ph, const TrotterConfig& cfg) {
    cfg.validate();
    if (ph.strings.empty()) {
        throw EmptyHamiltonian("Trotter step of a Hamiltonian with no Pauli strings");
    }
    Circuit c(ph.num_qubits);
    for (const auto& ps : ordered_terms(ph, cfg)) {
        c.append(pauli_exponential(ps, cfg.dt, ph.num_qubits, cfg.timings));
    }
    return c;
}

}  // namespace rqd
