#include "rqd/ansatz.hpp"

namespace rqd {

std::string_view ansatz_kind_name(AnsatzKind kind) {
    return kind == AnsatzKind::NumberConserving ? "number_conserving" : "oracle";
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

AGateLayout brick_wall_layout(int num_qubits, int num_gates) {
    if (num_qubits < 2 || num_qubits % 2 != 0) {
        throw std::invalid_argument("brick-wall layout needs an even register of at least 2 qubits");
    }
    AGateLayout layout{"brick-wall-ring-v1", {}};
    int layer = 0;
    while (static_cast<int>(layout.pairs.size()) < num_gates) {
        const int start = layer % 2;
        for (int q = start; q < num_qubits + start && static_cast<int>(layout.pairs.size()) < num_gates;
             q += 2) {
            layout.pairs.emplace_back(q % num_qubits, (q + 1) % num_qubits);
        }
        ++layer;
    }
    return layout;
}

std::vector<int> AnsatzSpec::occupied_qubits() const {
    std::vector<int> out;
    for (int p = 0; p < num_particles; ++p) out.push_back(2 * p);
    return out;
}

AnsatzSpec number_conserving_spec(int num_qubits, int num_particles, const GateTimings& timings) {
    if (num_particles < 0 || 2 * num_particles > num_qubits) {
        throw std::invalid_argument("particles must fit on alternating sites");
    }
    const int num_gates = static_cast<int>(binomial(num_qubits, num_particles)) - 1;
    AnsatzSpec spec;
    spec.kind = AnsatzKind::NumberConserving;
    spec.num_qubits = num_qubits;
    spec.num_particles = num_particles;
    spec.num_parameters = 2 * num_gates;
    spec.timings = timings;
    spec.layout = brick_wall_layout(num_qubits, num_gates);
    return spec;
}

AnsatzSpec oracle_spec(const ComplexMatrix& hamiltonian, int num_particles, const GateTimings& timings) {
    AnsatzSpec spec;
    spec.kind = AnsatzKind::Oracle;
    spec.num_qubits = num_qubits_for_dim(hamiltonian.rows());
    spec.num_particles = num_particles;
    spec.num_parameters = 1;
    spec.timings = timings;
    spec.hamiltonian = std::make_shared<const HermitianPropagator>(hamiltonian);
    return spec;
}

namespace {

Circuit build(const AnsatzSpec& spec, std::span<const double> params, bool as_template) {
    Circuit c(spec.num_qubits);
    for (const int q : spec.occupied_qubits()) {
        c.add(make_gate(GateKind::X, {q}, {}, spec.timings));
    }
    auto value = [&](int i) { return as_template ? 0.0 : params[i]; };
    if (spec.kind == AnsatzKind::Oracle) {
        Gate g = make_oracle_gate(spec.num_qubits, value(0), spec.hamiltonian, spec.timings);
        if (as_template) g.slots[0] = 0;
        c.add(std::move(g));
        return c;
    }
    int p = 0;
    for (const auto& [a, b] : spec.layout.pairs) {
        Gate g = make_gate(GateKind::A, {a, b}, {value(p), value(p + 1)}, spec.timings);
        if (as_template) g.slots = {p, p + 1};
        c.add(std::move(g));
        p += 2;
    }
    return c;
}

}  // namespace

Circuit build_ansatz_circuit(const AnsatzSpec& spec, std::span<const double> params) {
    if (static_cast<int>(params.size()) != spec.num_parameters) {
        throw ParameterCountMismatch("ansatz expects " + std::to_string(spec.num_parameters) +
                                     " parameters, got " + std::to_string(params.size()));
    }
    return build(spec, params, false);
}

Circuit build_ansatz_template(const AnsatzSpec& spec) { return build(spec, {}, true); }

StateVector ansatz_state(const AnsatzSpec& spec, std::span<const double> params) {
    return apply_circuit(build_ansatz_circuit(spec, params), basis_state(spec.num_qubits, 0));
}

}  // namespace rqd
