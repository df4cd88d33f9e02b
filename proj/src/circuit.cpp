#include "rqd/circuit.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace rqd {

namespace {

struct KindInfo {
    GateKind kind;
    std::string_view name;
    int arity;
    int num_angles;
};

constexpr KindInfo kKinds[] = {
    {GateKind::X, "X", 1, 0},       {GateKind::H, "H", 1, 0},
    {GateKind::RX, "RX", 1, 1},     {GateKind::RY, "RY", 1, 1},
    {GateKind::RZ, "RZ", 1, 1},     {GateKind::CNOT, "CNOT", 2, 0},
    {GateKind::RZZ, "RZZ", 2, 1},   {GateKind::A, "A", 2, 2},
    {GateKind::Oracle, "ORACLE", -1, 1},
};

const KindInfo& info(GateKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw std::logic_error("unknown gate kind");
}

void check_bound(const Gate& g) {
    if (!g.is_bound()) {
        throw UnboundParameter(std::string(gate_name(g.kind)) + " gate has an unbound parameter");
    }
}

}  // namespace

std::string_view gate_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) return k.kind;
    }
    return std::nullopt;
}

int gate_arity(GateKind kind) { return info(kind).arity; }
int gate_num_angles(GateKind kind) { return info(kind).num_angles; }

double GateTimings::duration_ns(GateKind kind) const {
    switch (kind) {
        case GateKind::A:
            return a_gate_ns;
        case GateKind::Oracle:
            return oracle_ns;
        case GateKind::CNOT:
        case GateKind::RZZ:
            return two_qubit_ns;
        default:
            return single_qubit_ns;
    }
}

Gate make_gate(GateKind kind, std::vector<int> targets, std::array<double, 2> angles,
               const GateTimings& timings) {
    if (kind == GateKind::Oracle) {
        throw std::invalid_argument("use make_oracle_gate for ORACLE gates");
    }
    if (static_cast<int>(targets.size()) != gate_arity(kind)) {
        throw DimensionMismatch(std::string(gate_name(kind)) + " takes " +
                                std::to_string(gate_arity(kind)) + " target(s)");
    }
    Gate g;
    g.kind = kind;
    g.targets = std::move(targets);
    g.angles = angles;
    g.duration_ns = timings.duration_ns(kind);
    return g;
}

Gate make_oracle_gate(int num_qubits, double theta,
                      std::shared_ptr<const HermitianPropagator> generator,
                      const GateTimings& timings) {
    if (!generator || generator->dim() != (Eigen::Index{1} << num_qubits)) {
        throw DimensionMismatch("oracle generator does not match the register");
    }
    Gate g;
    g.kind = GateKind::Oracle;
    for (int q = 0; q < num_qubits; ++q) {
        g.targets.push_back(q);
    }
    g.angles = {theta, 0.0};
    g.duration_ns = timings.oracle_ns;
    g.generator = std::move(generator);
    return g;
}

Circuit& Circuit::add(Gate g) {
    for (const int t : g.targets) {
        if (t < 0 || t >= num_qubits_) {
            throw TargetOutOfRange("gate target " + std::to_string(t) + " outside a " +
                                   std::to_string(num_qubits_) + "-qubit circuit");
        }
    }
    for (std::size_t i = 1; i < g.targets.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (g.targets[i] == g.targets[j]) throw TargetOutOfRange("gate targets must be distinct");
        }
    }
    if (!(g.duration_ns > 0.0)) {
        throw std::invalid_argument("gate duration must be positive");
    }
    gates_.push_back(std::move(g));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.num_qubits_ != num_qubits_) {
        throw DimensionMismatch("appending circuits over different registers");
    }
    for (const auto& g : other.gates_) {
        gates_.push_back(g);
    }
    return *this;
}

std::vector<ParameterSlot> Circuit::parameter_slots() const {
    std::vector<ParameterSlot> out;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        for (int a = 0; a < 2; ++a) {
            if (gates_[i].slots[a] >= 0) {
                out.push_back({i, a == 0 ? "theta" : "phi", gates_[i].slots[a]});
            }
        }
    }
    return out;
}

int Circuit::num_parameters() const {
    int n = 0;
    for (const auto& s : parameter_slots()) {
        n = std::max(n, s.parameter + 1);
    }
    return n;
}

bool Circuit::is_bound() const {
    for (const auto& g : gates_) {
        if (!g.is_bound()) return false;
    }
    return true;
}

Circuit Circuit::bind(std::span<const double> params) const {
    Circuit out = *this;
    for (auto& g : out.gates_) {
        for (int a = 0; a < 2; ++a) {
            if (g.slots[a] < 0) continue;
            if (static_cast<std::size_t>(g.slots[a]) >= params.size()) {
                throw UnboundParameter("parameter " + std::to_string(g.slots[a]) +
                                       " missing from binding of size " +
                                       std::to_string(params.size()));
            }
            g.angles[a] = params[g.slots[a]];
            g.slots[a] = -1;
        }
    }
    return out;
}

double Circuit::total_gate_time_ns() const {
    double total = 0.0;
    for (const auto& g : gates_) total += g.duration_ns;
    return total;
}

ComplexMatrix a_gate_matrix(double theta, double phi) {
    ComplexMatrix a = ComplexMatrix::Identity(4, 4);
    const Complex e = std::polar(1.0, phi);
    a(1, 1) = std::cos(theta);
    a(1, 2) = e * std::sin(theta);
    a(2, 1) = std::conj(e) * std::sin(theta);
    a(2, 2) = -std::cos(theta);
    return a;
}

ComplexMatrix gate_matrix(const Gate& g) {
    check_bound(g);
    const double t = g.angles[0];
    const Complex i(0.0, 1.0);
    ComplexMatrix m;
    switch (g.kind) {
        case GateKind::X:
            m.resize(2, 2);
            m << 0.0, 1.0, 1.0, 0.0;
            return m;
        case GateKind::H:
            m.resize(2, 2);
            m << 1.0, 1.0, 1.0, -1.0;
            return m / std::numbers::sqrt2;
        case GateKind::RX:
            m.resize(2, 2);
            m << std::cos(t / 2), -i * std::sin(t / 2), -i * std::sin(t / 2), std::cos(t / 2);
            return m;
        case GateKind::RY:
            m.resize(2, 2);
            m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
            return m;
        case GateKind::RZ:
            m = ComplexMatrix::Zero(2, 2);
            m(0, 0) = std::polar(1.0, -t / 2);
            m(1, 1) = std::polar(1.0, t / 2);
            return m;
        case GateKind::CNOT:
            m = ComplexMatrix::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
            return m;
        case GateKind::RZZ:
            m = ComplexMatrix::Zero(4, 4);
            m(0, 0) = m(3, 3) = std::polar(1.0, -t / 2);
            m(1, 1) = m(2, 2) = std::polar(1.0, t / 2);
            return m;
        case GateKind::A:
            return a_gate_matrix(g.angles[0], g.angles[1]);
        case GateKind::Oracle:
            return g.generator->unitary(t);
    }
    throw std::logic_error("unhandled gate kind");
}

Circuit invert(const Circuit& c) {
    Circuit out(c.num_qubits());
    for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
        check_bound(*it);
        Gate g = *it;
        switch (g.kind) {
            case GateKind::RX:
            case GateKind::RY:
            case GateKind::RZ:
            case GateKind::RZZ:
            case GateKind::Oracle:
                g.angles[0] = -g.angles[0];
                break;
            // A(theta, phi) is Hermitian as well as unitary, so it is its own
            // inverse; X, H and CNOT likewise.
            default:
                break;
        }
        out.add(std::move(g));
    }
    return out;
}

ComplexMatrix circuit_to_unitary(const Circuit& c) {
    if (c.num_qubits() > 8) {
        throw TooLarge("circuit_to_unitary is limited to 8 qubits");
    }
    const Eigen::Index dim = Eigen::Index{1} << c.num_qubits();
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (const auto& g : c.gates()) {
        u = embed_gate(gate_matrix(g), g.targets, c.num_qubits()) * u;
    }
    return u;
}

void apply_circuit_inplace(const Circuit& c, StateVector& state) {
    if (state.size() != (Eigen::Index{1} << c.num_qubits())) {
        throw DimensionMismatch("state does not match circuit register");
    }
    for (const auto& g : c.gates()) {
        if (g.kind == GateKind::Oracle) {
            check_bound(g);
            state = g.generator->evolve(state, g.angles[0]);
        } else {
            apply_gate_inplace(state, gate_matrix(g), g.targets);
        }
    }
}

StateVector apply_circuit(const Circuit& c, const StateVector& state) {
    StateVector out = state;
    apply_circuit_inplace(c, out);
    return out;
}

Circuit lower_to_basis(const Circuit& c, const GateTimings& timings) {
    constexpr double pi = std::numbers::pi;
    Circuit out(c.num_qubits());
    for (const auto& g : c.gates()) {
        switch (g.kind) {
            case GateKind::RZZ: {
                check_bound(g);
                const int a = g.targets[0];
                const int b = g.targets[1];
                out.add(make_gate(GateKind::CNOT, {a, b}, {}, timings));
                out.add(make_gate(GateKind::RZ, {b}, {g.angles[0], 0.0}, timings));
                out.add(make_gate(GateKind::CNOT, {a, b}, {}, timings));
                break;
            }
            case GateKind::A: {
                check_bound(g);
                const int a = g.targets[0];
                const int b = g.targets[1];
                const double theta = g.angles[0];
                const double phi = g.angles[1];
                out.add(make_gate(GateKind::CNOT, {b, a}, {}, timings));
                out.add(make_gate(GateKind::RZ, {b}, {-phi - pi, 0.0}, timings));
                out.add(make_gate(GateKind::RY, {b}, {-theta - pi / 2, 0.0}, timings));
                out.add(make_gate(GateKind::CNOT, {a, b}, {}, timings));
                out.add(make_gate(GateKind::RY, {b}, {theta + pi / 2, 0.0}, timings));
                out.add(make_gate(GateKind::RZ, {b}, {phi + pi, 0.0}, timings));
                out.add(make_gate(GateKind::CNOT, {b, a}, {}, timings));
                break;
            }
            default:
                out.add(g);
        }
    }
    return out;
}

namespace {

std::string format_angle(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string to_text(const Circuit& c) {
    std::ostringstream os;
    for (const auto& g : c.gates()) {
        os << gate_name(g.kind) << ' ';
        for (std::size_t t = 0; t < g.targets.size(); ++t) {
            os << (t ? "," : "") << g.targets[t];
        }
        for (int a = 0; a < gate_num_angles(g.kind); ++a) {
            os << ' ';
            if (g.slots[a] >= 0) {
                os << '$' << g.slots[a];
            } else {
                os << format_angle(g.angles[a]);
            }
        }
        os << '\n';
    }
    return os.str();
}

Circuit parse_circuit(std::string_view text, int num_qubits, const GateTimings& timings) {
    Circuit c(num_qubits);
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name;
        std::string qubits;
        ls >> name >> qubits;
        const auto kind = gate_kind_from_name(name);
        const auto where = " (line " + std::to_string(line_no) + ")";
        if (!kind) {
            throw ParseError("unknown gate '" + name + "'" + where);
        }
        if (*kind == GateKind::Oracle) {
            throw ParseError("ORACLE gates carry a Hamiltonian and cannot be parsed" + where);
        }
        std::vector<int> targets;
        std::istringstream qs(qubits);
        std::string tok;
        while (std::getline(qs, tok, ',')) {
            int q = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), q);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
                throw ParseError("bad qubit list '" + qubits + "'" + where);
            }
            targets.push_back(q);
        }
        std::array<double, 2> angles{};
        std::array<int, 2> slots{-1, -1};
        for (int a = 0; a < gate_num_angles(*kind); ++a) {
            std::string p;
            if (!(ls >> p)) {
                throw ParseError("missing parameter for " + name + where);
            }
            try {
                if (p[0] == '$') {
                    slots[a] = std::stoi(p.substr(1));
                } else {
                    angles[a] = std::stod(p);
                }
            } catch (const std::exception&) {
                throw ParseError("bad parameter '" + p + "'" + where);
            }
        }
        std::string extra;
        if (ls >> extra) {
            throw ParseError("trailing token '" + extra + "'" + where);
        }
        Gate g = make_gate(*kind, std::move(targets), angles, timings);
        g.slots = slots;
        c.add(std::move(g));
    }
    return c;
}

}  // namespace rqd

namespace rqd {

namespace {

bool is_rotation(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ || k == GateKind::RZZ;
}

bool is_self_inverse(GateKind k) {
    return k == GateKind::X || k == GateKind::H || k == GateKind::CNOT || k == GateKind::A;
}

}  // namespace

Circuit simplify(const Circuit& c) {
    std::vector<std::optional<Gate>> out;
    std::vector<std::vector<std::size_t>> last(static_cast<std::size_t>(c.num_qubits()));
    constexpr double kFour_pi = 4.0 * std::numbers::pi;

    for (const auto& g : c.gates()) {
        check_bound(g);
        std::optional<std::size_t> prev;
        bool shared = !g.targets.empty();
        for (const int q : g.targets) {
            if (last[q].empty()) {
                shared = false;
                break;
            }
            if (!prev) prev = last[q].back();
            if (last[q].back() != *prev) {
                shared = false;
                break;
            }
        }
        if (shared) {
            Gate& p = *out[*prev];
            const bool same_wires = p.kind == g.kind && p.targets == g.targets;
            bool drop_prev = false;
            bool consumed = false;
            if (same_wires && is_self_inverse(g.kind) &&
                (g.kind != GateKind::A || p.angles == g.angles)) {
                drop_prev = true;
                consumed = true;
            } else if (same_wires && is_rotation(g.kind)) {
                p.angles[0] += g.angles[0];
                consumed = true;
                drop_prev = std::abs(std::remainder(p.angles[0], kFour_pi)) < 1e-14;
            }
            if (drop_prev) {
                for (const int q : p.targets) last[q].pop_back();
                out[*prev].reset();
            }
            if (consumed) continue;
        }
        for (const int q : g.targets) last[q].push_back(out.size());
        out.push_back(g);
    }

    Circuit result(c.num_qubits());
    for (auto& g : out) {
        if (g) result.add(std::move(*g));
    }
    return result;
}

}  // namespace rqd
