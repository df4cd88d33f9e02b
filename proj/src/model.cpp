#include "rqd/model.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

namespace rqd {

void ModelParams::validate() const {
    if (num_sites < 2) {
        throw InvalidModel("num_sites must be >= 2");
    }
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
        throw InvalidModel("phi must lie in [0, 2pi)");
    }
    if (!std::isfinite(hopping) || !std::isfinite(disorder) || !std::isfinite(interaction) ||
        !std::isfinite(beta)) {
        throw InvalidModel("model coefficients must be finite");
    }
}

std::vector<int> PauliString::support() const {
    std::vector<int> out;
    out.reserve(factors.size());
    for (const auto& [q, p] : factors) {
        out.push_back(q);
    }
    return out;
}

FermionHamiltonian build_aubry_andre(const ModelParams& params) {
    params.validate();
    const int n = params.num_sites;
    FermionHamiltonian fh;
    fh.num_sites = n;
    auto next = [n](int k) { return k % n + 1; };

    if (params.hopping != 0.0) {
        for (int k = 1; k <= n; ++k) {
            fh.terms.push_back({-params.hopping, {{k, true}, {next(k), false}}});
            fh.terms.push_back({-params.hopping, {{next(k), true}, {k, false}}});
        }
    }
    if (params.disorder != 0.0) {
        for (int k = 1; k <= n; ++k) {
            const double site = params.one_indexed_disorder ? k : k - 1;
            const double c =
                params.disorder * std::cos(2.0 * std::numbers::pi * params.beta * site + params.phi);
            fh.terms.push_back({c, {{k, true}, {k, false}}});
        }
    }
    if (params.interaction != 0.0) {
        for (int k = 1; k <= n; ++k) {
            fh.terms.push_back(
                {params.interaction, {{k, true}, {k, false}, {next(k), true}, {next(k), false}}});
        }
    }
    return fh;
}

namespace {

// Dense-per-qubit Pauli word with a complex weight; only used while expanding
// products of ladder operators.
struct PauliWord {
    Complex weight;
    std::string ops;  // 'I', 'X', 'Y', 'Z' per qubit
};

// sigma_a * sigma_b = phase * sigma_c
std::pair<Complex, char> multiply(char a, char b) {
    const Complex i(0.0, 1.0);
    if (a == 'I') return {1.0, b};
    if (b == 'I') return {1.0, a};
    if (a == b) return {1.0, 'I'};
    if (a == 'X' && b == 'Y') return {i, 'Z'};
    if (a == 'Y' && b == 'X') return {-i, 'Z'};
    if (a == 'Y' && b == 'Z') return {i, 'X'};
    if (a == 'Z' && b == 'Y') return {-i, 'X'};
    if (a == 'Z' && b == 'X') return {i, 'Y'};
    return {-i, 'Y'};  // X * Z
}

PauliWord multiply(const PauliWord& a, const PauliWord& b) {
    PauliWord out{a.weight * b.weight, a.ops};
    for (std::size_t q = 0; q < a.ops.size(); ++q) {
        const auto [phase, op] = multiply(a.ops[q], b.ops[q]);
        out.weight *= phase;
        out.ops[q] = op;
    }
    return out;
}

// a_k -> (X + iY)/2 Z...Z, a_k^dag -> (X - iY)/2 Z...Z, with the parity
// string on qubits preceding site k's qubit.
std::vector<PauliWord> ladder_words(const LadderOp& op, int num_qubits) {
    const int q = op.site - 1;
    std::string base(num_qubits, 'I');
    for (int j = 0; j < q; ++j) {
        base[j] = 'Z';
    }
    std::string xs = base;
    std::string ys = base;
    xs[q] = 'X';
    ys[q] = 'Y';
    const Complex y_weight = op.creation ? Complex(0.0, -0.5) : Complex(0.0, 0.5);
    return {{0.5, xs}, {y_weight, ys}};
}

}  // namespace

PauliHamiltonian jordan_wigner(const FermionHamiltonian& fh, int num_sites) {
    std::vector<std::string> order;
    std::unordered_map<std::string, Complex> sums;
    const std::string identity(num_sites, 'I');

    for (const auto& term : fh.terms) {
        for (const auto& op : term.ops) {
            if (op.site < 1 || op.site > num_sites) {
                throw IndexOutOfRange("site " + std::to_string(op.site) + " outside 1.." +
                                      std::to_string(num_sites));
            }
        }
        std::vector<PauliWord> expansion{{term.coefficient, identity}};
        for (const auto& op : term.ops) {
            std::vector<PauliWord> next;
            for (const auto& left : expansion) {
                for (const auto& right : ladder_words(op, num_sites)) {
                    next.push_back(multiply(left, right));
                }
            }
            expansion = std::move(next);
        }
        for (const auto& w : expansion) {
            auto [it, inserted] = sums.try_emplace(w.ops, 0.0);
            if (inserted) {
                order.push_back(w.ops);
            }
            it->second += w.weight;
        }
    }

    PauliHamiltonian ph;
    ph.num_qubits = num_sites;
    const double drop = tolerances().pauli_drop;
    for (const auto& key : order) {
        const Complex c = sums.at(key);
        if (std::abs(c.imag()) > 1e-12) {
            throw NotHermitian("Jordan-Wigner image has a complex coefficient on " + key);
        }
        if (key == identity) {
            ph.constant_offset += c.real();
            continue;
        }
        if (std::abs(c.real()) < drop) {
            continue;
        }
        PauliString ps;
        ps.coefficient = c.real();
        for (int q = 0; q < num_sites; ++q) {
            if (key[q] != 'I') {
                ps.factors.emplace(q, static_cast<Pauli>(key[q]));
            }
        }
        ph.strings.push_back(std::move(ps));
    }
    return ph;
}

ComplexMatrix pauli_matrix(Pauli p) {
    ComplexMatrix m(2, 2);
    switch (p) {
        case Pauli::X:
            m << 0.0, 1.0, 1.0, 0.0;
            break;
        case Pauli::Y:
            m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
            break;
        case Pauli::Z:
            m << 1.0, 0.0, 0.0, -1.0;
            break;
    }
    return m;
}

ComplexMatrix pauli_string_dense(const PauliString& ps, int num_qubits) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < num_qubits; ++q) {
        const auto it = ps.factors.find(q);
        const ComplexMatrix f =
            it == ps.factors.end() ? ComplexMatrix(ComplexMatrix::Identity(2, 2)) : pauli_matrix(it->second);
        out = kron(out, f);
    }
    return ps.coefficient * out;
}

ComplexMatrix pauli_to_dense(const PauliHamiltonian& ph) {
    if (ph.num_qubits > 12) {
        throw TooLarge("dense Hamiltonian limited to 12 qubits");
    }
    const std::uint64_t dim = std::uint64_t{1} << ph.num_qubits;
    ComplexMatrix h = ph.constant_offset *
                      ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (const auto& ps : ph.strings) {
        std::uint64_t flip = 0;
        std::uint64_t sign = 0;
        int num_y = 0;
        for (const auto& [q, p] : ps.factors) {
            if (q < 0 || q >= ph.num_qubits) {
                throw IndexOutOfRange("Pauli factor on qubit " + std::to_string(q));
            }
            const std::uint64_t m = qubit_mask(ph.num_qubits, q);
            if (p != Pauli::Z) flip |= m;
            if (p != Pauli::X) sign |= m;
            if (p == Pauli::Y) ++num_y;
        }
        static const Complex kIPow[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
        const Complex y_phase = kIPow[num_y % 4];
        for (std::uint64_t j = 0; j < dim; ++j) {
            const double parity = (std::popcount(j & sign) % 2) ? -1.0 : 1.0;
            h(static_cast<Eigen::Index>(j ^ flip), static_cast<Eigen::Index>(j)) +=
                ps.coefficient * parity * y_phase;
        }
    }
    return h;
}

ComplexMatrix number_operator(int num_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        n(j, j) = std::popcount(static_cast<std::uint64_t>(j));
    }
    return n;
}

nlohmann::json to_json(const PauliHamiltonian& ph) {
    nlohmann::json strings = nlohmann::json::array();
    for (const auto& ps : ph.strings) {
        nlohmann::json paulis = nlohmann::json::object();
        for (const auto& [q, p] : ps.factors) {
            paulis[std::to_string(q)] = std::string(1, static_cast<char>(p));
        }
        strings.push_back({{"coeff", ps.coefficient}, {"paulis", paulis}});
    }
    return {{"num_qubits", ph.num_qubits}, {"strings", strings}, {"offset", ph.constant_offset}};
}

PauliHamiltonian pauli_hamiltonian_from_json(const nlohmann::json& doc) {
    PauliHamiltonian ph;
    ph.num_qubits = doc.at("num_qubits").get<int>();
    ph.constant_offset = doc.value("offset", 0.0);
    for (const auto& s : doc.at("strings")) {
        PauliString ps;
        ps.coefficient = s.at("coeff").get<double>();
        for (const auto& [key, value] : s.at("paulis").items()) {
            const int q = std::stoi(key);
            const auto label = value.get<std::string>();
            if (q < 0 || q >= ph.num_qubits) {
                throw IndexOutOfRange("Pauli factor on qubit " + key);
            }
            if (label != "X" && label != "Y" && label != "Z") {
                throw InvalidModel("unknown Pauli label '" + label + "'");
            }
            ps.factors.emplace(q, static_cast<Pauli>(label[0]));
        }
        ph.strings.push_back(std::move(ps));
    }
    return ph;
}

const std::vector<double>& reference_phis() {
    static const std::vector<double> phis = {
        1.93146731, 5.64240529, 1.57973617, 0.08769829, 4.42879993, 1.59366522,
        1.69972758, 3.26279226, 6.09740422, 3.34460202, 3.26276960, 4.52159699,
        2.94545992, 4.71502552, 1.08255072, 4.85940981,
    };
    return phis;
}

}  // namespace rqd
