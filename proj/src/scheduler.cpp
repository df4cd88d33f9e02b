#include "rqd/scheduler.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rqd {

std::size_t LayeredCircuit::num_gates() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.size();
    return n;
}

double LayeredCircuit::total_duration_ms() const {
    double ns = 0.0;
    for (const double d : layer_durations_ns) ns += d;
    return ns * 1e-6;
}

LayeredCircuit schedule(const Circuit& c) {
    LayeredCircuit lc;
    lc.num_qubits = c.num_qubits();
    std::vector<std::size_t> counter(static_cast<std::size_t>(c.num_qubits()), 0);
    for (const auto& g : c.gates()) {
        std::size_t layer = 0;
        for (const int q : g.targets) layer = std::max(layer, counter[q]);
        for (const int q : g.targets) counter[q] = layer + 1;
        if (layer >= lc.layers.size()) {
            lc.layers.resize(layer + 1);
            lc.layer_durations_ns.resize(layer + 1, 0.0);
        }
        lc.layers[layer].push_back(g);
        lc.layer_durations_ns[layer] = std::max(lc.layer_durations_ns[layer], g.duration_ns);
    }
    return lc;
}

Circuit flatten(const LayeredCircuit& lc) {
    Circuit c(lc.num_qubits);
    for (const auto& layer : lc.layers) {
        for (const auto& g : layer) c.add(g);
    }
    return c;
}

double step_duration_ms(const LayeredCircuit& lc) { return lc.total_duration_ms(); }

CircuitReport report_for(double phi, const LayeredCircuit& lc) {
    return {phi, lc.total_duration_ms(), lc.num_layers(), lc.num_gates()};
}

void write_circuit_report_csv(std::ostream& os, const std::vector<CircuitReport>& rows) {
    os << "phi,total_time_ms,layers,gates\n";
    for (const auto& r : rows) {
        os << std::setprecision(9) << r.phi << ',' << std::setprecision(6) << std::fixed
           << r.total_time_ms << std::defaultfloat << ',' << r.layers << ',' << r.gates << '\n';
    }
}

std::vector<CircuitReport> read_circuit_report_csv(std::istream& is) {
    std::vector<CircuitReport> rows;
    std::string line;
    if (!std::getline(is, line) || line != "phi,total_time_ms,layers,gates") {
        throw std::runtime_error("circuit report: unexpected header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CircuitReport r;
        char sep = 0;
        if (!(ls >> r.phi >> sep >> r.total_time_ms >> sep >> r.layers >> sep >> r.gates)) {
            throw std::runtime_error("circuit report: malformed row '" + line + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace rqd
