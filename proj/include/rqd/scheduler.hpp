#pragma once

#include "rqd/circuit.hpp"

#include <iosfwd>
#include <vector>

namespace rqd {

/// Circuit partitioned into layers of gates on disjoint qubits.
struct LayeredCircuit {
    int num_qubits = 0;
    std::vector<std::vector<Gate>> layers;
    std::vector<double> layer_durations_ns;

    std::size_t num_layers() const { return layers.size(); }
    std::size_t num_gates() const;
    double total_duration_ms() const;
};

/// Greedy layering: each gate goes to the maximum of its qubits' current
/// layer counters, which are then all set to that layer plus one. A layer
/// lasts as long as its slowest gate.
LayeredCircuit schedule(const Circuit& c);

/// Layers concatenated back into a single gate list.
Circuit flatten(const LayeredCircuit& lc);

double step_duration_ms(const LayeredCircuit& lc);

/// One row of the per-circuit timing report.
struct CircuitReport {
    double phi = 0.0;
    double total_time_ms = 0.0;
    std::size_t layers = 0;
    std::size_t gates = 0;
};

CircuitReport report_for(double phi, const LayeredCircuit& lc);
void write_circuit_report_csv(std::ostream& os, const std::vector<CircuitReport>& rows);
std::vector<CircuitReport> read_circuit_report_csv(std::istream& is);

}  // namespace rqd
