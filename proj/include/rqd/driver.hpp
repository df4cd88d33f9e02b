#pragma once

#include "rqd/ansatz.hpp"
#include "rqd/model.hpp"
#include "rqd/noise.hpp"
#include "rqd/optimizer.hpp"
#include "rqd/scheduler.hpp"
#include "rqd/trotter.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace rqd {

class ConfigMismatch : public Error {
public:
    explicit ConfigMismatch(const std::string& what) : Error("ConfigMismatch", what) {}
};

class InvalidConfig : public Error {
public:
    explicit InvalidConfig(const std::string& what) : Error("InvalidConfig", what) {}
};

enum class Strategy { Exact, Trotter, RqdNumber, RqdOracle };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

/// Compilation pipeline shared by every strategy: lower to the device basis,
/// cancel adjacent inverses, then schedule greedily.
struct CompileSettings {
    GateTimings timings{};
    TermOrder term_order = TermOrder::AsConstructed;
    // Shuffled order: seed with the disorder phase (otherwise with `shuffle_seed`).
    bool seed_order_from_phase = true;
    std::uint64_t shuffle_seed = 0;
    bool simplify = true;
};

struct RunConfig {
    ModelParams model{};
    double dt = 0.04;
    int num_steps = 125;
    NoiseParams noise{};
    Strategy strategy = Strategy::Trotter;
    int steps_per_restart = 1;
    OptimizerSettings optimizer{};
    FidelityMode fidelity_mode = FidelityMode::InverseCircuitNoisy;
    CompileSettings compile{};
    // Seeded perturbation added to the very first optimizer start point.
    double initial_perturbation = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    int num_particles() const { return model.num_sites / 2; }
};

struct StepRecord {
    double t = 0.0;
    double imbalance = 0.0;
    double fidelity_noisy = 1.0;  // <psi_exact(t)| rho |psi_exact(t)>
    double fidelity_pure = 1.0;   // noiseless ansatz (or Trotter) state vs exact
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
    long function_evals = 0;
    double step_duration_ms = 0.0;
    double cum_circuit_ms = 0.0;
};

struct Trajectory {
    Strategy strategy = Strategy::Exact;
    double phi = 0.0;
    double coherence_ms = 0.0;  // T1 (0 when noise is disabled)
    std::vector<StepRecord> records;  // t = 0 first, then one per restart/step
    std::vector<std::vector<IterationRecord>> optimizer_traces;
};

/// Everything derived from the model that a run needs.
struct ModelSetup {
    PauliHamiltonian qubit_hamiltonian;
    ComplexMatrix dense;
    std::shared_ptr<const HermitianPropagator> propagator;
    StateVector initial_state;  // charge-density wave |1010...>
    LayeredCircuit trotter_step;
    Circuit trotter_circuit;    // compiled, unscheduled
};

ModelSetup prepare_model(const RunConfig& cfg);

/// Trotter step compiled through the configured pipeline.
Circuit compile_trotter_step(const PauliHamiltonian& ph, double dt, double phi,
                             const CompileSettings& cs);

/// Charge-density-wave basis index: odd sites (qubits 0, 2, ...) occupied.
std::uint64_t charge_density_wave_index(int num_sites);

/// (N_e - N_o) / (N_e + N_o) over 1-indexed sites; 0 for an empty register.
double imbalance(const DensityMatrix& rho);
double imbalance(const StateVector& psi);

Trajectory exact_trajectory(const RunConfig& cfg);
Trajectory run_trotter(const RunConfig& cfg);
Trajectory run_rqd(const RunConfig& cfg);
Trajectory run(const RunConfig& cfg);

struct AveragedPoint {
    double t = 0.0;
    double imbalance = 0.0;
    double fidelity_noisy = 0.0;
    double fidelity_pure = 0.0;
};

/// Pointwise mean over runs sharing the same time grid.
std::vector<AveragedPoint> average_trajectories(const std::vector<Trajectory>& runs);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
Trajectory read_trajectory_csv(std::istream& is);
void write_averaged_csv(std::ostream& os, const std::vector<AveragedPoint>& avg);

}  // namespace rqd
