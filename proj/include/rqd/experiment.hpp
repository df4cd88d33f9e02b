#pragma once

#include "rqd/driver.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace rqd {

/// Sweep description: every (strategy, phi, coherence time) tuple is one run.
struct ExperimentConfig {
    ModelParams model{};
    std::vector<double> phi_list = reference_phis();
    double dt = 0.04;
    double t_max = 5.0;
    // T1 = T2* values in ms; ignored when noise is off.
    std::vector<double> coherence_list{25.0};
    bool noise_enabled = true;
    double dephasing_prefactor = 1.0;
    bool idle_decoherence = true;
    std::vector<Strategy> strategies{Strategy::Exact, Strategy::Trotter, Strategy::RqdNumber,
                                     Strategy::RqdOracle};
    int steps_per_restart = 1;
    OptimizerSettings optimizer{};
    FidelityMode fidelity_mode = FidelityMode::InverseCircuitNoisy;
    CompileSettings compile{};
    double initial_perturbation = 0.0;
    std::uint64_t seed = 0;
    std::string output_dir;
    int parallelism = 1;

    int num_steps() const;
    void validate() const;
};

/// Parses a config document. Unknown keys, wrong types and out-of-range
/// values raise InvalidConfig. `base` supplies values for absent keys.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const ExperimentConfig& base = {});
nlohmann::json to_json(const ExperimentConfig& cfg);

/// "table1", "random:k:seed", or an explicit list.
std::vector<double> resolve_phi_list(const nlohmann::json& spec);

ExperimentConfig preset(std::string_view name);
/// N = 4, 5 steps, two phases.
ExperimentConfig smoke(ExperimentConfig cfg);

struct RunSpec {
    Strategy strategy = Strategy::Exact;
    double phi = 0.0;
    int phi_index = 0;
    std::optional<double> coherence_ms;  // nullopt: noiseless
};

/// Exact runs do not depend on the coherence time and appear once per phase.
std::vector<RunSpec> expand_runs(const ExperimentConfig& cfg);
RunConfig make_run_config(const ExperimentConfig& cfg, const RunSpec& spec);

std::string trajectory_file_name(const RunSpec& spec);
std::optional<RunSpec> parse_trajectory_file_name(const std::string& name);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct RunOutcome {
    RunSpec spec;
    std::string file;
    bool ok = false;
    std::string error;
    double wall_seconds = 0.0;
};

struct SweepResult {
    std::vector<RunOutcome> runs;
    double wall_seconds = 0.0;
    bool all_ok() const;
};

using ProgressFn = std::function<void(const RunOutcome&)>;

/// Runs every tuple on a bounded worker pool, writing one trajectory CSV per
/// run under `<output_dir>/trajectories` and then `manifest.json`. A failed run
/// is recorded and the others continue.
SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Same pool, arbitrary jobs; returns each job's trajectory in input order.
std::vector<Trajectory> run_parallel(const std::vector<RunConfig>& jobs, int workers);

std::vector<CircuitReport> circuit_reports(const ExperimentConfig& cfg);

struct ReportOptions {
    bool flip_imbalance_sign = false;
};

struct ReportSummary {
    int trajectories = 0;
    std::vector<std::string> files_written;
};

/// Aggregates a results directory into `<dir>/report`. Throws InvalidConfig
/// when the directory holds no readable trajectories.
ReportSummary write_report(const std::filesystem::path& dir, const ReportOptions& opts = {});

std::string code_version();

}  // namespace rqd
