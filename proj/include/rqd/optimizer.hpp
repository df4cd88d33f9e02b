#pragma once

#include "rqd/ansatz.hpp"
#include "rqd/noise.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rqd {

enum class FidelityMode {
    InverseCircuitNoisy,      // C(theta)^dag runs on the noisy device after the step
    InverseCircuitNoiseless,  // same circuit, noise-free inverse segment
    PureOverlap,              // <psi(theta)| rho |psi(theta)>
};

std::string_view fidelity_mode_name(FidelityMode mode);
std::optional<FidelityMode> fidelity_mode_from_name(std::string_view name);

/// Frozen inputs of one restart's optimization. Evaluation is read-only, so
/// one context may be shared by concurrent evaluations.
struct ObjectiveContext {
    DensityMatrix stepped_state;
    AnsatzSpec ansatz;
    NoiseParams noise;
    FidelityMode mode = FidelityMode::InverseCircuitNoisy;
};

/// Fidelity between the stepped state and the ansatz state at `params`,
/// estimated as the all-zeros population after the inverse ansatz (or the
/// direct overlap in PureOverlap mode).
double fidelity(const ObjectiveContext& ctx, std::span<const double> params);

/// (1 - F)^2, clamped to [0, 1].
double restart_objective(const ObjectiveContext& ctx, std::span<const double> params);

using Objective = std::function<double(std::span<const double>)>;

/// Central differences, 2 * dim evaluations.
RealVector numeric_gradient(const Objective& f, const RealVector& x, double h);

struct OptimizerSettings {
    double tolerance = 1e-12;
    int max_iterations = 80;
    int history = 10;
    double fd_step = 1e-6;
    double armijo_c1 = 1e-4;
    double backtrack_factor = 0.5;
    int max_backtracks = 40;
    bool keep_trace = false;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
};

struct OptResult {
    RealVector params;
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    long function_evals = 0;
    std::vector<IterationRecord> trace;
};

/// L-BFGS with backtracking-Armijo line search and finite-difference
/// gradients. Stops when the objective or the gradient infinity-norm reaches
/// `tolerance`, or after `max_iterations`. A failed line search ends the run
/// with the best point so far and converged = false.
OptResult minimize(const Objective& f, const RealVector& x0, const OptimizerSettings& settings = {});

void write_optimizer_trace_csv(std::ostream& os, int restart, const std::vector<IterationRecord>& trace,
                               bool header);

}  // namespace rqd
