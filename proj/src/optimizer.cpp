#include "rqd/optimizer.hpp"

#include "rqd/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>

namespace rqd {

std::string_view fidelity_mode_name(FidelityMode mode) {
    switch (mode) {
        case FidelityMode::InverseCircuitNoisy:
            return "inverse_circuit_noisy";
        case FidelityMode::InverseCircuitNoiseless:
            return "inverse_circuit_noiseless";
        case FidelityMode::PureOverlap:
            return "pure_overlap";
    }
    return "?";
}

std::optional<FidelityMode> fidelity_mode_from_name(std::string_view name) {
    for (const auto m : {FidelityMode::InverseCircuitNoisy, FidelityMode::InverseCircuitNoiseless,
                         FidelityMode::PureOverlap}) {
        if (fidelity_mode_name(m) == name) return m;
    }
    return std::nullopt;
}

double fidelity(const ObjectiveContext& ctx, std::span<const double> params) {
    const Circuit ansatz = build_ansatz_circuit(ctx.ansatz, params);
    if (ctx.stepped_state.num_qubits() != ansatz.num_qubits()) {
        throw DimensionMismatch("stepped state and ansatz registers differ");
    }
    if (ctx.mode == FidelityMode::PureOverlap) {
        const StateVector psi = apply_circuit(ansatz, basis_state(ansatz.num_qubits(), 0));
        return ctx.stepped_state.expectation(psi);
    }
    const NoiseParams noise =
        ctx.mode == FidelityMode::InverseCircuitNoisy ? ctx.noise : NoiseParams::disabled();
    DensityMatrix rho = ctx.stepped_state;
    run_noisy_circuit_inplace(rho, schedule(invert(ansatz)), noise);
    return rho.population(0);
}

double restart_objective(const ObjectiveContext& ctx, std::span<const double> params) {
    const double infidelity = 1.0 - fidelity(ctx, params);
    return std::clamp(infidelity * infidelity, 0.0, 1.0);
}

RealVector numeric_gradient(const Objective& f, const RealVector& x, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    RealVector grad(x.size());
    RealVector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const double up = f(std::span<const double>(probe.data(), probe.size()));
        probe(i) = x(i) - h;
        const double down = f(std::span<const double>(probe.data(), probe.size()));
        probe(i) = x(i);
        grad(i) = (up - down) / (2.0 * h);
    }
    return grad;
}

OptResult minimize(const Objective& f, const RealVector& x0, const OptimizerSettings& settings) {
    OptResult result;
    long evals = 0;
    auto eval = [&](const RealVector& x) {
        ++evals;
        return f(std::span<const double>(x.data(), x.size()));
    };
    auto gradient = [&](const RealVector& x) {
        evals += 2 * x.size();
        return numeric_gradient(f, x, settings.fd_step);
    };

    RealVector x = x0;
    double fx = eval(x);
    RealVector g = gradient(x);

    struct Pair {
        RealVector s;
        RealVector y;
        double rho;
    };
    std::deque<Pair> memory;

    auto done = [&](double value, const RealVector& grad) {
        return value <= settings.tolerance ||
               (grad.size() == 0 || grad.cwiseAbs().maxCoeff() <= settings.tolerance);
    };
    auto record = [&](int it) {
        if (settings.keep_trace) {
            result.trace.push_back({it, fx, g.size() ? g.cwiseAbs().maxCoeff() : 0.0});
        }
    };

    record(0);
    int iter = 0;
    bool converged = done(fx, g);
    while (!converged && iter < settings.max_iterations) {
        // two-loop recursion
        RealVector q = g;
        std::vector<double> alpha(memory.size());
        for (std::size_t i = memory.size(); i-- > 0;) {
            alpha[i] = memory[i].rho * memory[i].s.dot(q);
            q -= alpha[i] * memory[i].y;
        }
        double gamma = 1.0;
        if (!memory.empty()) {
            const auto& last = memory.back();
            gamma = last.s.dot(last.y) / last.y.squaredNorm();
        }
        RealVector d = gamma * q;
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const double beta = memory[i].rho * memory[i].y.dot(d);
            d += (alpha[i] - beta) * memory[i].s;
        }
        d = -d;

        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            memory.clear();
            d = -g;
            slope = -g.squaredNorm();
        }

        double step = 1.0;
        if (memory.empty()) {
            // first or reset iteration: cap the trial step length at 1
            step = std::min(1.0, 1.0 / std::max(d.lpNorm<Eigen::Infinity>(), 1e-300));
        }
        RealVector x_new;
        double f_new = fx;
        bool accepted = false;
        for (int b = 0; b <= settings.max_backtracks; ++b) {
            x_new = x + step * d;
            f_new = eval(x_new);
            if (f_new <= fx + settings.armijo_c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= settings.backtrack_factor;
        }
        if (!accepted || !(f_new <= fx)) {
            result.line_search_failed = true;
            break;
        }

        ++iter;
        RealVector g_new = gradient(x_new);
        Pair p{x_new - x, g_new - g, 0.0};
        const double sy = p.s.dot(p.y);
        if (sy > 1e-300 * std::max(1.0, p.y.squaredNorm())) {
            p.rho = 1.0 / sy;
            memory.push_back(std::move(p));
            if (static_cast<int>(memory.size()) > settings.history) memory.pop_front();
        }
        x = std::move(x_new);
        fx = f_new;
        g = std::move(g_new);
        record(iter);
        converged = done(fx, g);
    }

    result.params = x;
    result.objective_value = fx;
    result.iterations = iter;
    result.converged = converged;
    result.function_evals = evals;
    return result;
}

void write_optimizer_trace_csv(std::ostream& os, int restart, const std::vector<IterationRecord>& trace,
                               bool header) {
    if (header) os << "restart,iteration,objective,grad_norm\n";
    os << std::setprecision(12);
    for (const auto& r : trace) {
        os << restart << ',' << r.iteration << ',' << r.objective << ',' << r.grad_norm << '\n';
    }
}

}  // namespace rqd
