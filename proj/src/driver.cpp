#include "rqd/driver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace rqd {

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Exact:
            return "exact";
        case Strategy::Trotter:
            return "trotter";
        case Strategy::RqdNumber:
            return "rqd_number";
        case Strategy::RqdOracle:
            return "rqd_oracle";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
    for (const auto s : {Strategy::Exact, Strategy::Trotter, Strategy::RqdNumber, Strategy::RqdOracle}) {
        if (strategy_name(s) == name) return s;
    }
    return std::nullopt;
}

void RunConfig::validate() const {
    model.validate();
    if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
    if (num_steps < 1) throw InvalidConfig("num_steps must be >= 1");
    if (steps_per_restart < 1) throw InvalidConfig("steps_per_restart must be >= 1");
    if (num_steps % steps_per_restart != 0) {
        throw InvalidConfig("num_steps must be a multiple of steps_per_restart");
    }
    if (model.num_sites % 2 != 0) {
        throw InvalidConfig("half filling needs an even number of sites");
    }
    noise.validate();
    if (optimizer.max_iterations < 0 || optimizer.history < 1 || !(optimizer.fd_step > 0.0)) {
        throw InvalidConfig("invalid optimizer settings");
    }
}

std::uint64_t charge_density_wave_index(int num_sites) {
    std::uint64_t idx = 0;
    for (int q = 0; q < num_sites; q += 2) idx |= qubit_mask(num_sites, q);
    return idx;
}

Circuit compile_trotter_step(const PauliHamiltonian& ph, double dt, double phi,
                             const CompileSettings& cs) {
    TrotterConfig tc;
    tc.dt = dt;
    tc.order = cs.term_order;
    tc.shuffle_seed = cs.seed_order_from_phase ? seed_from_phase(phi) : cs.shuffle_seed;
    tc.timings = cs.timings;
    Circuit c = lower_to_basis(trotter_step(ph, tc), cs.timings);
    return cs.simplify ? simplify(c) : c;
}

ModelSetup prepare_model(const RunConfig& cfg) {
    cfg.validate();
    const int n = cfg.model.num_sites;
    if (n > 10) throw TooLarge("dense simulation limited to 10 sites");
    ModelSetup m;
    m.qubit_hamiltonian = jordan_wigner(build_aubry_andre(cfg.model), n);
    m.dense = pauli_to_dense(m.qubit_hamiltonian);
    m.propagator = std::make_shared<const HermitianPropagator>(m.dense);
    m.initial_state = basis_state(n, charge_density_wave_index(n));
    m.trotter_circuit = compile_trotter_step(m.qubit_hamiltonian, cfg.dt, cfg.model.phi, cfg.compile);
    m.trotter_step = schedule(m.trotter_circuit);
    return m;
}

namespace {

double imbalance_from_occupations(const std::vector<double>& occ) {
    double even = 0.0;
    double odd = 0.0;
    for (std::size_t q = 0; q < occ.size(); ++q) {
        // qubit q holds site q + 1
        ((q + 1) % 2 == 0 ? even : odd) += occ[q];
    }
    const double total = even + odd;
    return total < 1e-12 ? 0.0 : (even - odd) / total;
}

Trajectory start(const RunConfig& cfg) {
    Trajectory tr;
    tr.strategy = cfg.strategy;
    tr.phi = cfg.model.phi;
    tr.coherence_ms = cfg.noise.enabled ? cfg.noise.t1_ms : 0.0;
    return tr;
}

}  // namespace

double imbalance(const DensityMatrix& rho) {
    std::vector<double> occ(static_cast<std::size_t>(rho.num_qubits()));
    for (int q = 0; q < rho.num_qubits(); ++q) {
        const int one[] = {q};
        occ[q] = expectation_diagonal(rho, one);
    }
    return imbalance_from_occupations(occ);
}

double imbalance(const StateVector& psi) {
    const int n = num_qubits_for_dim(psi.size());
    std::vector<double> occ(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi(i));
        for (int q = 0; q < n; ++q) {
            if (static_cast<std::uint64_t>(i) & qubit_mask(n, q)) occ[q] += p;
        }
    }
    return imbalance_from_occupations(occ);
}

Trajectory exact_trajectory(const RunConfig& cfg) {
    if (cfg.model.num_sites > 10) throw TooLarge("exact trajectory limited to 10 sites");
    const ModelSetup m = prepare_model(cfg);
    Trajectory tr = start(cfg);
    for (int k = 0; k <= cfg.num_steps; ++k) {
        const double t = k * cfg.dt;
        StepRecord r;
        r.t = t;
        r.imbalance = imbalance(m.propagator->evolve(m.initial_state, t));
        tr.records.push_back(r);
    }
    return tr;
}

Trajectory run_trotter(const RunConfig& cfg) {
    const ModelSetup m = prepare_model(cfg);
    Trajectory tr = start(cfg);
    DensityMatrix rho = DensityMatrix::pure(m.initial_state);
    StateVector ideal = m.initial_state;
    const double step_ms = m.trotter_step.total_duration_ms();

    StepRecord r0;
    r0.imbalance = imbalance(rho);
    tr.records.push_back(r0);
    for (int k = 1; k <= cfg.num_steps; ++k) {
        run_noisy_circuit_inplace(rho, m.trotter_step, cfg.noise);
        apply_circuit_inplace(m.trotter_circuit, ideal);
        const double t = k * cfg.dt;
        const StateVector exact = m.propagator->evolve(m.initial_state, t);
        StepRecord r;
        r.t = t;
        r.imbalance = imbalance(rho);
        r.fidelity_noisy = rho.expectation(exact);
        r.fidelity_pure = pure_state_overlap_sq(exact, ideal);
        r.step_duration_ms = step_ms;
        r.cum_circuit_ms = k * step_ms;
        tr.records.push_back(r);
    }
    return tr;
}

Trajectory run_rqd(const RunConfig& cfg) {
    if (cfg.strategy != Strategy::RqdNumber && cfg.strategy != Strategy::RqdOracle) {
        throw InvalidConfig("run_rqd needs an rqd_number or rqd_oracle strategy");
    }
    const ModelSetup m = prepare_model(cfg);
    const int n = cfg.model.num_sites;
    const AnsatzSpec spec = cfg.strategy == Strategy::RqdOracle
                                ? oracle_spec(m.dense, cfg.num_particles(), cfg.compile.timings)
                                : number_conserving_spec(n, cfg.num_particles(), cfg.compile.timings);

    RealVector theta = RealVector::Zero(spec.num_parameters);
    if (cfg.initial_perturbation > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(-cfg.initial_perturbation, cfg.initial_perturbation);
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = u(rng);
    }

    const StateVector zero = basis_state(n, 0);
    auto prepare = [&](const RealVector& params, LayeredCircuit* scheduled) {
        const std::span<const double> p(params.data(), params.size());
        // A gates are applied as 4x4 matrices with their calibrated duration.
        LayeredCircuit lc = schedule(build_ansatz_circuit(spec, p));
        DensityMatrix rho = DensityMatrix::pure(zero);
        run_noisy_circuit_inplace(rho, lc, cfg.noise);
        if (scheduled) *scheduled = std::move(lc);
        return rho;
    };

    LayeredCircuit prep_schedule;
    DensityMatrix prepared = prepare(theta, &prep_schedule);
    const double ansatz_ms = prep_schedule.total_duration_ms();
    const double step_ms = m.trotter_step.total_duration_ms();

    Trajectory tr = start(cfg);
    auto observe = [&](double t, const DensityMatrix& rho, const RealVector& params) {
        const StateVector exact = m.propagator->evolve(m.initial_state, t);
        StepRecord r;
        r.t = t;
        r.imbalance = imbalance(rho);
        r.fidelity_noisy = rho.expectation(exact);
        r.fidelity_pure =
            pure_state_overlap_sq(exact, ansatz_state(spec, {params.data(), static_cast<std::size_t>(params.size())}));
        return r;
    };
    tr.records.push_back(observe(0.0, prepared, theta));

    OptimizerSettings opt = cfg.optimizer;
    const int restarts = cfg.num_steps / cfg.steps_per_restart;
    double cumulative = 0.0;
    for (int k = 1; k <= restarts; ++k) {
        ObjectiveContext ctx{prepared, spec, cfg.noise, cfg.fidelity_mode};
        for (int s = 0; s < cfg.steps_per_restart; ++s) {
            run_noisy_circuit_inplace(ctx.stepped_state, m.trotter_step, cfg.noise);
        }
        const Objective f = [&ctx](std::span<const double> p) { return restart_objective(ctx, p); };
        OptResult res = minimize(f, theta, opt);
        theta = res.params;

        prepared = prepare(theta, nullptr);
        const double circuit_ms = 2.0 * ansatz_ms + cfg.steps_per_restart * step_ms;
        cumulative += circuit_ms;

        StepRecord r = observe(k * cfg.steps_per_restart * cfg.dt, prepared, theta);
        r.objective = res.objective_value;
        r.iterations = res.iterations;
        r.converged = res.converged;
        r.function_evals = res.function_evals;
        r.step_duration_ms = circuit_ms;
        r.cum_circuit_ms = cumulative;
        tr.records.push_back(r);
        if (opt.keep_trace) tr.optimizer_traces.push_back(std::move(res.trace));
    }
    return tr;
}

Trajectory run(const RunConfig& cfg) {
    switch (cfg.strategy) {
        case Strategy::Exact:
            return exact_trajectory(cfg);
        case Strategy::Trotter:
            return run_trotter(cfg);
        case Strategy::RqdNumber:
        case Strategy::RqdOracle:
            return run_rqd(cfg);
    }
    throw InvalidConfig("unknown strategy");
}

std::vector<AveragedPoint> average_trajectories(const std::vector<Trajectory>& runs) {
    if (runs.empty()) throw ConfigMismatch("no trajectories to average");
    const auto& ref = runs.front().records;
    std::vector<AveragedPoint> avg(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) avg[i].t = ref[i].t;
    for (const auto& tr : runs) {
        if (tr.records.size() != ref.size()) {
            throw ConfigMismatch("trajectories have different numbers of steps");
        }
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (std::abs(tr.records[i].t - ref[i].t) > 1e-9) {
                throw ConfigMismatch("trajectories use different time grids");
            }
            avg[i].imbalance += tr.records[i].imbalance;
            avg[i].fidelity_noisy += tr.records[i].fidelity_noisy;
            avg[i].fidelity_pure += tr.records[i].fidelity_pure;
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (auto& p : avg) {
        p.imbalance *= inv;
        p.fidelity_noisy *= inv;
        p.fidelity_pure *= inv;
    }
    return avg;
}

namespace {

constexpr const char* kTrajectoryHeader =
    "t,imbalance,fidelity_noisy,fidelity_pure,objective,iterations,converged,cum_circuit_ms";

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << kTrajectoryHeader << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : tr.records) {
        os << r.t << ',' << r.imbalance << ',' << r.fidelity_noisy << ',' << r.fidelity_pure << ','
           << r.objective << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
           << r.cum_circuit_ms << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kTrajectoryHeader) {
        throw std::runtime_error("trajectory CSV: unexpected header");
    }
    Trajectory tr;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        StepRecord r;
        int converged = 0;
        char c1, c2, c3, c4, c5, c6, c7;
        if (!(ls >> r.t >> c1 >> r.imbalance >> c2 >> r.fidelity_noisy >> c3 >> r.fidelity_pure >> c4 >>
              r.objective >> c5 >> r.iterations >> c6 >> converged >> c7 >> r.cum_circuit_ms)) {
            throw std::runtime_error("trajectory CSV: malformed row '" + line + "'");
        }
        r.converged = converged != 0;
        tr.records.push_back(r);
    }
    if (tr.records.empty()) throw std::runtime_error("trajectory CSV: no rows");
    return tr;
}

void write_averaged_csv(std::ostream& os, const std::vector<AveragedPoint>& avg) {
    os << "t,imbalance,fidelity_noisy,fidelity_pure\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& p : avg) {
        os << p.t << ',' << p.imbalance << ',' << p.fidelity_noisy << ',' << p.fidelity_pure << '\n';
    }
}

}  // namespace rqd
