#include "rqd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#ifndef RQD_VERSION
#define RQD_VERSION "unknown"
#endif

namespace rqd {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return RQD_VERSION; }

namespace {

// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw InvalidConfig(where("") + " must be an object");
    }

    const json* get(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = get(key)) {
            if (!v->is_number()) throw InvalidConfig(where(key) + " must be a number");
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = get(key)) {
            if (!v->is_number_integer()) throw InvalidConfig(where(key) + " must be an integer");
            out = v->get<int>();
        }
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned()) {
                throw InvalidConfig(where(key) + " must be a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) throw InvalidConfig(where(key) + " must be true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = get(key)) {
            if (!v->is_string()) throw InvalidConfig(where(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    template <class Enum, class FromName>
    void enumeration(const std::string& key, Enum& out, FromName from_name) {
        std::string name;
        string(key, name);
        if (name.empty() && !obj_.contains(key)) return;
        const auto v = from_name(name);
        if (!v) throw InvalidConfig(where(key) + ": unknown value '" + name + "'");
        out = *v;
    }

    std::string where(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) throw InvalidConfig("unknown key " + where(key));
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string format_number(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

std::vector<double> resolve_phi_list(const json& spec) {
    if (spec.is_array()) {
        std::vector<double> out;
        for (const auto& v : spec) {
            if (!v.is_number()) throw InvalidConfig("phi_list entries must be numbers");
            out.push_back(v.get<double>());
        }
        if (out.empty()) throw InvalidConfig("phi_list is empty");
        return out;
    }
    if (!spec.is_string()) throw InvalidConfig("phi_list must be a list, \"table1\" or \"random:k:seed\"");
    const std::string s = spec.get<std::string>();
    if (s == "table1") return reference_phis();
    static const std::regex random_re(R"(random:(\d+):(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, random_re)) {
        throw InvalidConfig("phi_list string must be \"table1\" or \"random:k:seed\", got '" + s + "'");
    }
    const int k = std::stoi(m[1]);
    if (k < 1) throw InvalidConfig("phi_list random count must be >= 1");
    std::mt19937_64 rng(std::stoull(m[2]));
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<double> out(static_cast<std::size_t>(k));
    for (double& v : out) v = u(rng);
    return out;
}

int ExperimentConfig::num_steps() const {
    return static_cast<int>(std::llround(t_max / dt));
}

void ExperimentConfig::validate() const {
    model.validate();
    if (model.num_sites % 2 != 0) throw InvalidConfig("model.num_sites must be even (half filling)");
    if (model.num_sites > 10) throw InvalidConfig("model.num_sites is limited to 10");
    if (phi_list.empty()) throw InvalidConfig("phi_list is empty");
    if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
    if (!(t_max > 0.0)) throw InvalidConfig("t_max must be positive");
    if (std::abs(num_steps() * dt - t_max) > 1e-9 * std::max(1.0, t_max)) {
        throw InvalidConfig("t_max must be an integer multiple of dt");
    }
    if (num_steps() % steps_per_restart != 0) {
        throw InvalidConfig("t_max / dt must be a multiple of steps_per_restart");
    }
    if (noise_enabled) {
        if (coherence_list.empty()) throw InvalidConfig("coherence_list is empty");
        for (const double c : coherence_list) {
            if (!(c > 0.0)) throw InvalidConfig("coherence times must be positive");
        }
    }
    if (!(dephasing_prefactor >= 0.0)) throw InvalidConfig("noise.dephasing_prefactor must be >= 0");
    if (strategies.empty()) throw InvalidConfig("strategies is empty");
    if (steps_per_restart < 1) throw InvalidConfig("steps_per_restart must be >= 1");
    if (parallelism < 1) throw InvalidConfig("parallelism must be >= 1");
    if (!(initial_perturbation >= 0.0)) throw InvalidConfig("initial_perturbation must be >= 0");
    const auto& t = compile.timings;
    if (!(t.single_qubit_ns > 0.0 && t.two_qubit_ns > 0.0 && t.a_gate_ns > 0.0 && t.oracle_ns > 0.0)) {
        throw InvalidConfig("gate durations must be positive");
    }
    const auto& o = optimizer;
    if (!(o.tolerance >= 0.0) || o.max_iterations < 0 || o.history < 1 || !(o.fd_step > 0.0) ||
        !(o.armijo_c1 > 0.0 && o.armijo_c1 < 1.0) || !(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0) ||
        o.max_backtracks < 0) {
        throw InvalidConfig("invalid optimizer settings");
    }
}

ExperimentConfig parse_experiment_config(const json& doc, const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    ObjectReader top(doc, "");

    if (const json* m = top.get("model")) {
        ObjectReader r(*m, "model");
        r.integer("num_sites", cfg.model.num_sites);
        r.number("hopping", cfg.model.hopping);
        r.number("disorder", cfg.model.disorder);
        r.number("interaction", cfg.model.interaction);
        r.number("beta", cfg.model.beta);
        r.boolean("one_indexed_disorder", cfg.model.one_indexed_disorder);
        r.finish();
    }
    if (const json* p = top.get("phi_list")) cfg.phi_list = resolve_phi_list(*p);
    top.number("dt", cfg.dt);
    top.number("t_max", cfg.t_max);
    if (const json* c = top.get("coherence_list")) {
        if (!c->is_array()) throw InvalidConfig("coherence_list must be a list of numbers");
        cfg.coherence_list.clear();
        for (const auto& v : *c) {
            if (!v.is_number()) throw InvalidConfig("coherence_list entries must be numbers");
            cfg.coherence_list.push_back(v.get<double>());
        }
    }
    if (const json* n = top.get("noise")) {
        ObjectReader r(*n, "noise");
        r.boolean("enabled", cfg.noise_enabled);
        r.number("dephasing_prefactor", cfg.dephasing_prefactor);
        r.boolean("idle_decoherence", cfg.idle_decoherence);
        r.finish();
    }
    if (const json* s = top.get("strategies")) {
        if (!s->is_array()) throw InvalidConfig("strategies must be a list");
        cfg.strategies.clear();
        for (const auto& v : *s) {
            const auto st = v.is_string() ? strategy_from_name(v.get<std::string>()) : std::nullopt;
            if (!st) throw InvalidConfig("unknown strategy " + v.dump());
            if (std::find(cfg.strategies.begin(), cfg.strategies.end(), *st) != cfg.strategies.end()) {
                throw InvalidConfig("duplicate strategy " + v.dump());
            }
            cfg.strategies.push_back(*st);
        }
    }
    top.integer("steps_per_restart", cfg.steps_per_restart);
    if (const json* o = top.get("optimizer")) {
        ObjectReader r(*o, "optimizer");
        r.number("tolerance", cfg.optimizer.tolerance);
        r.integer("max_iterations", cfg.optimizer.max_iterations);
        r.integer("history", cfg.optimizer.history);
        r.number("fd_step", cfg.optimizer.fd_step);
        r.number("armijo_c1", cfg.optimizer.armijo_c1);
        r.number("backtrack_factor", cfg.optimizer.backtrack_factor);
        r.integer("max_backtracks", cfg.optimizer.max_backtracks);
        r.boolean("keep_trace", cfg.optimizer.keep_trace);
        r.finish();
    }
    top.enumeration("fidelity_mode", cfg.fidelity_mode, fidelity_mode_from_name);
    if (const json* t = top.get("timings")) {
        ObjectReader r(*t, "timings");
        r.number("single_qubit_ns", cfg.compile.timings.single_qubit_ns);
        r.number("two_qubit_ns", cfg.compile.timings.two_qubit_ns);
        r.number("a_gate_ns", cfg.compile.timings.a_gate_ns);
        r.number("oracle_ns", cfg.compile.timings.oracle_ns);
        r.finish();
    }
    if (const json* c = top.get("compile")) {
        ObjectReader r(*c, "compile");
        r.enumeration("term_order", cfg.compile.term_order, term_order_from_name);
        r.boolean("seed_order_from_phase", cfg.compile.seed_order_from_phase);
        r.unsigned_integer("shuffle_seed", cfg.compile.shuffle_seed);
        r.boolean("simplify", cfg.compile.simplify);
        r.finish();
    }
    top.number("initial_perturbation", cfg.initial_perturbation);
    top.unsigned_integer("seed", cfg.seed);
    top.string("output_dir", cfg.output_dir);
    top.integer("parallelism", cfg.parallelism);
    top.finish();

    cfg.validate();
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json strategies = json::array();
    for (const auto s : cfg.strategies) strategies.push_back(std::string(strategy_name(s)));
    const auto& o = cfg.optimizer;
    const auto& t = cfg.compile.timings;
    return {
        {"model",
         {{"num_sites", cfg.model.num_sites},
          {"hopping", cfg.model.hopping},
          {"disorder", cfg.model.disorder},
          {"interaction", cfg.model.interaction},
          {"beta", cfg.model.beta},
          {"one_indexed_disorder", cfg.model.one_indexed_disorder}}},
        {"phi_list", cfg.phi_list},
        {"dt", cfg.dt},
        {"t_max", cfg.t_max},
        {"coherence_list", cfg.coherence_list},
        {"noise",
         {{"enabled", cfg.noise_enabled},
          {"dephasing_prefactor", cfg.dephasing_prefactor},
          {"idle_decoherence", cfg.idle_decoherence}}},
        {"strategies", strategies},
        {"steps_per_restart", cfg.steps_per_restart},
        {"optimizer",
         {{"tolerance", o.tolerance},
          {"max_iterations", o.max_iterations},
          {"history", o.history},
          {"fd_step", o.fd_step},
          {"armijo_c1", o.armijo_c1},
          {"backtrack_factor", o.backtrack_factor},
          {"max_backtracks", o.max_backtracks},
          {"keep_trace", o.keep_trace}}},
        {"fidelity_mode", std::string(fidelity_mode_name(cfg.fidelity_mode))},
        {"timings",
         {{"single_qubit_ns", t.single_qubit_ns},
          {"two_qubit_ns", t.two_qubit_ns},
          {"a_gate_ns", t.a_gate_ns},
          {"oracle_ns", t.oracle_ns}}},
        {"compile",
         {{"term_order", std::string(term_order_name(cfg.compile.term_order))},
          {"seed_order_from_phase", cfg.compile.seed_order_from_phase},
          {"shuffle_seed", cfg.compile.shuffle_seed},
          {"simplify", cfg.compile.simplify}}},
        {"initial_perturbation", cfg.initial_perturbation},
        {"seed", cfg.seed},
        {"output_dir", cfg.output_dir},
        {"parallelism", cfg.parallelism},
    };
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig cfg;
    if (name == "paper-fig2") {
        cfg.coherence_list = {25.0};
        cfg.strategies = {Strategy::Trotter, Strategy::RqdNumber, Strategy::RqdOracle, Strategy::Exact};
        return cfg;
    }
    if (name == "paper-fig3") {
        cfg.coherence_list = {0.25, 2.5, 25.0, 250.0, 2500.0};
        cfg.strategies = {Strategy::Trotter, Strategy::RqdNumber, Strategy::RqdOracle};
        return cfg;
    }
    throw InvalidConfig("unknown preset '" + std::string(name) + "' (paper-fig2, paper-fig3)");
}

ExperimentConfig smoke(ExperimentConfig cfg) {
    cfg.model.num_sites = 4;
    cfg.t_max = 5 * cfg.dt;
    cfg.steps_per_restart = 1;
    if (cfg.phi_list.size() > 2) cfg.phi_list.resize(2);
    while (cfg.phi_list.size() < 2) cfg.phi_list.push_back(reference_phis()[cfg.phi_list.size()]);
    return cfg;
}

std::vector<RunSpec> expand_runs(const ExperimentConfig& cfg) {
    std::vector<RunSpec> out;
    for (const auto s : cfg.strategies) {
        for (std::size_t i = 0; i < cfg.phi_list.size(); ++i) {
            RunSpec spec{s, cfg.phi_list[i], static_cast<int>(i), std::nullopt};
            if (s == Strategy::Exact || !cfg.noise_enabled) {
                out.push_back(spec);
                continue;
            }
            for (const double c : cfg.coherence_list) {
                spec.coherence_ms = c;
                out.push_back(spec);
            }
        }
    }
    return out;
}

RunConfig make_run_config(const ExperimentConfig& cfg, const RunSpec& spec) {
    RunConfig rc;
    rc.model = cfg.model;
    rc.model.phi = spec.phi;
    rc.dt = cfg.dt;
    rc.num_steps = cfg.num_steps();
    if (spec.coherence_ms) {
        rc.noise.t1_ms = *spec.coherence_ms;
        rc.noise.t2s_ms = *spec.coherence_ms;
        rc.noise.enabled = true;
    } else {
        rc.noise.enabled = false;
    }
    rc.noise.dephasing_prefactor = cfg.dephasing_prefactor;
    rc.noise.idle_decoherence = cfg.idle_decoherence;
    rc.strategy = spec.strategy;
    rc.steps_per_restart = spec.strategy == Strategy::RqdNumber || spec.strategy == Strategy::RqdOracle
                               ? cfg.steps_per_restart
                               : 1;
    rc.optimizer = cfg.optimizer;
    rc.fidelity_mode = cfg.fidelity_mode;
    rc.compile = cfg.compile;
    rc.initial_perturbation = cfg.initial_perturbation;
    rc.seed = cfg.seed;
    return rc;
}

std::string trajectory_file_name(const RunSpec& spec) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%02d", spec.phi_index);
    const std::string coh =
        spec.coherence_ms ? format_number("%.6g", *spec.coherence_ms) + "ms" : std::string("noiseless");
    return "traj_" + std::string(strategy_name(spec.strategy)) + "_phi" + idx + "_" +
           format_number("%.8f", spec.phi) + "_T1_" + coh + ".csv";
}

std::optional<RunSpec> parse_trajectory_file_name(const std::string& name) {
    static const std::regex re(
        R"(traj_(exact|trotter|rqd_number|rqd_oracle)_phi(\d+)_(-?[0-9.]+)_T1_(noiseless|[0-9.eE+-]+ms)\.csv)");
    std::smatch m;
    if (!std::regex_match(name, m, re)) return std::nullopt;
    RunSpec spec;
    spec.strategy = *strategy_from_name(m[1].str());
    spec.phi_index = std::stoi(m[2]);
    spec.phi = std::stod(m[3]);
    const std::string coh = m[4];
    if (coh != "noiseless") spec.coherence_ms = std::stod(coh.substr(0, coh.size() - 2));
    return spec;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << contents;
        os.flush();
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool SweepResult::all_ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.ok; });
}

namespace {

// Bounded pool: `workers` threads pull job indices from a shared counter.
void for_each_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
    for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json outcome_json(const RunOutcome& r) {
    json j = {{"strategy", std::string(strategy_name(r.spec.strategy))},
              {"phi", r.spec.phi},
              {"phi_index", r.spec.phi_index},
              {"coherence_ms", r.spec.coherence_ms ? json(*r.spec.coherence_ms) : json(nullptr)},
              {"file", r.file},
              {"ok", r.ok},
              {"wall_seconds", r.wall_seconds}};
    if (!r.ok) j["error"] = r.error;
    return j;
}

}  // namespace

std::vector<Trajectory> run_parallel(const std::vector<RunConfig>& jobs, int workers) {
    std::vector<Trajectory> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    for_each_parallel(jobs.size(), workers, [&](std::size_t i) {
        try {
            out[i] = run(jobs[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<CircuitReport> circuit_reports(const ExperimentConfig& cfg) {
    std::vector<CircuitReport> rows;
    for (const double phi : cfg.phi_list) {
        ModelParams mp = cfg.model;
        mp.phi = phi;
        const PauliHamiltonian ph = jordan_wigner(build_aubry_andre(mp), mp.num_sites);
        rows.push_back(report_for(phi, schedule(compile_trotter_step(ph, cfg.dt, phi, cfg.compile))));
    }
    return rows;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    if (cfg.output_dir.empty()) throw InvalidConfig("output_dir is not set");
    const fs::path root(cfg.output_dir);
    fs::create_directories(root / "trajectories");

    std::ostringstream circuits;
    write_circuit_report_csv(circuits, circuit_reports(cfg));
    write_file_atomic(root / "circuits.csv", circuits.str());

    const auto t0 = std::chrono::steady_clock::now();
    SweepResult result;
    const std::vector<RunSpec> specs = expand_runs(cfg);
    result.runs.resize(specs.size());
    std::mutex mu;
    for_each_parallel(specs.size(), cfg.parallelism, [&](std::size_t i) {
        RunOutcome out;
        out.spec = specs[i];
        out.file = "trajectories/" + trajectory_file_name(specs[i]);
        const auto start = std::chrono::steady_clock::now();
        try {
            const Trajectory tr = run(make_run_config(cfg, specs[i]));
            std::ostringstream os;
            write_trajectory_csv(os, tr);
            write_file_atomic(root / out.file, os.str());
            if (cfg.optimizer.keep_trace && !tr.optimizer_traces.empty()) {
                std::ostringstream ts;
                for (std::size_t k = 0; k < tr.optimizer_traces.size(); ++k) {
                    write_optimizer_trace_csv(ts, static_cast<int>(k + 1), tr.optimizer_traces[k], k == 0);
                }
                const std::string stem = fs::path(out.file).stem().string();
                write_file_atomic(root / "optimizer" / (stem + "_trace.csv"), ts.str());
            }
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.wall_seconds = seconds_since(start);
        std::lock_guard lock(mu);
        result.runs[i] = out;
        if (progress) progress(out);
    });
    result.wall_seconds = seconds_since(t0);

    json runs = json::array();
    for (const auto& r : result.runs) runs.push_back(outcome_json(r));
    const json manifest = {{"code_version", code_version()},
                           {"config", to_json(cfg)},
                           {"num_steps", cfg.num_steps()},
                           {"wall_seconds", result.wall_seconds},
                           {"runs", runs}};
    write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

namespace {

struct LoadedRun {
    RunSpec spec;
    Trajectory trajectory;
};

std::string group_label(Strategy s, const std::optional<double>& coh) {
    return std::string(strategy_name(s)) + "_T1_" +
           (coh ? format_number("%.6g", *coh) + "ms" : std::string("noiseless"));
}

}  // namespace

ReportSummary write_report(const fs::path& dir, const ReportOptions& opts) {
    if (!fs::is_directory(dir)) throw InvalidConfig("not a directory: " + dir.string());
    const fs::path traj_dir = fs::is_directory(dir / "trajectories") ? dir / "trajectories" : dir;

    std::vector<LoadedRun> loaded;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(traj_dir)) {
        if (entry.is_regular_file()) paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        const auto spec = parse_trajectory_file_name(p.filename().string());
        if (!spec) continue;
        std::ifstream is(p);
        LoadedRun run{*spec, {}};
        try {
            run.trajectory = read_trajectory_csv(is);
        } catch (const std::exception& e) {
            throw InvalidConfig(p.filename().string() + ": " + e.what());
        }
        run.trajectory.strategy = spec->strategy;
        run.trajectory.phi = spec->phi;
        run.trajectory.coherence_ms = spec->coherence_ms.value_or(0.0);
        loaded.push_back(std::move(run));
    }
    if (loaded.empty()) throw InvalidConfig("no trajectory CSVs found in " + dir.string());

    if (opts.flip_imbalance_sign) {
        for (auto& r : loaded) {
            for (auto& rec : r.trajectory.records) rec.imbalance = -rec.imbalance;
        }
    }

    using Key = std::pair<int, double>;  // strategy, coherence (-1 for noiseless)
    std::map<Key, std::vector<const LoadedRun*>> groups;
    for (const auto& r : loaded) {
        groups[{static_cast<int>(r.spec.strategy), r.spec.coherence_ms.value_or(-1.0)}].push_back(&r);
    }

    const fs::path out_dir = dir / "report";
    ReportSummary summary;
    summary.trajectories = static_cast<int>(loaded.size());
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file_atomic(out_dir / name, text);
        summary.files_written.push_back(name);
    };

    std::ostringstream fig3;
    fig3 << "strategy,coherence_ms,t,fidelity_noisy,fidelity_pure,imbalance,num_phi\n" << std::setprecision(12);
    for (auto& [key, runs] : groups) {
        std::sort(runs.begin(), runs.end(),
                  [](const LoadedRun* a, const LoadedRun* b) { return a->spec.phi_index < b->spec.phi_index; });
        const Strategy s = runs.front()->spec.strategy;
        const auto coh = runs.front()->spec.coherence_ms;
        const std::string label = group_label(s, coh);

        std::vector<Trajectory> trs;
        for (const auto* r : runs) trs.push_back(r->trajectory);
        std::vector<AveragedPoint> avg;
        try {
            avg = average_trajectories(trs);
        } catch (const ConfigMismatch& e) {
            throw InvalidConfig(label + ": " + e.what());
        }

        std::ostringstream avg_os;
        write_averaged_csv(avg_os, avg);
        emit("average_" + label + ".csv", avg_os.str());

        std::ostringstream fig2;
        fig2 << "t" << std::setprecision(12);
        for (const auto* r : runs) fig2 << ",phi_" << format_number("%.8f", r->spec.phi);
        fig2 << ",mean\n";
        for (std::size_t i = 0; i < avg.size(); ++i) {
            fig2 << avg[i].t;
            for (const auto* r : runs) fig2 << ',' << r->trajectory.records[i].imbalance;
            fig2 << ',' << avg[i].imbalance << '\n';
        }
        emit("fig2_imbalance_" + label + ".csv", fig2.str());

        const AveragedPoint& last = avg.back();
        fig3 << strategy_name(s) << ',' << (coh ? format_number("%.10g", *coh) : std::string("inf")) << ','
             << last.t << ',' << last.fidelity_noisy << ',' << last.fidelity_pure << ',' << last.imbalance << ','
             << runs.size() << '\n';
    }
    emit("fig3_fidelity_vs_coherence.csv", fig3.str());

    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream is(manifest);
        json doc;
        try {
            doc = json::parse(is);
        } catch (const json::exception& e) {
            throw InvalidConfig("manifest.json: " + std::string(e.what()));
        }
        if (!doc.contains("config")) throw InvalidConfig("manifest.json has no config");
        std::ostringstream table;
        write_circuit_report_csv(table, circuit_reports(parse_experiment_config(doc["config"])));
        emit("table1_circuits.csv", table.str());
    }
    return summary;
}

}  // namespace rqd
