#include "rqd/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw rqd::InvalidConfig("cannot open " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::exception& e) {
        throw rqd::InvalidConfig(path + ": " + e.what());
    }
    // a manifest echoes the config it was produced from
    if (doc.is_object() && doc.contains("config") && doc.contains("runs")) return doc["config"];
    return doc;
}

rqd::ExperimentConfig resolve_config(const std::string& path, const std::string& preset_name, bool smoke_run) {
    rqd::ExperimentConfig cfg = preset_name.empty() ? rqd::ExperimentConfig{} : rqd::preset(preset_name);
    if (!path.empty()) cfg = rqd::parse_experiment_config(load_json(path), cfg);
    if (path.empty() && preset_name.empty()) throw rqd::InvalidConfig("a config file or --preset is required");
    if (smoke_run) cfg = rqd::smoke(cfg);
    if (cfg.output_dir.empty()) {
        if (const char* env = std::getenv("RQD_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    }
    cfg.validate();
    return cfg;
}

int cmd_run(const std::string& path, const std::string& preset_name, bool smoke_run, int workers,
            bool dump_config) {
    rqd::ExperimentConfig cfg;
    try {
        cfg = resolve_config(path, preset_name, smoke_run);
        if (workers > 0) cfg.parallelism = workers;
        if (dump_config) {
            std::cout << rqd::to_json(cfg).dump(2) << '\n';
            return 0;
        }
        if (cfg.output_dir.empty()) throw rqd::InvalidConfig("output_dir is not set (config or RQD_OUTPUT_DIR)");
    } catch (const std::exception& e) {
        std::cerr << "rqd: config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        const auto runs = rqd::expand_runs(cfg);
        std::cerr << "rqd: " << runs.size() << " runs, " << cfg.parallelism << " worker(s), output "
                  << cfg.output_dir << '\n';
        std::size_t done = 0;
        const auto result = rqd::run_sweep(cfg, [&](const rqd::RunOutcome& r) {
            ++done;
            std::cerr << "[" << done << "/" << runs.size() << "] " << r.file << (r.ok ? " ok " : " FAILED ")
                      << r.wall_seconds << " s" << (r.ok ? "" : ": " + r.error) << '\n';
        });
        if (!result.all_ok()) {
            std::cerr << "rqd: some runs failed; see manifest.json\n";
            return kRuntimeError;
        }
    } catch (const std::exception& e) {
        std::cerr << "rqd: runtime error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}

int cmd_report(const std::string& dir, bool flip) {
    try {
        const auto summary = rqd::write_report(dir, {flip});
        std::cerr << "rqd: aggregated " << summary.trajectories << " trajectories\n";
        for (const auto& f : summary.files_written) std::cout << dir << "/report/" << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << "rqd: report error: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}

int cmd_circuits(const std::string& path, const std::string& preset_name) {
    try {
        const auto cfg = resolve_config(path, preset_name, false);
        rqd::write_circuit_report_csv(std::cout, rqd::circuit_reports(cfg));
    } catch (const std::exception& e) {
        std::cerr << "rqd: config error: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Restarted quantum dynamics simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rqd::code_version());

    std::string config_path;
    std::string preset_name;
    bool smoke_run = false;
    int workers = 0;
    bool dump_config = false;
    auto* run = app.add_subcommand("run", "run every (strategy, phi, coherence) tuple of a config");
    run->add_option("config", config_path, "JSON config (or a manifest.json to re-run)");
    run->add_option("--preset", preset_name, "base settings")->check(CLI::IsMember({"paper-fig2", "paper-fig3"}));
    run->add_flag("--smoke", smoke_run, "N = 4, 5 steps, 2 phases");
    run->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--dump-config", dump_config, "print the resolved config and exit");

    std::string results_dir;
    bool flip = false;
    auto* report = app.add_subcommand("report", "aggregate a results directory");
    report->add_option("dir", results_dir, "results directory")->required();
    report->add_flag("--flip-imbalance-sign", flip, "report -I(t)");

    std::string circuits_config;
    std::string circuits_preset;
    auto* circuits = app.add_subcommand("circuits", "compile and schedule the Trotter step for each phase");
    circuits->add_option("config", circuits_config, "JSON config");
    circuits->add_option("--preset", circuits_preset, "base settings")
        ->check(CLI::IsMember({"paper-fig2", "paper-fig3"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    if (*run) return cmd_run(config_path, preset_name, smoke_run, workers, dump_config);
    if (*report) return cmd_report(results_dir, flip);
    return cmd_circuits(circuits_config, circuits_preset);
}
