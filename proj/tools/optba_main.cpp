#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "optba/config.hpp"
#include "optba/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Manifest {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool overwrite = false;
    int workers = 1;
    int verbosity = 0;
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cout << "warning: " << w << "\n";
    }
}

void check_outputs_writable(const Manifest& manifest, const std::vector<fs::path>& targets) {
    fs::create_directories(manifest.out_dir);
    if (manifest.overwrite) return;
    for (const auto& target : targets) {
        if (fs::exists(target)) {
            throw optba::IoError("refusing to overwrite " + target.string() +
                                 " (pass --overwrite)");
        }
    }
}

int cmd_run(const Manifest& manifest) {
    optba::FullConfig config = optba::load_config_file(manifest.config_path);
    if (manifest.seed) config.ba.seed = *manifest.seed;
    print_warnings(optba::validate(config.ba));
    try {
        optba::validate_objective_spec(config.objective, config.space);
    } catch (const optba::ConfigError&) {
        throw;
    } catch (const optba::Error& ex) {
        throw optba::ConfigError(std::string("objective: ") + ex.what());
    }

    const fs::path trace_path = fs::path(manifest.out_dir) / "run_trace.json";
    const fs::path csv_path = fs::path(manifest.out_dir) / "convergence.csv";
    check_outputs_writable(manifest, {trace_path, csv_path});

    auto dispatcher = optba::make_dispatcher(manifest.workers);
    auto built = optba::make_evaluator(config.objective, config.space);
    optba::RunTrace trace;
    try {
        trace = optba::run(optba::RunInputs{config.space, config.ba, config.objective,
                                            *built.evaluator, built.memo, *dispatcher,
                                            manifest.verbosity > 0});
    } catch (const optba::RunAborted& aborted) {
        optba::write_text_file(trace_path, optba::trace_json_string(aborted.partial_trace()));
        optba::write_text_file(csv_path, optba::convergence_csv(aborted.partial_trace()));
        std::cerr << "objective failure: " << aborted.what() << "\n";
        return 2;
    }
    optba::write_text_file(trace_path, optba::trace_json_string(trace));
    optba::write_text_file(csv_path, optba::convergence_csv(trace));
    std::cout << optba::best_line(trace.best, config.space) << "\n";
    return 0;
}

int cmd_bench(const Manifest& manifest) {
    optba::FullConfig config = optba::load_config_file(manifest.config_path);
    if (manifest.seed) config.ba.seed = *manifest.seed;
    print_warnings(optba::validate(config.ba));
    const optba::ExperimentConfig experiment = config.experiment();

    const fs::path trials_path = fs::path(manifest.out_dir) / "trials.csv";
    const fs::path summary_path = fs::path(manifest.out_dir) / "summary.json";
    check_outputs_writable(manifest, {trials_path, summary_path});

    const optba::CompareResult result = optba::compare(experiment, manifest.workers);
    optba::write_text_file(trials_path, optba::trials_csv(result, config.space));
    optba::write_text_file(summary_path,
                           optba::summary_to_json(result, config).dump(2) + "\n");
    std::cout << optba::summary_table(result);
    return 0;
}

int cmd_validate(const Manifest& manifest) {
    const optba::FullConfig config = optba::load_config_file(manifest.config_path);
    const auto warnings = optba::validate(config.ba);
    try {
        optba::validate_objective_spec(config.objective, config.space);
    } catch (const optba::ConfigError&) {
        throw;
    } catch (const optba::Error& ex) {
        throw optba::ConfigError(std::string("objective: ") + ex.what());
    }
    print_warnings(warnings);
    std::cout << "config valid\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bees Algorithm optimizer for integer hyperparameter spaces"};
    app.require_subcommand(1);

    Manifest manifest;
    const char* env_workers = std::getenv("OPTBA_WORKERS");
    if (env_workers != nullptr) {
        manifest.workers = std::max(1, std::atoi(env_workers));
    }

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", manifest.config_path, "config file (JSON)")->required();
        if (needs_out) {
            cmd->add_option("--out", manifest.out_dir, "output directory")->required();
        }
        cmd->add_option("--seed", manifest.seed, "override ba.seed");
        cmd->add_flag("--overwrite", manifest.overwrite, "allow replacing existing output files");
        cmd->add_option("--workers", manifest.workers,
                        "parallel evaluation workers (env OPTBA_WORKERS)");
        cmd->add_flag("-v,--verbose", manifest.verbosity,
                      "record population snapshots in the trace");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one optimization");
    add_common(run_cmd, true);
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a comparison experiment");
    add_common(bench_cmd, true);
    CLI::App* validate_cmd = app.add_subcommand("validate", "validate a config file");
    add_common(validate_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(manifest);
        if (bench_cmd->parsed()) return cmd_bench(manifest);
        return cmd_validate(manifest);
    } catch (const optba::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const optba::IoError& ex) {
        std::cerr << "io error: " << ex.what() << "\n";
        return 3;
    } catch (const optba::ObjectiveFailure& ex) {
        std::cerr << "objective failure: " << ex.what() << "\n";
        return 2;
    } catch (const optba::ProtocolError& ex) {
        std::cerr << "protocol error: " << ex.what() << "\n";
        return 2;
    } catch (const optba::TimeoutError& ex) {
        std::cerr << "timeout: " << ex.what() << "\n";
        return 2;
    } catch (const optba::ChildExited& ex) {
        std::cerr << "evaluator child exited: " << ex.what() << "\n";
        return 2;
    } catch (const optba::RunAborted& ex) {
        std::cerr << "objective failure: " << ex.what() << "\n";
        return 2;
    } catch (const optba::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
