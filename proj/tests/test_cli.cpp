#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using nlohmann::json;
using test_support::TempDir;
using test_support::run_process;
using test_support::slurp;

namespace {

std::string optba_bin() { return test_support::env_or_fail("OPTBA_BIN"); }

json base_config() {
    return json::parse(R"({
      "space": [
        {"name": "epochs", "lower": 1, "upper": 100},
        {"name": "units", "lower": 16, "upper": 256}
      ],
      "objective": {"kind": "surrogate_unimodal"},
      "ba": {"n": 10, "m": 7, "e": 3, "nep": 4, "nsp": 1, "ngh": 1, "seed": 42},
      "stopping": {"max_iterations": 100, "target_fitness": 0.9963}
    })");
}

std::string write_config(const TempDir& dir, const json& config, const char* name = "config.json") {
    const auto path = dir.path() / name;
    std::ofstream out(path);
    out << config.dump(2);
    return path.string();
}

} // namespace

TEST_CASE("cli validate accepts the reference config silently") {
    TempDir dir;
    const auto config = write_config(dir, base_config());
    const auto result = run_process({optba_bin(), "validate", "--config", config});
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("warning") == std::string::npos);
    CHECK(result.err.empty());
}

TEST_CASE("cli validate rejects e > m citing the rule") {
    TempDir dir;
    json config = base_config();
    config["ba"]["e"] = 5;
    config["ba"]["m"] = 3;
    const auto path = write_config(dir, config);
    const auto result = run_process({optba_bin(), "validate", "--config", path});
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("e (5) > m (3)") != std::string::npos);
}

TEST_CASE("cli validate prints the recruitment guideline warning") {
    TempDir dir;
    json config = base_config();
    config["ba"]["nep"] = 1;
    config["ba"]["nsp"] = 1;
    const auto path = write_config(dir, config);
    const auto result = run_process({optba_bin(), "validate", "--config", path});
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("nep (1) <= nsp (1)") != std::string::npos);
}

TEST_CASE("cli run writes the trace and prints the final best line") {
    TempDir dir;
    const auto config = write_config(dir, base_config());
    const auto out_dir = (dir.path() / "out").string();
    const auto result = run_process({optba_bin(), "run", "--config", config, "--out", out_dir});
    CHECK(result.exit_code == 0);
    CHECK(result.err.empty());
    const auto lines_end = result.out.rfind('\n');
    const auto line_start = result.out.rfind('\n', lines_end - 1);
    const std::string final_line =
        result.out.substr(line_start == std::string::npos ? 0 : line_start + 1,
                          lines_end - (line_start == std::string::npos ? 0 : line_start + 1));
    CHECK(final_line == "best: {epochs:49,units:108} fitness=0.9963");

    const json trace = json::parse(slurp(out_dir + "/run_trace.json"));
    CHECK(trace["stop_reason"] == "TargetReached");
    CHECK(trace["best"]["params"] == json::array({49, 108}));
    CHECK(trace["config"]["ba"]["seed"] == 42);
    CHECK(slurp(out_dir + "/convergence.csv").rfind("iteration,", 0) == 0);
}

TEST_CASE("cli run is byte-deterministic and honours --seed") {
    TempDir dir;
    const auto config = write_config(dir, base_config());
    const auto out_a = (dir.path() / "a").string();
    const auto out_b = (dir.path() / "b").string();
    const auto out_c = (dir.path() / "c").string();
    CHECK(run_process({optba_bin(), "run", "--config", config, "--out", out_a}).exit_code == 0);
    CHECK(run_process({optba_bin(), "run", "--config", config, "--out", out_b}).exit_code == 0);
    CHECK(slurp(out_a + "/run_trace.json") == slurp(out_b + "/run_trace.json"));
    CHECK(slurp(out_a + "/convergence.csv") == slurp(out_b + "/convergence.csv"));

    CHECK(run_process({optba_bin(), "run", "--config", config, "--out", out_c, "--seed", "7"})
              .exit_code == 0);
    const json trace = json::parse(slurp(out_c + "/run_trace.json"));
    CHECK(trace["config"]["ba"]["seed"] == 7);
}

TEST_CASE("cli refuses to overwrite existing outputs without --overwrite") {
    TempDir dir;
    const auto config = write_config(dir, base_config());
    const auto out_dir = (dir.path() / "out").string();
    CHECK(run_process({optba_bin(), "run", "--config", config, "--out", out_dir}).exit_code == 0);
    const std::string before = slurp(out_dir + "/run_trace.json");

    const auto refused = run_process({optba_bin(), "run", "--config", config, "--out", out_dir,
                                      "--seed", "9"});
    CHECK(refused.exit_code == 3);
    CHECK(refused.err.find("--overwrite") != std::string::npos);
    CHECK(slurp(out_dir + "/run_trace.json") == before); // untouched

    const auto allowed = run_process({optba_bin(), "run", "--config", config, "--out", out_dir,
                                      "--seed", "9", "--overwrite"});
    CHECK(allowed.exit_code == 0);
    CHECK(slurp(out_dir + "/run_trace.json") != before);
}

TEST_CASE("cli reports malformed configs as exit 1") {
    TempDir dir;
    const auto path = dir.path() / "broken.json";
    {
        std::ofstream out(path);
        out << "{\"space\": not-json";
    }
    const auto result = run_process(
        {optba_bin(), "run", "--config", path.string(), "--out", (dir.path() / "o").string()});
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("config error") != std::string::npos);
}

TEST_CASE("cli bench writes trials and summary for a single-point space") {
    TempDir dir;
    json config = base_config();
    config["space"] = json::array(
        {{{"name", "epochs"}, {"lower", 49}, {"upper", 49}},
         {{"name", "units"}, {"lower", 108}, {"upper", 108}}});
    config["stopping"] = {{"max_iterations", 2}};
    config["experiment"] = {{"repeats", 2},
                            {"baselines", {"random_search", "grid_search"}}};
    const auto path = write_config(dir, config);
    const auto out_dir = (dir.path() / "bench").string();
    const auto result = run_process({optba_bin(), "bench", "--config", path, "--out", out_dir});
    CHECK(result.exit_code == 0);
    CHECK(result.err.empty());
    CHECK(result.out.find("method") != std::string::npos);

    const json summary = json::parse(slurp(out_dir + "/summary.json"));
    for (const auto& method : summary["methods"]) {
        CHECK(method["success_rate"] == 1.0);
    }
    const std::string trials = slurp(out_dir + "/trials.csv");
    CHECK(trials.rfind("trial,method,seed,", 0) == 0);
}

TEST_CASE("cli run with --workers 8 matches --workers 1 byte for byte") {
    TempDir dir;
    json config = base_config();
    config["stopping"] = {{"max_iterations", 20}}; // no target: fixed-length run
    const auto path = write_config(dir, config);
    const auto out_1 = (dir.path() / "w1").string();
    const auto out_8 = (dir.path() / "w8").string();
    CHECK(run_process({optba_bin(), "run", "--config", path, "--out", out_1, "--workers", "1"})
              .exit_code == 0);
    CHECK(run_process({optba_bin(), "run", "--config", path, "--out", out_8, "--workers", "8"})
              .exit_code == 0);
    CHECK(slurp(out_1 + "/run_trace.json") == slurp(out_8 + "/run_trace.json"));
    CHECK(slurp(out_1 + "/convergence.csv") == slurp(out_8 + "/convergence.csv"));
}

TEST_CASE("cli run flushes a partial trace when the evaluator child dies") {
    TempDir dir;
    json config = base_config();
    config["objective"] = {{"kind", "external"},
                           {"command", {test_support::env_or_fail("OPTBA_CHILD_BIN"),
                                        "--exit-after", "5"}},
                           {"timeout_ms", 5000}};
    const auto path = write_config(dir, config);
    const auto out_dir = (dir.path() / "out").string();
    const auto result = run_process({optba_bin(), "run", "--config", path, "--out", out_dir});
    CHECK(result.exit_code == 2);
    const json trace = json::parse(slurp(out_dir + "/run_trace.json"));
    CHECK(trace["stop_reason"] == "Aborted");
}
