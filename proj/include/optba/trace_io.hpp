#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "optba/config.hpp"

namespace optba {

// Shortest round-trip decimal form (std::to_chars); stable across runs.
std::string format_double(double value);

nlohmann::json candidate_to_json(const Candidate& candidate);
nlohmann::json trace_to_json(const RunTrace& trace);
std::string trace_json_string(const RunTrace& trace);

// Header: iteration,evaluations_cum,best_fitness,best_<name>... (domain order).
std::string convergence_csv(const RunTrace& trace);

// Header: trial,method,seed,total_evaluations,best_fitness,success,
//         evals_to_optimum,best_<name>...
std::string trials_csv(const CompareResult& result, const ParamSpace& space);

nlohmann::json summary_to_json(const CompareResult& result, const FullConfig& config);

// Human-readable per-method table for the terminal.
std::string summary_table(const CompareResult& result);

// `best: {<name>:<int>,...} fitness=<number>`
std::string best_line(const Candidate& best, const ParamSpace& space);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace optba
