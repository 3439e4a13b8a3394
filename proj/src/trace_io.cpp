#include "optba/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "optba/errors.hpp"

namespace optba {

namespace {

using nlohmann::json;

json report_to_json(const IterationReport& report) {
    json out;
    out["iteration"] = report.iteration;
    out["evaluations_this_iter"] = report.evaluations_this_iter;
    out["best_so_far"] = candidate_to_json(report.best_so_far);
    out["population_best"] = candidate_to_json(report.population_best);
    if (report.population_snapshot) {
        json pop = json::array();
        for (const auto& c : *report.population_snapshot) pop.push_back(candidate_to_json(c));
        out["population"] = pop;
    }
    return out;
}

} // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

json candidate_to_json(const Candidate& candidate) {
    return json{{"params", candidate.params},
                {"fitness", candidate.fitness},
                {"eval_id", candidate.eval_id}};
}

json trace_to_json(const RunTrace& trace) {
    json out;
    json config;
    config["space"] = space_to_json(trace.space);
    config["objective"] = objective_to_json(trace.objective);
    config["ba"] = ba_to_json(trace.config);
    config["stopping"] = stopping_to_json(trace.config.stopping);
    out["config"] = config;
    out["warnings"] = trace.warnings;
    json reports = json::array();
    for (const auto& r : trace.reports) reports.push_back(report_to_json(r));
    out["reports"] = reports;
    out["stop_reason"] = stop_reason_name(trace.stop_reason);
    out["total_evaluations"] = trace.total_evaluations;
    out["distinct_evaluations"] = trace.distinct_evaluations;
    out["best"] = candidate_to_json(trace.best);
    return out;
}

std::string trace_json_string(const RunTrace& trace) { return trace_to_json(trace).dump(2) + "\n"; }

std::string convergence_csv(const RunTrace& trace) {
    std::string out = "iteration,evaluations_cum,best_fitness";
    for (const auto& d : trace.space.domains()) {
        out += ",best_" + d.name;
    }
    out += '\n';
    std::uint64_t cum = trace.config.n;
    for (const auto& r : trace.reports) {
        cum += r.evaluations_this_iter;
        out += std::to_string(r.iteration);
        out += ',' + std::to_string(cum);
        out += ',' + format_double(r.best_so_far.fitness);
        for (const auto v : r.best_so_far.params) {
            out += ',' + std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

std::string trials_csv(const CompareResult& result, const ParamSpace& space) {
    std::string out = "trial,method,seed,total_evaluations,best_fitness,success,evals_to_optimum";
    for (const auto& d : space.domains()) {
        out += ",best_" + d.name;
    }
    out += '\n';
    for (const auto& rec : result.trials) {
        out += std::to_string(rec.trial);
        out += ',' + rec.method;
        out += ',' + std::to_string(rec.seed);
        out += ',' + std::to_string(rec.total_evaluations);
        out += ',' + format_double(rec.best_fitness);
        out += ',';
        if (rec.success) out += *rec.success ? "1" : "0";
        out += ',';
        if (rec.evals_to_optimum) out += std::to_string(*rec.evals_to_optimum);
        for (const auto v : rec.best_params) {
            out += ',' + std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

json summary_to_json(const CompareResult& result, const FullConfig& config) {
    json out;
    out["config"] = effective_config_json(config);
    out["repeats"] = result.summary.repeats;
    out["master_seed"] = result.summary.master_seed;
    if (result.summary.oracle_argmax) {
        out["oracle_argmax"] = *result.summary.oracle_argmax;
    } else {
        out["oracle_argmax"] = nullptr;
    }
    json methods = json::array();
    for (const auto& m : result.summary.methods) {
        json entry;
        entry["method"] = m.method;
        entry["mean"] = m.mean;
        entry["stddev"] = m.stddev;
        entry["median"] = m.median;
        entry["min"] = m.min;
        entry["max"] = m.max;
        entry["success_rate"] = m.success_rate ? json(*m.success_rate) : json(nullptr);
        entry["mean_evals_to_optimum"] =
            m.mean_evals_to_optimum ? json(*m.mean_evals_to_optimum) : json(nullptr);
        methods.push_back(entry);
    }
    out["methods"] = methods;
    return out;
}

std::string summary_table(const CompareResult& result) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "method" << std::right << std::setw(12) << "mean"
        << std::setw(12) << "stddev" << std::setw(12) << "median" << std::setw(12) << "min"
        << std::setw(12) << "max" << std::setw(10) << "success" << std::setw(16) << "evals_to_opt"
        << '\n';
    out << std::fixed << std::setprecision(5);
    for (const auto& m : result.summary.methods) {
        out << std::left << std::setw(16) << m.method << std::right << std::setw(12) << m.mean
            << std::setw(12) << m.stddev << std::setw(12) << m.median << std::setw(12) << m.min
            << std::setw(12) << m.max;
        if (m.success_rate) {
            out << std::setw(10) << std::setprecision(2) << *m.success_rate
                << std::setprecision(5);
        } else {
            out << std::setw(10) << "n/a";
        }
        if (m.mean_evals_to_optimum) {
            out << std::setw(16) << std::setprecision(1) << *m.mean_evals_to_optimum
                << std::setprecision(5);
        } else {
            out << std::setw(16) << "n/a";
        }
        out << '\n';
    }
    return out.str();
}

std::string best_line(const Candidate& best, const ParamSpace& space) {
    std::string out = "best: {";
    for (std::size_t i = 0; i < space.dims(); ++i) {
        if (i > 0) out += ',';
        out += space.domain(i).name + ":" + std::to_string(best.params[i]);
    }
    out += "} fitness=" + format_double(best.fitness);
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace optba
