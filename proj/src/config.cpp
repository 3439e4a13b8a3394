#include "optba/config.hpp"

#include <fstream>

#include "optba/errors.hpp"

namespace optba {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) {
        throw ConfigError(path + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(path + "." + key + ": missing required field");
    }
    return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ConfigError(path + ": expected an integer");
    }
    return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(path + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path + ": expected a number");
    }
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ConfigError(path + ": expected a string");
    }
    return v.get<std::string>();
}

ParamVector as_int_array(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw ConfigError(path + ": expected an array of integers");
    }
    ParamVector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<double> as_double_array(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw ConfigError(path + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

StoppingCriteria stopping_from_json(const json& value) {
    StoppingCriteria out;
    out.max_iterations =
        static_cast<std::uint32_t>(as_uint(require_field(value, "max_iterations", "stopping"),
                                           "stopping.max_iterations"));
    if (value.contains("patience") && !value["patience"].is_null()) {
        out.patience = static_cast<std::uint32_t>(as_uint(value["patience"], "stopping.patience"));
    }
    if (value.contains("epsilon")) {
        out.improvement_epsilon = as_double(value["epsilon"], "stopping.epsilon");
    }
    if (value.contains("target_fitness") && !value["target_fitness"].is_null()) {
        out.target_fitness = as_double(value["target_fitness"], "stopping.target_fitness");
    }
    return out;
}

} // namespace

ExperimentConfig FullConfig::experiment() const {
    if (!has_experiment()) {
        throw ConfigError("experiment: missing required section");
    }
    ExperimentConfig out;
    out.space = space;
    out.objective = objective;
    out.ba = ba;
    out.baselines = baselines.value_or(std::vector<BaselineKind>{BaselineKind::RandomSearch});
    out.repeats = *repeats;
    out.budget_mode = budget_mode.value_or(BudgetMode::MatchTotalEvaluations);
    return out;
}

json space_to_json(const ParamSpace& space) {
    json out = json::array();
    for (const auto& d : space.domains()) {
        out.push_back({{"name", d.name}, {"lower", d.lower}, {"upper", d.upper}, {"step", d.step}});
    }
    return out;
}

ParamSpace space_from_json(const json& value) {
    if (!value.is_array()) {
        throw ConfigError("space: expected an array of domain objects");
    }
    std::vector<ParamDomain> domains;
    domains.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string path = "space[" + std::to_string(i) + "]";
        const json& entry = value[i];
        ParamDomain d;
        d.name = as_string(require_field(entry, "name", path), path + ".name");
        d.lower = as_int(require_field(entry, "lower", path), path + ".lower");
        d.upper = as_int(require_field(entry, "upper", path), path + ".upper");
        if (entry.contains("step")) {
            d.step = as_int(entry["step"], path + ".step");
        }
        domains.push_back(std::move(d));
    }
    return ParamSpace(std::move(domains));
}

json objective_to_json(const ObjectiveSpec& spec) {
    json out;
    out["kind"] = objective_kind_name(spec.kind);
    out["memoize"] = spec.memoize_effective();
    if (spec.kind == ObjectiveKind::External) {
        out["command"] = spec.command;
        out["timeout_ms"] = spec.timeout_ms;
        return out;
    }
    out["optimum"] = spec.optimum;
    out["noise_stddev"] = spec.noise_stddev;
    out["noise_seed"] = spec.noise_seed;
    if (spec.kind == ObjectiveKind::SurrogateUnimodal ||
        spec.kind == ObjectiveKind::SurrogateMultimodal) {
        out["peak"] = spec.peak;
        out["coeffs"] = spec.coeffs;
    }
    if (spec.kind == ObjectiveKind::SurrogateMultimodal) {
        json bumps = json::array();
        for (const auto& b : spec.bumps) {
            bumps.push_back({{"center", b.center}, {"height", b.height}, {"width", b.width}});
        }
        out["bumps"] = bumps;
        out["verify_construction"] = spec.verify_construction;
    }
    return out;
}

ObjectiveSpec objective_from_json(const json& value) {
    ObjectiveSpec spec = default_unimodal_spec();
    if (!value.is_object()) {
        throw ConfigError("objective: expected an object");
    }
    spec.kind = objective_kind_from_name(
        as_string(require_field(value, "kind", "objective"), "objective.kind"));
    if (spec.kind == ObjectiveKind::SphereInt || spec.kind == ObjectiveKind::RastriginInt) {
        spec.coeffs.clear();
        spec.optimum.clear(); // shift defaults to the space origin at validation
    }
    if (value.contains("optimum")) {
        spec.optimum = as_int_array(value["optimum"], "objective.optimum");
    }
    if (value.contains("peak")) {
        spec.peak = as_double(value["peak"], "objective.peak");
    }
    if (value.contains("coeffs")) {
        spec.coeffs = as_double_array(value["coeffs"], "objective.coeffs");
    }
    if (value.contains("bumps")) {
        const json& bumps = value["bumps"];
        if (!bumps.is_array()) {
            throw ConfigError("objective.bumps: expected an array");
        }
        spec.bumps.clear();
        for (std::size_t j = 0; j < bumps.size(); ++j) {
            const std::string path = "objective.bumps[" + std::to_string(j) + "]";
            Bump b;
            b.center = as_int_array(require_field(bumps[j], "center", path), path + ".center");
            b.height = as_double(require_field(bumps[j], "height", path), path + ".height");
            b.width = as_double(require_field(bumps[j], "width", path), path + ".width");
            spec.bumps.push_back(std::move(b));
        }
    }
    if (value.contains("verify_construction")) {
        if (!value["verify_construction"].is_boolean()) {
            throw ConfigError("objective.verify_construction: expected a boolean");
        }
        spec.verify_construction = value["verify_construction"].get<bool>();
    }
    if (value.contains("noise_stddev")) {
        spec.noise_stddev = as_double(value["noise_stddev"], "objective.noise_stddev");
    }
    if (value.contains("noise_seed")) {
        spec.noise_seed = as_uint(value["noise_seed"], "objective.noise_seed");
    }
    if (value.contains("memoize")) {
        if (!value["memoize"].is_boolean()) {
            throw ConfigError("objective.memoize: expected a boolean");
        }
        spec.memoize = value["memoize"].get<bool>();
    }
    if (value.contains("command")) {
        const json& cmd = value["command"];
        if (!cmd.is_array()) {
            throw ConfigError("objective.command: expected an array of strings");
        }
        spec.command.clear();
        for (std::size_t i = 0; i < cmd.size(); ++i) {
            spec.command.push_back(
                as_string(cmd[i], "objective.command[" + std::to_string(i) + "]"));
        }
    }
    if (value.contains("timeout_ms")) {
        spec.timeout_ms = as_int(value["timeout_ms"], "objective.timeout_ms");
    }
    return spec;
}

json ba_to_json(const BAConfig& config) {
    return json{{"n", config.n},     {"m", config.m},     {"e", config.e},
                {"nep", config.nep}, {"nsp", config.nsp}, {"ngh", config.ngh},
                {"seed", config.seed}};
}

json stopping_to_json(const StoppingCriteria& stopping) {
    json out;
    out["max_iterations"] = stopping.max_iterations;
    out["epsilon"] = stopping.improvement_epsilon;
    if (stopping.patience) out["patience"] = *stopping.patience;
    if (stopping.target_fitness) out["target_fitness"] = *stopping.target_fitness;
    return out;
}

FullConfig config_from_json(const json& value) {
    FullConfig out;
    out.space = space_from_json(require_field(value, "space", "config"));
    out.objective = objective_from_json(require_field(value, "objective", "config"));

    const json& ba = require_field(value, "ba", "config");
    out.ba.n = static_cast<std::uint32_t>(as_uint(require_field(ba, "n", "ba"), "ba.n"));
    out.ba.m = static_cast<std::uint32_t>(as_uint(require_field(ba, "m", "ba"), "ba.m"));
    out.ba.e = static_cast<std::uint32_t>(as_uint(require_field(ba, "e", "ba"), "ba.e"));
    out.ba.nep = static_cast<std::uint32_t>(as_uint(require_field(ba, "nep", "ba"), "ba.nep"));
    out.ba.nsp = static_cast<std::uint32_t>(as_uint(require_field(ba, "nsp", "ba"), "ba.nsp"));
    out.ba.ngh = as_int(require_field(ba, "ngh", "ba"), "ba.ngh");
    if (ba.contains("seed")) {
        out.ba.seed = as_uint(ba["seed"], "ba.seed");
    }
    out.ba.stopping = stopping_from_json(require_field(value, "stopping", "config"));

    // sphere/rastrigin shift defaults to the all-zero vector sized like the space
    if (out.objective.optimum.empty() && (out.objective.kind == ObjectiveKind::SphereInt ||
                                          out.objective.kind == ObjectiveKind::RastriginInt)) {
        out.objective.optimum.assign(out.space.dims(), 0);
    }

    if (value.contains("experiment")) {
        const json& exp = value["experiment"];
        out.repeats = static_cast<std::uint32_t>(
            as_uint(require_field(exp, "repeats", "experiment"), "experiment.repeats"));
        if (exp.contains("baselines")) {
            if (!exp["baselines"].is_array()) {
                throw ConfigError("experiment.baselines: expected an array of strings");
            }
            std::vector<BaselineKind> kinds;
            for (std::size_t i = 0; i < exp["baselines"].size(); ++i) {
                kinds.push_back(baseline_from_name(as_string(
                    exp["baselines"][i], "experiment.baselines[" + std::to_string(i) + "]")));
            }
            out.baselines = std::move(kinds);
        }
        if (exp.contains("budget_mode")) {
            out.budget_mode =
                budget_mode_from_name(as_string(exp["budget_mode"], "experiment.budget_mode"));
        }
    }
    return out;
}

FullConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path.string());
    }
    json value;
    try {
        value = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError("config file " + path.string() + ": " + ex.what());
    }
    return config_from_json(value);
}

json effective_config_json(const FullConfig& config) {
    json out;
    out["space"] = space_to_json(config.space);
    out["objective"] = objective_to_json(config.objective);
    out["ba"] = ba_to_json(config.ba);
    out["stopping"] = stopping_to_json(config.ba.stopping);
    if (config.has_experiment()) {
        json exp;
        json names = json::array();
        for (const auto kind :
             config.baselines.value_or(std::vector<BaselineKind>{BaselineKind::RandomSearch})) {
            names.push_back(baseline_name(kind));
        }
        exp["baselines"] = names;
        exp["repeats"] = *config.repeats;
        exp["budget_mode"] =
            budget_mode_name(config.budget_mode.value_or(BudgetMode::MatchTotalEvaluations));
        out["experiment"] = exp;
    }
    return out;
}

} // namespace optba
