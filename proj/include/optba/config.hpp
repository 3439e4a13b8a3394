#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "optba/harness.hpp"

namespace optba {

// Config file layout: top-level keys `space` (array of domain objects),
// `objective`, `ba`, `stopping`, and optionally `experiment` (bench only).
struct FullConfig {
    ParamSpace space;
    ObjectiveSpec objective;
    BAConfig ba;
    std::optional<std::vector<BaselineKind>> baselines;
    std::optional<std::uint32_t> repeats;
    std::optional<BudgetMode> budget_mode;

    bool has_experiment() const { return repeats.has_value(); }
    ExperimentConfig experiment() const;
};

nlohmann::json space_to_json(const ParamSpace& space);
ParamSpace space_from_json(const nlohmann::json& value);

nlohmann::json objective_to_json(const ObjectiveSpec& spec);
ObjectiveSpec objective_from_json(const nlohmann::json& value);

nlohmann::json ba_to_json(const BAConfig& config);      // n..ngh + seed
nlohmann::json stopping_to_json(const StoppingCriteria& stopping);

FullConfig config_from_json(const nlohmann::json& value);
FullConfig load_config_file(const std::filesystem::path& path);

// The complete effective configuration after defaults; re-running it
// reproduces the run byte for byte.
nlohmann::json effective_config_json(const FullConfig& config);

} // namespace optba
