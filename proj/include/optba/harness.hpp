#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optba/bees_engine.hpp"

namespace optba {

enum class BaselineKind { RandomSearch, GridSearch };
enum class BudgetMode { MatchTotalEvaluations, MatchIterations };

std::string baseline_name(BaselineKind kind);
BaselineKind baseline_from_name(const std::string& name);
std::string budget_mode_name(BudgetMode mode);
BudgetMode budget_mode_from_name(const std::string& name);

// ba.seed acts as the master seed; trial i runs on mix_seed(master, i), shared
// by every method within the trial (paired seeds).
struct ExperimentConfig {
    ParamSpace space;
    ObjectiveSpec objective;
    BAConfig ba;
    std::vector<BaselineKind> baselines{BaselineKind::RandomSearch};
    std::uint32_t repeats = 1;
    BudgetMode budget_mode = BudgetMode::MatchTotalEvaluations;
};

struct RandomSearchResult {
    Candidate best;
    std::uint64_t total_evaluations = 0;
    std::vector<IterationReport> reports; // cumulative best, one entry per draw
};

// `budget` independent uniform draws, evaluated once each (with replacement).
RandomSearchResult run_random_search(const ParamSpace& space, std::uint64_t budget,
                                     std::uint64_t seed, Evaluator& objective,
                                     const BatchDispatcher& dispatcher);

struct GridSearchResult {
    Candidate best;
    std::uint64_t evaluations = 0;
};

// Exhaustive oracle: evaluates every grid point once; the returned best is the
// true argmax under the engine tie-break rule.
GridSearchResult run_grid_search(const ParamSpace& space, Evaluator& objective,
                                 const BatchDispatcher& dispatcher,
                                 std::uint64_t limit = kDefaultEnumerationLimit);

struct TrialRecord {
    std::uint32_t trial = 0;
    std::string method;
    std::uint64_t seed = 0;
    std::uint64_t total_evaluations = 0;
    double best_fitness = 0.0;
    std::optional<bool> success;                  // best params == oracle argmax
    std::optional<std::uint64_t> evals_to_optimum; // issued count when argmax was hit
    ParamVector best_params;
};

struct MethodStats {
    std::string method;
    double mean = 0.0;
    double stddev = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::optional<double> success_rate;
    std::optional<double> mean_evals_to_optimum; // over successful trials
};

struct StatsSummary {
    std::vector<MethodStats> methods;
    std::optional<ParamVector> oracle_argmax;
    std::uint64_t master_seed = 0;
    std::uint32_t repeats = 0;
};

struct CompareResult {
    StatsSummary summary;
    std::vector<TrialRecord> trials; // sorted by trial, then method order
};

// What a full-length BA run would spend: n + max_iterations * per-iteration count.
std::uint64_t nominal_total_evaluations(const BAConfig& config);

// Runs BA plus the requested baselines on paired per-trial seeds. Trials may
// run on parallel workers; results are independent of worker count.
CompareResult compare(const ExperimentConfig& config, int workers = 1,
                      std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

} // namespace optba
