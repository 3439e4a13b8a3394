#include "optba/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace optba {

namespace {

constexpr const char* kMethodBa = "ba";

TrialRecord make_record(std::uint32_t trial, std::string method, std::uint64_t seed,
                        const Candidate& best, std::uint64_t total,
                        const std::optional<ParamVector>& oracle) {
    TrialRecord rec;
    rec.trial = trial;
    rec.method = std::move(method);
    rec.seed = seed;
    rec.total_evaluations = total;
    rec.best_fitness = best.fitness;
    rec.best_params = best.params;
    if (oracle) {
        rec.success = best.params == *oracle;
        if (*rec.success) rec.evals_to_optimum = best.eval_id + 1;
    }
    return rec;
}

MethodStats stats_for(const std::string& method, const std::vector<TrialRecord>& records) {
    std::vector<double> fitness;
    fitness.reserve(records.size());
    std::size_t with_success = 0;
    std::size_t successes = 0;
    double evals_sum = 0.0;
    for (const auto& rec : records) {
        if (rec.method != method) continue;
        fitness.push_back(rec.best_fitness);
        if (rec.success) {
            ++with_success;
            if (*rec.success) {
                ++successes;
                evals_sum += static_cast<double>(*rec.evals_to_optimum);
            }
        }
    }
    MethodStats out;
    out.method = method;
    const std::size_t r = fitness.size();
    double sum = 0.0;
    for (double f : fitness) sum += f;
    out.mean = sum / static_cast<double>(r);
    double var = 0.0;
    for (double f : fitness) var += (f - out.mean) * (f - out.mean);
    out.stddev = std::sqrt(var / static_cast<double>(r));
    std::sort(fitness.begin(), fitness.end());
    out.min = fitness.front();
    out.max = fitness.back();
    out.mean = std::clamp(out.mean, out.min, out.max); // accumulation can stray by an ulp
    out.median = (r % 2 == 1) ? fitness[r / 2] : 0.5 * (fitness[r / 2 - 1] + fitness[r / 2]);
    if (with_success == r) {
        out.success_rate = static_cast<double>(successes) / static_cast<double>(r);
        if (successes > 0) {
            out.mean_evals_to_optimum = evals_sum / static_cast<double>(successes);
        }
    }
    return out;
}

} // namespace

std::string baseline_name(BaselineKind kind) {
    switch (kind) {
    case BaselineKind::RandomSearch: return "random_search";
    case BaselineKind::GridSearch: return "grid_search";
    }
    throw Error("unknown baseline kind");
}

BaselineKind baseline_from_name(const std::string& name) {
    if (name == "random_search") return BaselineKind::RandomSearch;
    if (name == "grid_search") return BaselineKind::GridSearch;
    throw ConfigError("experiment.baselines: unknown baseline '" + name +
                      "' (expected random_search or grid_search)");
}

std::string budget_mode_name(BudgetMode mode) {
    switch (mode) {
    case BudgetMode::MatchTotalEvaluations: return "match_total_evaluations";
    case BudgetMode::MatchIterations: return "match_iterations";
    }
    throw Error("unknown budget mode");
}

BudgetMode budget_mode_from_name(const std::string& name) {
    if (name == "match_total_evaluations") return BudgetMode::MatchTotalEvaluations;
    if (name == "match_iterations") return BudgetMode::MatchIterations;
    throw ConfigError("experiment.budget_mode: unknown mode '" + name +
                      "' (expected match_total_evaluations or match_iterations)");
}

RandomSearchResult run_random_search(const ParamSpace& space, std::uint64_t budget,
                                     std::uint64_t seed, Evaluator& objective,
                                     const BatchDispatcher& dispatcher) {
    if (budget < 1) {
        throw InvalidConfig("random search budget must be >= 1");
    }
    Rng rng(seed);
    EvalContext ctx(objective, dispatcher);
    std::vector<ParamVector> batch;
    batch.reserve(budget);
    for (std::uint64_t i = 0; i < budget; ++i) {
        batch.push_back(sample_uniform(space, rng));
    }
    const auto candidates = ctx.evaluate(batch);
    RandomSearchResult out;
    out.best = candidates.front();
    out.reports.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidate_precedes(candidates[i], out.best)) out.best = candidates[i];
        IterationReport report;
        report.iteration = static_cast<std::uint32_t>(i);
        report.evaluations_this_iter = 1;
        report.best_so_far = out.best;
        report.population_best = candidates[i];
        out.reports.push_back(std::move(report));
    }
    out.total_evaluations = ctx.issued();
    return out;
}

GridSearchResult run_grid_search(const ParamSpace& space, Evaluator& objective,
                                 const BatchDispatcher& dispatcher, std::uint64_t limit) {
    const auto grid = enumerate_grid(space, limit);
    EvalContext ctx(objective, dispatcher);
    const auto candidates = ctx.evaluate(grid);
    GridSearchResult out;
    out.best = candidates.front();
    for (const auto& c : candidates) {
        if (candidate_precedes(c, out.best)) out.best = c;
    }
    out.evaluations = ctx.issued();
    return out;
}

std::uint64_t nominal_total_evaluations(const BAConfig& config) {
    const std::uint64_t per_iter =
        static_cast<std::uint64_t>(config.e) * config.nep +
        static_cast<std::uint64_t>(config.m - config.e) * config.nsp + (config.n - config.m);
    return config.n + config.stopping.max_iterations * per_iter;
}

CompareResult compare(const ExperimentConfig& config, int workers,
                      std::uint64_t enumeration_limit) {
    if (config.repeats < 1) {
        throw InvalidConfig("experiment.repeats must be >= 1");
    }
    validate(config.ba);
    validate_objective_spec(config.objective, config.space, enumeration_limit);

    SerialDispatcher serial;
    const bool want_grid =
        std::find(config.baselines.begin(), config.baselines.end(), BaselineKind::GridSearch) !=
        config.baselines.end();
    const bool want_random =
        std::find(config.baselines.begin(), config.baselines.end(), BaselineKind::RandomSearch) !=
        config.baselines.end();

    bool enumerable = false;
    try {
        enumerable = config.space.cardinality() <= enumeration_limit;
    } catch (const SpaceTooLarge&) {
        enumerable = false;
    }
    if (want_grid && !enumerable) {
        throw SpaceTooLarge("grid_search baseline requires an enumerable space");
    }

    std::optional<ParamVector> oracle;
    std::optional<GridSearchResult> grid;
    if (enumerable) {
        auto built = make_evaluator(config.objective, config.space, enumeration_limit);
        grid = run_grid_search(config.space, *built.evaluator, serial, enumeration_limit);
        oracle = grid->best.params;
    }

    const std::uint64_t master = config.ba.seed;
    const std::size_t methods_per_trial = 1 + (want_random ? 1 : 0) + (want_grid ? 1 : 0);
    std::vector<TrialRecord> records(config.repeats * methods_per_trial);
    std::vector<std::exception_ptr> failures(config.repeats);

    const auto run_trial = [&](std::uint32_t t) {
        try {
            const std::uint64_t seed = mix_seed(master, t);
            std::size_t slot = t * methods_per_trial;

            BAConfig ba = config.ba;
            ba.seed = seed;
            auto built = make_evaluator(config.objective, config.space, enumeration_limit);
            const RunTrace trace = run(RunInputs{config.space, ba, config.objective,
                                                 *built.evaluator, built.memo, serial, false});
            records[slot++] =
                make_record(t, kMethodBa, seed, trace.best, trace.total_evaluations, oracle);

            if (want_random) {
                const std::uint64_t budget = config.budget_mode == BudgetMode::MatchIterations
                                                 ? nominal_total_evaluations(config.ba)
                                                 : trace.total_evaluations;
                auto fresh = make_evaluator(config.objective, config.space, enumeration_limit);
                const auto rs =
                    run_random_search(config.space, budget, seed, *fresh.evaluator, serial);
                records[slot++] = make_record(t, baseline_name(BaselineKind::RandomSearch), seed,
                                              rs.best, rs.total_evaluations, oracle);
            }
            if (want_grid) {
                records[slot++] = make_record(t, baseline_name(BaselineKind::GridSearch), 0,
                                              grid->best, grid->evaluations, oracle);
            }
        } catch (...) {
            failures[t] = std::current_exception();
        }
    };

    if (workers > 1) {
        OmpDispatcher parallel(workers);
        parallel.run(config.repeats, [&](std::size_t t) {
            run_trial(static_cast<std::uint32_t>(t));
        });
    } else {
        for (std::uint32_t t = 0; t < config.repeats; ++t) run_trial(t);
    }
    for (std::uint32_t t = 0; t < config.repeats; ++t) {
        if (failures[t]) std::rethrow_exception(failures[t]);
    }

    CompareResult out;
    out.trials = std::move(records);
    out.summary.oracle_argmax = oracle;
    out.summary.master_seed = master;
    out.summary.repeats = config.repeats;
    out.summary.methods.push_back(stats_for(kMethodBa, out.trials));
    if (want_random) {
        out.summary.methods.push_back(
            stats_for(baseline_name(BaselineKind::RandomSearch), out.trials));
    }
    if (want_grid) {
        out.summary.methods.push_back(
            stats_for(baseline_name(BaselineKind::GridSearch), out.trials));
    }
    return out;
}

} // namespace optba
