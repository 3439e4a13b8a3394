#include "optba/bees_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <utility>

namespace optba {

namespace {

void fold_best(Candidate& best, const Candidate& contender) {
    if (best.params.empty() || candidate_precedes(contender, best)) {
        best = contender;
    }
}

} // namespace

bool candidate_precedes(const Candidate& a, const Candidate& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    if (a.params != b.params) return a.params < b.params;
    return a.eval_id < b.eval_id;
}

std::vector<Candidate> sort_population(std::vector<Candidate> pop) {
    std::sort(pop.begin(), pop.end(), candidate_precedes);
    return pop;
}

std::string stop_reason_name(StopReason reason) {
    switch (reason) {
    case StopReason::MaxIterations: return "MaxIterations";
    case StopReason::Patience: return "Patience";
    case StopReason::TargetReached: return "TargetReached";
    case StopReason::Aborted: return "Aborted";
    }
    throw Error("unknown stop reason");
}

std::vector<std::string> validate(const BAConfig& config) {
    if (config.n < 1 || config.m < 1 || config.e < 1 || config.nep < 1 || config.nsp < 1) {
        throw InvalidConfig("ba: n, m, e, nep and nsp must all be >= 1");
    }
    if (config.e > config.m) {
        throw InvalidConfig("ba: e (" + std::to_string(config.e) + ") > m (" +
                            std::to_string(config.m) + "); requires 1 <= e <= m <= n");
    }
    if (config.m > config.n) {
        throw InvalidConfig("ba: m (" + std::to_string(config.m) + ") > n (" +
                            std::to_string(config.n) + "); requires 1 <= e <= m <= n");
    }
    if (config.ngh < 1) {
        throw InvalidConfig("ba: ngh must be >= 1");
    }
    if (config.stopping.max_iterations < 1) {
        throw InvalidConfig("stopping.max_iterations must be >= 1");
    }
    if (config.stopping.patience && *config.stopping.patience < 1) {
        throw InvalidConfig("stopping.patience must be >= 1");
    }
    if (config.stopping.improvement_epsilon < 0.0 ||
        !std::isfinite(config.stopping.improvement_epsilon)) {
        throw InvalidConfig("stopping.improvement_epsilon must be finite and >= 0");
    }
    std::vector<std::string> warnings;
    if (config.nep <= config.nsp) {
        warnings.push_back("nep (" + std::to_string(config.nep) + ") <= nsp (" +
                           std::to_string(config.nsp) +
                           "): elite sites usually deserve more recruits than non-elite sites");
    }
    return warnings;
}

std::vector<Candidate> EvalContext::evaluate(const std::vector<ParamVector>& batch) {
    const std::size_t k = batch.size();
    const std::uint64_t base = next_eval_id_;
    next_eval_id_ += k;
    if (k == 0) return {};
    std::vector<double> values(k, 0.0);
    std::vector<std::exception_ptr> errors(k);
    dispatcher_.run(k, [&](std::size_t i) {
        try {
            values[i] = objective_.evaluate(batch[i], base + i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    // Deterministic attribution: the lowest failing slot wins regardless of
    // worker count.
    for (std::size_t i = 0; i < k; ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& ex) {
                throw ObjectiveFailure(ex.what(), batch[i]);
            }
        }
        if (!std::isfinite(values[i])) {
            throw ObjectiveFailure("objective returned a non-finite fitness", batch[i]);
        }
    }
    std::vector<Candidate> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(Candidate{batch[i], values[i], base + i});
    }
    return out;
}

std::vector<Candidate> initialize(const ParamSpace& space, const BAConfig& config, Rng& rng,
                                  EvalContext& ctx) {
    std::vector<ParamVector> batch;
    batch.reserve(config.n);
    for (std::uint32_t i = 0; i < config.n; ++i) {
        batch.push_back(sample_uniform(space, rng));
    }
    return ctx.evaluate(batch);
}

Candidate local_search_site(const Candidate& site, std::uint32_t recruits, const ParamSpace& space,
                            std::int64_t ngh, Rng& rng, EvalContext& ctx) {
    if (recruits < 1) {
        throw InvalidConfig("local search needs at least one recruit");
    }
    std::vector<ParamVector> batch;
    batch.reserve(recruits);
    for (std::uint32_t i = 0; i < recruits; ++i) {
        batch.push_back(neighbor(space, site.params, ngh, rng));
    }
    Candidate best = site;
    for (const auto& recruit : ctx.evaluate(batch)) {
        if (candidate_precedes(recruit, best)) best = recruit;
    }
    return best;
}

std::vector<Candidate> global_search(std::uint32_t count, const ParamSpace& space, Rng& rng,
                                     EvalContext& ctx) {
    std::vector<ParamVector> batch;
    batch.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        batch.push_back(sample_uniform(space, rng));
    }
    return ctx.evaluate(batch);
}

IterationReport step(EngineState& state, const BAConfig& config, const ParamSpace& space,
                     EvalContext& ctx, bool record_population) {
    auto sorted = sort_population(std::move(state.population));
    const std::uint64_t issued_before = ctx.issued();
    // Cardinality-1 spaces have no admissible neighbour moves; sites pass
    // through so the run can still terminate via the stopping criteria.
    const bool degenerate = space.single_point();

    std::vector<Candidate> next;
    next.reserve(config.n);
    for (std::uint32_t s = 0; s < config.m; ++s) {
        const std::uint32_t recruits = s < config.e ? config.nep : config.nsp;
        Candidate updated = degenerate
                                ? sorted[s]
                                : local_search_site(sorted[s], recruits, space, config.ngh,
                                                    state.rng, ctx);
        fold_best(state.best_so_far, updated);
        next.push_back(std::move(updated));
    }
    for (auto& scout : global_search(config.n - config.m, space, state.rng, ctx)) {
        fold_best(state.best_so_far, scout);
        next.push_back(std::move(scout));
    }

    IterationReport report;
    report.iteration = state.iteration;
    report.evaluations_this_iter = static_cast<std::uint32_t>(ctx.issued() - issued_before);
    report.best_so_far = state.best_so_far;
    report.population_best =
        *std::min_element(next.begin(), next.end(), [](const Candidate& a, const Candidate& b) {
            return candidate_precedes(a, b);
        });
    if (record_population) report.population_snapshot = next;

    state.population = std::move(next);
    ++state.iteration;
    return report;
}

RunTrace run(const RunInputs& inputs) {
    RunTrace trace;
    trace.space = inputs.space;
    trace.config = inputs.config;
    trace.objective = inputs.objective_spec;
    trace.warnings = validate(inputs.config);

    EvalContext ctx(inputs.objective, inputs.dispatcher);
    EngineState state{{}, {}, Rng(inputs.config.seed), 0};
    const StoppingCriteria& stopping = inputs.config.stopping;

    auto finalize = [&](StopReason reason) -> RunTrace& {
        trace.stop_reason = reason;
        trace.total_evaluations = ctx.issued();
        trace.distinct_evaluations = inputs.memo ? inputs.memo->distinct() : ctx.issued();
        trace.best = state.best_so_far;
        return trace;
    };

    try {
        state.population = initialize(inputs.space, inputs.config, state.rng, ctx);
    } catch (const std::exception& ex) {
        throw RunAborted(ex.what(), finalize(StopReason::Aborted));
    }
    for (const auto& candidate : state.population) {
        fold_best(state.best_so_far, candidate);
    }
    if (stopping.target_fitness && state.best_so_far.fitness >= *stopping.target_fitness) {
        return finalize(StopReason::TargetReached);
    }

    double last_improved_fitness = state.best_so_far.fitness;
    std::uint32_t stall = 0;
    while (true) {
        IterationReport report;
        try {
            report = step(state, inputs.config, inputs.space, ctx, inputs.record_population);
        } catch (const std::exception& ex) {
            throw RunAborted(ex.what(), finalize(StopReason::Aborted));
        }
        trace.reports.push_back(std::move(report));
        if (stopping.target_fitness && state.best_so_far.fitness >= *stopping.target_fitness) {
            return finalize(StopReason::TargetReached);
        }
        if (state.best_so_far.fitness - last_improved_fitness > stopping.improvement_epsilon) {
            last_improved_fitness = state.best_so_far.fitness;
            stall = 0;
        } else if (stopping.patience && ++stall >= *stopping.patience) {
            return finalize(StopReason::Patience);
        }
        if (state.iteration >= stopping.max_iterations) {
            return finalize(StopReason::MaxIterations);
        }
    }
}

RunTrace run(const ParamSpace& space, const BAConfig& config, const ObjectiveSpec& objective,
             const BatchDispatcher& dispatcher, bool record_population) {
    BuiltObjective built = make_evaluator(objective, space);
    return run(RunInputs{space, config, objective, *built.evaluator, built.memo, dispatcher,
                         record_population});
}

} // namespace optba
