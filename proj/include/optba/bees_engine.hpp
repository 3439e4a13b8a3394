#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optba/batch_eval.hpp"
#include "optba/errors.hpp"
#include "optba/objectives.hpp"
#include "optba/param_space.hpp"
#include "optba/rng.hpp"

namespace optba {

struct StoppingCriteria {
    std::uint32_t max_iterations = 100;
    std::optional<std::uint32_t> patience;
    double improvement_epsilon = 0.0;
    std::optional<double> target_fitness;
};

struct BAConfig {
    std::uint32_t n = 10;   // population size
    std::uint32_t m = 7;    // good sites
    std::uint32_t e = 3;    // elite sites
    std::uint32_t nep = 4;  // recruits per elite site
    std::uint32_t nsp = 1;  // recruits per non-elite good site
    std::int64_t ngh = 1;   // neighbourhood radius in grid steps
    StoppingCriteria stopping;
    std::uint64_t seed = 0;
};

// One bee: a parameter assignment with its measured fitness.
struct Candidate {
    ParamVector params;
    double fitness = 0.0;
    std::uint64_t eval_id = 0;
};

// Total order: descending fitness, then ascending lexicographic params, then
// ascending eval_id.
bool candidate_precedes(const Candidate& a, const Candidate& b);
std::vector<Candidate> sort_population(std::vector<Candidate> pop);

struct IterationReport {
    std::uint32_t iteration = 0;
    std::uint32_t evaluations_this_iter = 0;
    Candidate best_so_far;
    Candidate population_best;
    std::optional<std::vector<Candidate>> population_snapshot;
};

enum class StopReason { MaxIterations, Patience, TargetReached, Aborted };
std::string stop_reason_name(StopReason reason);

struct RunTrace {
    ParamSpace space;
    BAConfig config;
    ObjectiveSpec objective;
    std::vector<std::string> warnings;
    std::vector<IterationReport> reports;
    StopReason stop_reason = StopReason::MaxIterations;
    std::uint64_t total_evaluations = 0;
    std::uint64_t distinct_evaluations = 0;
    Candidate best;
};

// Carries the partially built trace out of a failed run so callers can flush it.
class RunAborted : public Error {
public:
    RunAborted(const std::string& message, RunTrace partial)
        : Error(message), partial_(std::move(partial)) {}
    const RunTrace& partial_trace() const { return partial_; }

private:
    RunTrace partial_;
};

// Empty for conforming configs; the nep <= nsp guideline yields a warning.
// Hard violations (e > m, m > n, any count < 1) throw InvalidConfig.
std::vector<std::string> validate(const BAConfig& config);

// Issues objective evaluations with sequential eval ids; batches run on the
// dispatcher and results are collected by slot, so outcomes do not depend on
// worker count. Evaluator errors and non-finite fitness become
// ObjectiveFailure with the offending params attached.
class EvalContext {
public:
    EvalContext(Evaluator& objective, const BatchDispatcher& dispatcher)
        : objective_(objective), dispatcher_(dispatcher) {}

    std::vector<Candidate> evaluate(const std::vector<ParamVector>& batch);
    std::uint64_t issued() const { return next_eval_id_; }

private:
    Evaluator& objective_;
    const BatchDispatcher& dispatcher_;
    std::uint64_t next_eval_id_ = 0;
};

std::vector<Candidate> initialize(const ParamSpace& space, const BAConfig& config, Rng& rng,
                                  EvalContext& ctx);

// Evaluates exactly `recruits` neighbours of the site; returns the fittest of
// {site} + recruits (the site survives when every recruit is worse).
Candidate local_search_site(const Candidate& site, std::uint32_t recruits, const ParamSpace& space,
                            std::int64_t ngh, Rng& rng, EvalContext& ctx);

std::vector<Candidate> global_search(std::uint32_t count, const ParamSpace& space, Rng& rng,
                                     EvalContext& ctx);

struct EngineState {
    std::vector<Candidate> population;
    Candidate best_so_far;
    Rng rng;
    std::uint32_t iteration = 0;
};

// One main-loop pass: sort, local search on the m sites (nep recruits for the
// e elite, nsp otherwise), global replacement of the n-m rest.
IterationReport step(EngineState& state, const BAConfig& config, const ParamSpace& space,
                     EvalContext& ctx, bool record_population = false);

struct RunInputs {
    const ParamSpace& space;
    BAConfig config;
    ObjectiveSpec objective_spec; // echoed into the trace
    Evaluator& objective;
    const MemoizedEvaluator* memo = nullptr;
    const BatchDispatcher& dispatcher;
    bool record_population = false;
};

RunTrace run(const RunInputs& inputs);

// Builds the evaluator stack from the spec and runs.
RunTrace run(const ParamSpace& space, const BAConfig& config, const ObjectiveSpec& objective,
             const BatchDispatcher& dispatcher, bool record_population = false);

} // namespace optba
