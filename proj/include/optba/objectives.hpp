#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "optba/param_space.hpp"

namespace optba {

// Fitness callback (higher is better). Implementations must tolerate
// concurrent calls from batch-dispatch workers.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual double evaluate(const ParamVector& params, std::uint64_t eval_id) = 0;
};

enum class ObjectiveKind {
    SurrogateUnimodal,
    SurrogateMultimodal,
    SphereInt,
    RastriginInt,
    External,
};

std::string objective_kind_name(ObjectiveKind kind);
ObjectiveKind objective_kind_from_name(const std::string& name);

// Additive Gaussian feature of a multimodal surface: height * exp(-|v-c|^2/w^2).
struct Bump {
    ParamVector center;
    double height = 0.1;
    double width = 1.0;
};

inline constexpr double kDefaultPeak = 0.9963;

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::SurrogateUnimodal;
    ParamVector optimum;       // planted argmax for surrogates, shift for sphere/rastrigin
    double peak = kDefaultPeak;
    std::vector<double> coeffs;
    std::vector<Bump> bumps;
    bool verify_construction = true;
    double noise_stddev = 0.0;
    std::uint64_t noise_seed = 0;
    std::optional<bool> memoize;
    std::vector<std::string> command; // external only, argv form
    std::int64_t timeout_ms = 10'000;

    // Default: deterministic built-ins memoize; noise or external disables it.
    bool memoize_effective() const {
        return memoize.value_or(kind != ObjectiveKind::External && noise_stddev == 0.0);
    }
};

// The default surface: planted peak 0.9963 at (49, 108), coeffs (2e-5, 1e-6).
ObjectiveSpec default_unimodal_spec();

// clamp(peak - sum_i coeffs_i*(v_i - optimum_i)^2, 0, 1); unique argmax at optimum.
class SurrogateUnimodal final : public Evaluator {
public:
    SurrogateUnimodal(ParamVector optimum, double peak, std::vector<double> coeffs);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

private:
    ParamVector optimum_;
    double peak_;
    std::vector<double> coeffs_;
};

// Unimodal base plus Gaussian bumps, clamped to [0,1]. Each bump's local peak
// must stay strictly below the global peak.
class SurrogateMultimodal final : public Evaluator {
public:
    SurrogateMultimodal(ParamVector optimum, double peak, std::vector<double> coeffs,
                        std::vector<Bump> bumps);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

private:
    ParamVector optimum_;
    double peak_;
    std::vector<double> coeffs_;
    std::vector<Bump> bumps_;
};

// -sum (v_i - shift_i)^2; maximum 0 at shift.
class SphereObjective final : public Evaluator {
public:
    explicit SphereObjective(ParamVector shift);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

private:
    ParamVector shift_;
};

// Negated Rastrigin; maximum 0 at shift.
class RastriginObjective final : public Evaluator {
public:
    explicit RastriginObjective(ParamVector shift);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

private:
    ParamVector shift_;
};

// Adds seeded Gaussian noise; the noise term is a pure function of
// (noise_seed, eval_id), so noisy runs stay reproducible.
class NoisyEvaluator final : public Evaluator {
public:
    NoisyEvaluator(std::unique_ptr<Evaluator> inner, double stddev, std::uint64_t noise_seed);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

private:
    std::unique_ptr<Evaluator> inner_;
    double stddev_;
    std::uint64_t noise_seed_;
};

// Caches fitness per distinct ParamVector with at-most-once inner invocation,
// safe under concurrent lookup/insert. Tracks issued vs distinct counts.
class MemoizedEvaluator final : public Evaluator {
public:
    explicit MemoizedEvaluator(std::unique_ptr<Evaluator> inner);
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

    std::uint64_t issued() const { return issued_.load(std::memory_order_relaxed); }
    std::uint64_t distinct() const { return distinct_.load(std::memory_order_relaxed); }

private:
    struct VectorHash {
        std::size_t operator()(const ParamVector& v) const {
            std::uint64_t h = 0xcbf29ce484222325ull;
            for (std::int64_t x : v) {
                h ^= static_cast<std::uint64_t>(x);
                h *= 0x100000001b3ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    std::unique_ptr<Evaluator> inner_;
    std::mutex mu_;
    std::unordered_map<ParamVector, std::shared_future<double>, VectorHash> cache_;
    std::atomic<std::uint64_t> issued_{0};
    std::atomic<std::uint64_t> distinct_{0};
};

class ExternalEvaluator; // external_eval.hpp

// Assembled evaluator stack; memo/external point into the chain when present.
struct BuiltObjective {
    std::unique_ptr<Evaluator> evaluator;
    MemoizedEvaluator* memo = nullptr;
    ExternalEvaluator* external = nullptr;
};

// Static checks plus (for multimodal surfaces) the construction-time
// enumeration proof that the planted optimum is the unique argmax. Never
// spawns external processes.
void validate_objective_spec(const ObjectiveSpec& spec, const ParamSpace& space,
                             std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

BuiltObjective make_evaluator(const ObjectiveSpec& spec, const ParamSpace& space,
                              std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

} // namespace optba
