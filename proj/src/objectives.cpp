#include "optba/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optba/errors.hpp"
#include "optba/external_eval.hpp"
#include "optba/rng.hpp"

namespace optba {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_dims(const ParamVector& v, std::size_t dims) {
    if (v.size() != dims) {
        throw DimensionMismatch("objective expects " + std::to_string(dims) +
                                " parameters, got " + std::to_string(v.size()));
    }
}

double quadratic_base(const ParamVector& v, const ParamVector& optimum,
                      const std::vector<double>& coeffs) {
    double value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = static_cast<double>(v[i] - optimum[i]);
        value += coeffs[i] * d * d;
    }
    return value;
}

} // namespace

std::string objective_kind_name(ObjectiveKind kind) {
    switch (kind) {
    case ObjectiveKind::SurrogateUnimodal: return "surrogate_unimodal";
    case ObjectiveKind::SurrogateMultimodal: return "surrogate_multimodal";
    case ObjectiveKind::SphereInt: return "sphere";
    case ObjectiveKind::RastriginInt: return "rastrigin";
    case ObjectiveKind::External: return "external";
    }
    throw Error("unknown objective kind");
}

ObjectiveKind objective_kind_from_name(const std::string& name) {
    if (name == "surrogate_unimodal") return ObjectiveKind::SurrogateUnimodal;
    if (name == "surrogate_multimodal") return ObjectiveKind::SurrogateMultimodal;
    if (name == "sphere") return ObjectiveKind::SphereInt;
    if (name == "rastrigin") return ObjectiveKind::RastriginInt;
    if (name == "external") return ObjectiveKind::External;
    throw ConfigError("objective.kind: unknown kind '" + name +
                      "' (expected surrogate_unimodal, surrogate_multimodal, sphere, "
                      "rastrigin or external)");
}

ObjectiveSpec default_unimodal_spec() {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::SurrogateUnimodal;
    spec.optimum = {49, 108};
    spec.peak = kDefaultPeak;
    spec.coeffs = {2e-5, 1e-6};
    return spec;
}

SurrogateUnimodal::SurrogateUnimodal(ParamVector optimum, double peak, std::vector<double> coeffs)
    : optimum_(std::move(optimum)), peak_(peak), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != optimum_.size()) {
        throw DimensionMismatch("surrogate coeffs and optimum must have the same length");
    }
}

double SurrogateUnimodal::evaluate(const ParamVector& params, std::uint64_t) {
    require_dims(params, optimum_.size());
    return std::clamp(peak_ - quadratic_base(params, optimum_, coeffs_), 0.0, 1.0);
}

SurrogateMultimodal::SurrogateMultimodal(ParamVector optimum, double peak,
                                         std::vector<double> coeffs, std::vector<Bump> bumps)
    : optimum_(std::move(optimum)),
      peak_(peak),
      coeffs_(std::move(coeffs)),
      bumps_(std::move(bumps)) {
    if (coeffs_.size() != optimum_.size()) {
        throw DimensionMismatch("surrogate coeffs and optimum must have the same length");
    }
    for (const auto& b : bumps_) {
        if (b.center.size() != optimum_.size()) {
            throw DimensionMismatch("bump center and optimum must have the same length");
        }
    }
}

double SurrogateMultimodal::evaluate(const ParamVector& params, std::uint64_t) {
    require_dims(params, optimum_.size());
    double value = peak_ - quadratic_base(params, optimum_, coeffs_);
    for (const auto& b : bumps_) {
        double dist2 = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double d = static_cast<double>(params[i] - b.center[i]);
            dist2 += d * d;
        }
        value += b.height * std::exp(-dist2 / (b.width * b.width));
    }
    return std::clamp(value, 0.0, 1.0);
}

SphereObjective::SphereObjective(ParamVector shift) : shift_(std::move(shift)) {}

double SphereObjective::evaluate(const ParamVector& params, std::uint64_t) {
    require_dims(params, shift_.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double d = static_cast<double>(params[i] - shift_[i]);
        sum += d * d;
    }
    return -sum;
}

RastriginObjective::RastriginObjective(ParamVector shift) : shift_(std::move(shift)) {}

double RastriginObjective::evaluate(const ParamVector& params, std::uint64_t) {
    require_dims(params, shift_.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double d = static_cast<double>(params[i] - shift_[i]);
        sum += d * d - 10.0 * std::cos(kTwoPi * d) + 10.0;
    }
    return -sum;
}

NoisyEvaluator::NoisyEvaluator(std::unique_ptr<Evaluator> inner, double stddev,
                               std::uint64_t noise_seed)
    : inner_(std::move(inner)), stddev_(stddev), noise_seed_(noise_seed) {}

double NoisyEvaluator::evaluate(const ParamVector& params, std::uint64_t eval_id) {
    const double base = inner_->evaluate(params, eval_id);
    Rng noise(mix_seed(noise_seed_, eval_id));
    return base + stddev_ * noise.normal();
}

MemoizedEvaluator::MemoizedEvaluator(std::unique_ptr<Evaluator> inner)
    : inner_(std::move(inner)) {}

double MemoizedEvaluator::evaluate(const ParamVector& params, std::uint64_t eval_id) {
    issued_.fetch_add(1, std::memory_order_relaxed);
    std::promise<double> promise;
    std::shared_future<double> future;
    bool owner = false;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(params);
        if (it == cache_.end()) {
            future = promise.get_future().share();
            cache_.emplace(params, future);
            owner = true;
        } else {
            future = it->second;
        }
    }
    if (owner) {
        distinct_.fetch_add(1, std::memory_order_relaxed);
        try {
            promise.set_value(inner_->evaluate(params, eval_id));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

namespace {

std::unique_ptr<Evaluator> make_builtin(const ObjectiveSpec& spec) {
    switch (spec.kind) {
    case ObjectiveKind::SurrogateUnimodal:
        return std::make_unique<SurrogateUnimodal>(spec.optimum, spec.peak, spec.coeffs);
    case ObjectiveKind::SurrogateMultimodal:
        return std::make_unique<SurrogateMultimodal>(spec.optimum, spec.peak, spec.coeffs,
                                                     spec.bumps);
    case ObjectiveKind::SphereInt:
        return std::make_unique<SphereObjective>(spec.optimum);
    case ObjectiveKind::RastriginInt:
        return std::make_unique<RastriginObjective>(spec.optimum);
    case ObjectiveKind::External:
        break;
    }
    throw Error("make_builtin called for external objective");
}

void check_static(const ObjectiveSpec& spec, const ParamSpace& space) {
    if (spec.noise_stddev < 0.0) {
        throw ConfigError("objective.noise_stddev: must be >= 0");
    }
    if (spec.memoize.value_or(false) && spec.noise_stddev > 0.0) {
        throw ConfigError("objective.memoize: cannot memoize a noisy objective");
    }
    if (spec.kind == ObjectiveKind::External) {
        if (spec.command.empty()) {
            throw ConfigError("objective.command: external objective requires a non-empty command");
        }
        if (spec.timeout_ms < 1) {
            throw ConfigError("objective.timeout_ms: must be >= 1");
        }
        return;
    }
    if (spec.optimum.size() != space.dims()) {
        throw ConfigError("objective.optimum: expected " + std::to_string(space.dims()) +
                          " entries to match the space, got " + std::to_string(spec.optimum.size()));
    }
    if (spec.kind == ObjectiveKind::SurrogateUnimodal ||
        spec.kind == ObjectiveKind::SurrogateMultimodal) {
        if (spec.coeffs.size() != space.dims()) {
            throw ConfigError("objective.coeffs: expected " + std::to_string(space.dims()) +
                              " entries, got " + std::to_string(spec.coeffs.size()));
        }
        for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
            if (!(spec.coeffs[i] > 0.0) || !std::isfinite(spec.coeffs[i])) {
                throw ConfigError("objective.coeffs[" + std::to_string(i) +
                                  "]: must be a finite positive number");
            }
        }
        if (!std::isfinite(spec.peak)) {
            throw ConfigError("objective.peak: must be finite");
        }
    }
    if (spec.kind == ObjectiveKind::SurrogateMultimodal) {
        for (std::size_t j = 0; j < spec.bumps.size(); ++j) {
            const auto& b = spec.bumps[j];
            const std::string at = "objective.bumps[" + std::to_string(j) + "]";
            if (b.center.size() != space.dims()) {
                throw ConfigError(at + ".center: expected " + std::to_string(space.dims()) +
                                  " entries");
            }
            if (!(b.width > 0.0) || !std::isfinite(b.width)) {
                throw ConfigError(at + ".width: must be a finite positive number");
            }
            if (!std::isfinite(b.height) || b.height < 0.0) {
                throw ConfigError(at + ".height: must be finite and >= 0");
            }
        }
    }
}

// Enumeration proof: the planted optimum is the unique argmax.
void verify_multimodal(const ObjectiveSpec& spec, const ParamSpace& space, Evaluator& surface,
                       std::uint64_t limit) {
    for (std::size_t j = 0; j < spec.bumps.size(); ++j) {
        const double at_center = surface.evaluate(spec.bumps[j].center, 0);
        const double at_optimum = surface.evaluate(spec.optimum, 0);
        if (!(at_center < at_optimum)) {
            throw ConfigError("objective.bumps[" + std::to_string(j) +
                              "]: bump peak is not strictly below the global peak");
        }
    }
    if (!spec.verify_construction) return;
    std::uint64_t total = 0;
    try {
        total = space.cardinality();
    } catch (const SpaceTooLarge&) {
        throw ConstructionUnverifiable("multimodal surface over a non-enumerable space");
    }
    if (total > limit) {
        throw ConstructionUnverifiable(
            "multimodal surface cannot be verified: space cardinality " + std::to_string(total) +
            " exceeds enumeration limit " + std::to_string(limit));
    }
    double best = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    ParamVector argmax;
    for (const auto& point : enumerate_grid(space, limit)) {
        const double value = surface.evaluate(point, 0);
        if (value > best) {
            second = best;
            best = value;
            argmax = point;
        } else if (value > second) {
            second = value;
        }
    }
    if (argmax != spec.optimum) {
        throw ConfigError("objective: multimodal construction failed, enumerated argmax is not "
                          "the planted optimum");
    }
    if (!(best > second)) {
        throw ConfigError("objective: multimodal construction failed, the planted optimum is "
                          "not the unique argmax");
    }
}

} // namespace

void validate_objective_spec(const ObjectiveSpec& spec, const ParamSpace& space,
                             std::uint64_t enumeration_limit) {
    check_static(spec, space);
    if (spec.kind == ObjectiveKind::SurrogateMultimodal) {
        auto surface = make_builtin(spec);
        verify_multimodal(spec, space, *surface, enumeration_limit);
    }
}

BuiltObjective make_evaluator(const ObjectiveSpec& spec, const ParamSpace& space,
                              std::uint64_t enumeration_limit) {
    check_static(spec, space);
    BuiltObjective built;
    if (spec.kind == ObjectiveKind::External) {
        auto external = std::make_unique<ExternalEvaluator>(
            spec.command, space.names(), std::chrono::milliseconds(spec.timeout_ms));
        built.external = external.get();
        built.evaluator = std::move(external);
    } else {
        built.evaluator = make_builtin(spec);
        if (spec.kind == ObjectiveKind::SurrogateMultimodal) {
            verify_multimodal(spec, space, *built.evaluator, enumeration_limit);
        }
    }
    if (spec.noise_stddev > 0.0) {
        built.evaluator = std::make_unique<NoisyEvaluator>(std::move(built.evaluator),
                                                           spec.noise_stddev, spec.noise_seed);
    }
    if (spec.memoize_effective()) {
        auto memo = std::make_unique<MemoizedEvaluator>(std::move(built.evaluator));
        built.memo = memo.get();
        built.evaluator = std::move(memo);
    }
    return built;
}

} // namespace optba
